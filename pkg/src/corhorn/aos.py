"""Abstract operational semantics: the heap-free prophecy interpreter.

Frames map variables directly to pre-values; a mutable reference is a
pair (current value, abstract variable) where the abstract variable
stands for the value the reference will hold when the borrow ends.
Releasing the reference resolves its abstract variable by substituting
the final value throughout the whole configuration.

Lifetime bookkeeping is ghost state: each frame carries a map from its
local lifetime names to globally tagged lifetimes ("a@3" is the 'a
introduced by stack frame 3, counting from the bottom), and the
configuration carries the preorder over all tagged lifetimes.

The module also provides the safety checkers: the summary of a
configuration pairs every abstract variable with exactly one borrower
(give) and one lender (take), and the lifetime-safety judgment ties the
tags to the static contexts.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Union

from . import syntax as S
from . import values as V
from .typeck import LftCtx, TypingResult, type_equiv, type_program

HOT = "hot"
COLD = "cold"


def tagged(name: str, frame_idx: int) -> str:
    return f"{name}@{frame_idx}"


def tag_index(t: str) -> int:
    return int(t.rsplit("@", 1)[1])


class AbsSupply:
    """Fresh abstract variables, display-named after the borrowed
    variable."""

    def __init__(self):
        self.next_uid = 0
        self.used: Counter = Counter()

    def fresh(self, base: str) -> V.AbsVar:
        n = self.used[base]
        self.used[base] += 1
        label = f"{base}◦" if n == 0 else f"{base}◦{n}"
        uid = self.next_uid
        self.next_uid += 1
        return V.AbsVar(uid, label)


@dataclass(frozen=True)
class AbsFrameEntry:
    fn: str
    label: str
    theta: dict[str, str] = field(hash=False)  # local lifetime -> tagged lifetime
    recv: Optional[str] = None
    frame: dict[str, V.PreValue] = field(hash=False, default_factory=dict)


@dataclass(frozen=True)
class AbsConfig:
    stack: tuple[AbsFrameEntry, ...]  # index 0 is the top frame
    lft: LftCtx  # global context over tagged lifetimes

    @property
    def top(self) -> AbsFrameEntry:
        return self.stack[0]

    def subst(self, uid: int, value: V.PreValue) -> "AbsConfig":
        mapping = {uid: value}
        new = tuple(
            AbsFrameEntry(
                e.fn, e.label, e.theta, e.recv,
                {x: V.subst_absvars(v, mapping) for x, v in e.frame.items()},
            )
            for e in self.stack
        )
        return AbsConfig(new, self.lft)

    def absvar_uids(self) -> set[int]:
        out: set[int] = set()
        for e in self.stack:
            for v in e.frame.values():
                out |= V.absvars_in(v)
        return out

    def to_json(self) -> dict:
        return {
            "stack": [
                {
                    "fn": e.fn,
                    "label": e.label,
                    "theta": dict(sorted(e.theta.items())),
                    "recv": e.recv,
                    "frame": {x: V.to_json(v) for x, v in sorted(e.frame.items())},
                }
                for e in self.stack
            ],
            "lifetimes": {
                "carrier": sorted(self.lft.carrier),
                "order": sorted([a, b] for a, b in self.lft.order),
            },
        }


@dataclass(frozen=True)
class Next:
    config: AbsConfig


@dataclass(frozen=True)
class Final:
    pass


@dataclass(frozen=True)
class Stuck:
    reason: str


StepResult = Union[Next, Final, Stuck]


class _StuckSignal(Exception):
    pass


def val_of(v: V.PreValue) -> V.PreValue:
    """Current value behind a pointer pre-value."""
    if isinstance(v, V.Box):
        return v.inner
    if isinstance(v, V.MutPair):
        return v.cur
    raise _StuckSignal(f"expected a pointer pre-value, got {V.show(v)}")


def is_final(prog: S.Program, cfg: AbsConfig) -> bool:
    top = cfg.top
    return len(cfg.stack) == 1 and isinstance(prog.fn(top.fn).body[top.label], S.StmtReturn)


def step(
    prog: S.Program,
    typing: TypingResult,
    cfg: AbsConfig,
    rng: random.Random,
    supply: AbsSupply,
    rand_range: tuple[int, int] = (-128, 127),
) -> StepResult:
    try:
        return _step(prog, typing, cfg, rng, supply, rand_range)
    except _StuckSignal as e:
        return Stuck(str(e))


def _step(prog, typing, cfg, rng, supply, rand_range) -> StepResult:
    top = cfg.top
    f, label = top.fn, top.label
    fn = prog.fn(f)
    stmt = fn.body[label]
    frame = dict(top.frame)
    theta = dict(top.theta)
    lctx = cfg.lft

    def ty(x: str) -> S.Ptr:
        return typing.ty(f, label, x)

    def need(x: str) -> V.PreValue:
        if x not in frame:
            raise _StuckSignal(f"variable {x!r} missing from frame")
        return frame[x]

    def retop(new_label: str, new_theta=None, new_lctx=None) -> AbsConfig:
        entry = AbsFrameEntry(f, new_label, new_theta if new_theta is not None else theta,
                              top.recv, frame)
        return AbsConfig((entry,) + cfg.stack[1:], new_lctx if new_lctx is not None else lctx)

    if isinstance(stmt, S.StmtReturn):
        if len(cfg.stack) == 1:
            return Final()
        if len(frame) != 1:
            raise _StuckSignal("return with extra variables in frame")
        (value,) = frame.values()
        caller = cfg.stack[1]
        cframe = dict(caller.frame)
        cframe[caller.recv] = value
        entry = AbsFrameEntry(caller.fn, caller.label, caller.theta, None, cframe)
        return Next(AbsConfig((entry,) + cfg.stack[2:], lctx))

    if isinstance(stmt, S.StmtMatch):
        t = ty(stmt.x)
        v = need(stmt.x)
        del frame[stmt.x]
        if t.kind in (S.OWN, S.IMMUT):
            if not (isinstance(v, V.Box) and isinstance(v.inner, V.Inj)):
                raise _StuckSignal(f"match: bad scrutinee {V.show(v)}")
            i = v.inner.tag
            binder, target = (stmt.y0, stmt.l0) if i == 0 else (stmt.y1, stmt.l1)
            frame[binder] = V.Box(v.inner.payload)
            entry = AbsFrameEntry(f, target, theta, top.recv, frame)
            return Next(AbsConfig((entry,) + cfg.stack[1:], lctx))
        else:
            if not (isinstance(v, V.MutPair) and isinstance(v.cur, V.Inj)
                    and isinstance(v.fin, V.AbsVar)):
                raise _StuckSignal(f"match: bad mut scrutinee {V.show(v)}")
            i = v.cur.tag
            fresh = supply.fresh(stmt.x)
            binder, target = (stmt.y0, stmt.l0) if i == 0 else (stmt.y1, stmt.l1)
            frame[binder] = V.MutPair(v.cur.payload, fresh)
            entry = AbsFrameEntry(f, target, theta, top.recv, frame)
            return Next(AbsConfig((entry,) + cfg.stack[1:], lctx).subst(v.fin.uid, V.Inj(i, fresh)))

    instr = stmt.instr
    goto = stmt.goto

    if isinstance(instr, S.MutBor):
        v = need(instr.x)
        fresh = supply.fresh(instr.x)
        if isinstance(v, V.Box):
            frame[instr.y] = V.MutPair(v.inner, fresh)
            frame[instr.x] = V.Box(fresh)
        elif isinstance(v, V.MutPair):
            frame[instr.y] = V.MutPair(v.cur, fresh)
            frame[instr.x] = V.MutPair(fresh, v.fin)
        else:
            raise _StuckSignal(f"mutbor: bad pre-value {V.show(v)}")
        return Next(retop(goto))

    if isinstance(instr, S.Drop):
        t = ty(instr.x)
        v = need(instr.x)
        del frame[instr.x]
        if t.kind == S.MUT:
            if not (isinstance(v, V.MutPair) and isinstance(v.fin, V.AbsVar)):
                raise _StuckSignal(f"drop: mut without prophecy {V.show(v)}")
            return Next(retop(goto).subst(v.fin.uid, v.cur))
        return Next(retop(goto))

    if isinstance(instr, S.Immut):
        v = need(instr.x)
        if not (isinstance(v, V.MutPair) and isinstance(v.fin, V.AbsVar)):
            raise _StuckSignal(f"immut: bad pre-value {V.show(v)}")
        frame[instr.x] = V.Box(v.cur)
        return Next(retop(goto).subst(v.fin.uid, v.cur))

    if isinstance(instr, S.Swap):
        t = ty(instr.y)
        vx, vy = need(instr.x), need(instr.y)
        if not isinstance(vx, V.MutPair):
            raise _StuckSignal("swap: first operand not a mut")
        if t.kind == S.OWN:
            if not isinstance(vy, V.Box):
                raise _StuckSignal("swap: second operand not a box")
            frame[instr.x] = V.MutPair(vy.inner, vx.fin)
            frame[instr.y] = V.Box(vx.cur)
        else:
            if not isinstance(vy, V.MutPair):
                raise _StuckSignal("swap: second operand not a mut")
            frame[instr.x] = V.MutPair(vy.cur, vx.fin)
            frame[instr.y] = V.MutPair(vx.cur, vy.fin)
        return Next(retop(goto))

    if isinstance(instr, S.MakePtr):
        v = need(instr.x)
        del frame[instr.x]
        frame[instr.y] = V.Box(v)
        return Next(retop(goto))

    if isinstance(instr, S.Deref):
        t = ty(instr.x)
        inner_t = t.target
        v = need(instr.x)
        del frame[instr.x]
        if t.kind == S.OWN:
            if not isinstance(v, V.Box):
                raise _StuckSignal(f"deref: bad box pre-value {V.show(v)}")
            frame[instr.y] = v.inner
            return Next(retop(goto))
        if t.kind == S.IMMUT:
            frame[instr.y] = V.Box(val_of(v.inner))
            return Next(retop(goto))
        # t.kind == MUT; cases on the inner pointer kind
        if not (isinstance(v, V.MutPair) and isinstance(v.fin, V.AbsVar)):
            raise _StuckSignal(f"deref: bad mut pre-value {V.show(v)}")
        if inner_t.kind == S.OWN:
            fresh = supply.fresh(instr.x)
            frame[instr.y] = V.MutPair(v.cur.inner, fresh)
            return Next(retop(goto).subst(v.fin.uid, V.Box(fresh)))
        if inner_t.kind == S.IMMUT:
            inner_val = v.cur.inner
            frame[instr.y] = V.Box(inner_val)
            return Next(retop(goto).subst(v.fin.uid, V.Box(inner_val)))
        # mut of mut
        fresh = supply.fresh(instr.x)
        inner = v.cur
        if not isinstance(inner, V.MutPair):
            raise _StuckSignal("deref: expected inner mut pair")
        frame[instr.y] = V.MutPair(inner.cur, fresh)
        return Next(retop(goto).subst(v.fin.uid, V.MutPair(fresh, inner.fin)))

    if isinstance(instr, S.CopyDeref):
        v = need(instr.x)
        frame[instr.y] = V.Box(val_of(v))
        return Next(retop(goto))

    if isinstance(instr, S.TypeWeaken):
        return Next(retop(goto))

    if isinstance(instr, S.Call):
        g = prog.fn(instr.fn)
        new_theta = {gp: theta[ca] for gp, ca in zip(g.lft_params, instr.lfts)}
        callee_frame = {px: frame.pop(x) for x, (px, _) in zip(instr.args, g.params)}
        caller_entry = AbsFrameEntry(f, goto, theta, instr.y, frame)
        top_entry = AbsFrameEntry(instr.fn, S.ENTRY, new_theta, None, callee_frame)
        return Next(AbsConfig((top_entry, caller_entry) + cfg.stack[1:], lctx))

    if isinstance(instr, S.IntroLft):
        n = len(cfg.stack) - 1  # frames are tagged from the stack bottom = 0
        tag = tagged(instr.lft, n)
        below = frozenset(t for t in lctx.carrier if tag_index(t) < n)
        theta[instr.lft] = tag
        return Next(retop(goto, new_theta=theta, new_lctx=lctx.add(tag, below)))

    if isinstance(instr, S.NowLft):
        tag = theta.pop(instr.lft, None)
        if tag is None:
            raise _StuckSignal(f"now: lifetime '{instr.lft} not in frame context")
        return Next(retop(goto, new_theta=theta, new_lctx=lctx.remove(tag)))

    if isinstance(instr, S.LftLeq):
        return Next(retop(goto, new_lctx=lctx.relate(theta[instr.lo], theta[instr.hi])))

    if isinstance(instr, S.ConstInstr):
        frame[instr.y] = V.Box(V.UNIT if instr.value == S.UNIT_CONST else instr.value)
        return Next(retop(goto))

    if isinstance(instr, S.BinOpInstr):
        a = val_of(need(instr.x))
        b = val_of(need(instr.x2))
        if not isinstance(a, int) or not isinstance(b, int):
            raise _StuckSignal("binop: non-integer operands")
        res = S.eval_op(instr.op, a, b)
        frame[instr.y] = V.Box(res if isinstance(res, int) and not isinstance(res, bool)
                               else (V.TRUE if res else V.FALSE))
        return Next(retop(goto))

    if isinstance(instr, S.RandInstr):
        frame[instr.y] = V.Box(rng.randint(*rand_range))
        return Next(retop(goto))

    if isinstance(instr, S.InjInstr):
        v = need(instr.x)
        del frame[instr.x]
        frame[instr.y] = V.Box(V.Inj(instr.index, v.inner))
        return Next(retop(goto))

    if isinstance(instr, S.MakePair):
        v0, v1 = need(instr.x0), need(instr.x1)
        del frame[instr.x0]
        del frame[instr.x1]
        frame[instr.y] = V.Box(V.Pair(v0.inner, v1.inner))
        return Next(retop(goto))

    if isinstance(instr, S.DestructPair):
        t = ty(instr.x)
        v = need(instr.x)
        del frame[instr.x]
        if t.kind in (S.OWN, S.IMMUT):
            pair = v.inner
            if not isinstance(pair, V.Pair):
                raise _StuckSignal("destruct: not a pair")
            frame[instr.y0] = V.Box(pair.fst)
            frame[instr.y1] = V.Box(pair.snd)
            return Next(retop(goto))
        if not (isinstance(v, V.MutPair) and isinstance(v.cur, V.Pair)
                and isinstance(v.fin, V.AbsVar)):
            raise _StuckSignal("destruct: bad mut pair")
        f0 = supply.fresh(instr.x)
        f1 = supply.fresh(instr.x)
        frame[instr.y0] = V.MutPair(v.cur.fst, f0)
        frame[instr.y1] = V.MutPair(v.cur.snd, f1)
        return Next(retop(goto).subst(v.fin.uid, V.Pair(f0, f1)))

    raise _StuckSignal(f"no rule for instruction {instr!r}")


# ---------------------------------------------------------------------------
# Whole-run driver
# ---------------------------------------------------------------------------


@dataclass
class RunOutcome:
    status: str  # 'returned' | 'out_of_fuel' | 'stuck'
    value: Optional[V.Value] = None
    reason: str = ""
    steps: int = 0
    trace: list[AbsConfig] = field(default_factory=list)


class RunError(S.CorError):
    def __init__(self, code: str, msg: str):
        super().__init__(f"[{code}] {msg}")
        self.code = code


def initial_config(prog: S.Program, fname: str, inputs: list[V.Value]) -> AbsConfig:
    fn = prog.fn(fname)
    if not fn.is_simple():
        raise RunError("NotSimpleFunction", f"{fname} takes lifetime parameters")
    if len(inputs) != len(fn.params):
        raise RunError("SortMismatch", f"{fname} expects {len(fn.params)} arguments")
    from .cos import value_matches

    frame: dict[str, V.PreValue] = {}
    for v, (x, t) in zip(inputs, fn.params):
        if not value_matches(v, t) or not V.is_value(v):
            raise RunError("SortMismatch", f"argument {x!r}: {V.show(v)} does not fit {t}")
        frame[x] = v
    return AbsConfig((AbsFrameEntry(fname, S.ENTRY, {}, None, frame),), LftCtx.empty())


def run(
    prog: S.Program,
    fname: str,
    inputs: list[V.Value],
    seed: int = 0,
    fuel: int = 100_000,
    typing: Optional[TypingResult] = None,
    rand_range: tuple[int, int] = (-128, 127),
    keep_trace: bool = True,
    check_safety: bool = False,
) -> RunOutcome:
    typing = typing or type_program(prog)
    supply = AbsSupply()
    rng = random.Random(seed)
    cfg = initial_config(prog, fname, inputs)
    trace = [cfg] if keep_trace else []
    steps = 0
    while True:
        if check_safety:
            ok, diags = safe_abstract(prog, typing, cfg)
            if not ok:
                raise RunError("UnsafeConfig", "; ".join(diags))
        res = step(prog, typing, cfg, rng, supply, rand_range)
        if isinstance(res, Final):
            (value,) = cfg.top.frame.values()
            if not V.is_value(value):
                raise RunError("AbstractResult", f"abstract variables leaked: {V.show(value)}")
            return RunOutcome("returned", value=value, steps=steps, trace=trace)
        if isinstance(res, Stuck):
            return RunOutcome("stuck", reason=res.reason, steps=steps, trace=trace)
        if steps >= fuel:
            return RunOutcome("out_of_fuel", steps=steps, trace=trace)
        cfg = res.config
        steps += 1
        if keep_trace:
            trace.append(cfg)


# ---------------------------------------------------------------------------
# Safety: summaries and lifetime safety
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Give:
    lft: str  # tagged
    uid: int
    ty: S.Type  # canon, with tagged lifetimes


@dataclass(frozen=True)
class Take:
    lft: str
    uid: int
    ty: S.Type


class ShapeMismatch(S.CorError):
    pass


def summarize_prevalue(v: V.PreValue, t: S.Type, mode: str, frozen_tag: Optional[str]) -> Counter:
    """Summary of one pre-value: give items for prophecies handed out at
    hot mutable references, a take item when the position belongs to a
    frozen lender."""
    if isinstance(v, V.AbsVar):
        if frozen_tag is None:
            raise ShapeMismatch(f"abstract variable {V.show(v)} in an active position")
        return Counter({Take(frozen_tag, v.uid, S.canon_type(t)): 1})
    t = S.whnf_type(t)
    if isinstance(t, S.Ptr) and t.kind in (S.OWN, S.IMMUT):
        if not isinstance(v, V.Box):
            raise ShapeMismatch(f"expected box at {t}, got {V.show(v)}")
        inner_mode = mode if t.kind == S.OWN else COLD
        return summarize_prevalue(v.inner, t.target, inner_mode, frozen_tag)
    if isinstance(t, S.Ptr) and t.kind == S.MUT:
        if not isinstance(v, V.MutPair):
            raise ShapeMismatch(f"expected mut pair at {t}, got {V.show(v)}")
        if mode == HOT:
            if not isinstance(v.fin, V.AbsVar):
                raise ShapeMismatch("hot mutable reference without a prophecy variable")
            out = summarize_prevalue(v.cur, t.target, HOT, frozen_tag)
            out[Give(t.lft, v.fin.uid, S.canon_type(t.target))] += 1
            return out
        return summarize_prevalue(v.cur, t.target, COLD, frozen_tag)
    if isinstance(t, S.Sum):
        if not isinstance(v, V.Inj):
            raise ShapeMismatch(f"expected inj at {t}, got {V.show(v)}")
        return summarize_prevalue(v.payload, t.left if v.tag == 0 else t.right, mode, frozen_tag)
    if isinstance(t, S.Prod):
        if not isinstance(v, V.Pair):
            raise ShapeMismatch(f"expected pair at {t}, got {V.show(v)}")
        return summarize_prevalue(v.fst, t.left, mode, frozen_tag) + summarize_prevalue(
            v.snd, t.right, mode, frozen_tag
        )
    if isinstance(t, S.IntT):
        if not isinstance(v, int):
            raise ShapeMismatch(f"expected int, got {V.show(v)}")
        return Counter()
    if isinstance(t, S.UnitT):
        if not isinstance(v, V.UnitVal):
            raise ShapeMismatch(f"expected unit, got {V.show(v)}")
        return Counter()
    raise ShapeMismatch(f"bad type {t}")


def summarize_frame(theta: dict[str, str], frame: dict[str, V.PreValue], gamma: dict) -> Counter:
    if set(frame) != set(gamma):
        raise ShapeMismatch("frame and context domains differ")
    out: Counter = Counter()
    for x, vi in gamma.items():
        t = S.subst_lifetimes(vi.ty, theta)
        frz = theta.get(vi.frozen_at) if vi.frozen_at is not None else None
        if vi.frozen_at is not None and frz is None:
            raise ShapeMismatch(f"frozen lifetime '{vi.frozen_at} not in frame context")
        out += summarize_prevalue(frame[x], t, HOT, frz)
    return out


def summarize_config(prog: S.Program, typing: TypingResult, cfg: AbsConfig) -> Counter:
    out: Counter = Counter()
    for i, e in enumerate(cfg.stack):
        gamma = dict(typing.ctx(e.fn, e.label).gamma)
        if i > 0:
            gamma.pop(e.recv, None)  # the receiver is not populated until return
        out += summarize_frame(e.theta, e.frame, gamma)
    return out


def safe_summary(lctx: LftCtx, summary: Counter) -> list[str]:
    by_uid: dict[int, list] = {}
    for item, n in summary.items():
        by_uid.setdefault(item.uid, []).extend([item] * n)
    diags = []
    for uid, items in sorted(by_uid.items()):
        gives = [i for i in items if isinstance(i, Give)]
        takes = [i for i in items if isinstance(i, Take)]
        if len(gives) != 1 or len(takes) != 1:
            diags.append(f"abs var {uid}: {len(gives)} gives, {len(takes)} takes")
            continue
        g, t = gives[0], takes[0]
        if not type_equiv(lctx, g.ty, t.ty):
            diags.append(f"abs var {uid}: give/take types differ")
        if not lctx.leq(g.lft, t.lft):
            diags.append(f"abs var {uid}: give lifetime {g.lft} not before take {t.lft}")
    return diags


def lifetime_safe_frame(
    glob: LftCtx, theta: dict[str, str], local: LftCtx, a_ex: frozenset[str], idx: int
) -> list[str]:
    diags = []
    if set(theta) != set(local.carrier):
        diags.append(f"frame {idx}: theta domain differs from static lifetime context")
        return diags
    for a in local.carrier:
        tag = theta[a]
        if tag not in glob.carrier:
            diags.append(f"frame {idx}: tag {tag} not in global context")
            continue
        if a in a_ex:
            if tag_index(tag) >= idx:
                diags.append(f"frame {idx}: parameter '{a} maps to non-earlier tag {tag}")
        elif tag != tagged(a, idx):
            diags.append(f"frame {idx}: local '{a} maps to {tag}, expected {tagged(a, idx)}")
    for a in local.carrier:
        for b in local.carrier:
            if a in a_ex and b in a_ex:
                if local.leq(a, b) and not glob.leq(theta[a], theta[b]):
                    diags.append(f"frame {idx}: order of '{a} <= '{b} lost globally")
            else:
                if local.leq(a, b) != glob.leq(theta[a], theta[b]):
                    diags.append(f"frame {idx}: order of '{a},'{b} disagrees with global")
    return diags


def lifetime_safe(prog: S.Program, typing: TypingResult, cfg: AbsConfig) -> list[str]:
    diags = []
    n = len(cfg.stack)
    locals_total = 0
    for i, e in enumerate(cfg.stack):
        idx = n - 1 - i  # tags count from the stack bottom
        local = typing.ctx(e.fn, e.label).lft
        a_ex = typing.a_ex[e.fn]
        diags += lifetime_safe_frame(cfg.lft, e.theta, local, a_ex, idx)
        locals_total += len(local.carrier - a_ex)
    if len(cfg.lft.carrier) != locals_total:
        diags.append(
            f"global context has {len(cfg.lft.carrier)} lifetimes, frames account for {locals_total}"
        )
    return diags


def safe_abstract(prog: S.Program, typing: TypingResult, cfg: AbsConfig) -> tuple[bool, list[str]]:
    """Full safety check: summary discipline plus lifetime safety."""
    try:
        summary = summarize_config(prog, typing, cfg)
    except ShapeMismatch as e:
        return False, [str(e)]
    diags = safe_summary(cfg.lft, summary) + lifetime_safe(prog, typing, cfg)
    return not diags, diags

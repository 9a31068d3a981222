"""Executable metatheory: lockstep checks between the heap interpreter,
the prophecy interpreter and the resolution engine, plus the end-to-end
differential oracle.

The heap-vs-prophecy link reconstructs an abstract configuration from a
concrete one (the extended readout) and insists the two sides agree up
to the naming of abstract variables while the extended summary and
footprint stay safe: every prophecy is shared by exactly one borrower
and one lender at one address, and every address is either owned by one
active access or by a frozen owner alongside readers whose lifetimes end
first.

The prophecy-vs-resolution link renders each abstract configuration as
a stack of predicate applications (a resolutive configuration) and
checks that each interpreter step is matched by one resolution step
using exactly the clause generated from the executed statement.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import aos
from . import cos
from . import logic as L
from . import sldc
from . import syntax as S
from . import translate as T
from . import values as V
from .typeck import TypingResult, type_program


class LinkError(S.CorError):
    pass


@dataclass(frozen=True)
class GiveX:
    lft: str
    addr: int
    uid: int
    ty: S.Type


@dataclass(frozen=True)
class TakeX:
    lft: str
    addr: int
    uid: int
    ty: S.Type


HOT = "hot"


@dataclass
class ReadoutState:
    summary: Counter = field(default_factory=Counter)
    footprint: Counter = field(default_factory=Counter)
    diags: list[str] = field(default_factory=list)
    cold_mut_seen: bool = False
    supply: Optional[aos.AbsSupply] = None
    lctx: object = None
    # unguided mode: prophecies handed out by borrowers, keyed by the
    # borrowed address and the borrow's lifetime, so lender takes can
    # reuse the same variable
    give_vars: dict = field(default_factory=dict)

    def diag(self, msg: str):
        self.diags.append(msg)


def _mark(mode, frozen_at: Optional[str], addr: int):
    if mode == HOT:
        return ("hot", frozen_at, addr)
    return ("cold", mode[1], addr)


def _guide_absvar(st: ReadoutState, guide) -> V.AbsVar:
    if isinstance(guide, V.AbsVar):
        return guide
    assert st.supply is not None
    return st.supply.fresh("ro")


def _read_ptr(heap, mode, frz, addr, t: S.Ptr, guide, st: ReadoutState):
    """Read the pointer `addr` at (tagged) pointer type t."""
    if t.kind in (S.OWN, S.IMMUT):
        inner_mode = mode if t.kind == S.OWN else (mode if mode != HOT else ("cold", t.lft))
        if guide is not None and not isinstance(guide, V.Box):
            st.diag(f"expected box at {addr}, abstract side has {V.show(guide)}")
            return None
        v = _read_data(heap, inner_mode, frz, addr, t.target,
                       guide.inner if guide is not None else None, st)
        return V.Box(v) if v is not None else None
    # mutable reference
    if guide is not None and not isinstance(guide, V.MutPair):
        st.diag(f"expected mut pair at {addr}, abstract side has {V.show(guide)}")
        return None
    if mode == HOT:
        fin = _guide_absvar(st, guide.fin if guide is not None else None)
        if guide is not None and not isinstance(guide.fin, V.AbsVar):
            st.diag(f"hot mut at {addr} without prophecy on the abstract side")
            return None
        if guide is None:
            st.give_vars.setdefault(addr, []).append((fin, t.lft, t.target))
        v = _read_data(heap, HOT, frz, addr, t.target,
                       guide.cur if guide is not None else None, st)
        if v is None:
            return None
        st.summary[GiveX(t.lft, addr, fin.uid, S.canon_type(t.target))] += 1
        return V.MutPair(v, fin)
    # cold mutable reference: the final component is unobservable
    st.cold_mut_seen = True
    v = _read_data(heap, mode, frz, addr, t.target,
                   guide.cur if guide is not None else None, st)
    if v is None:
        return None
    return V.MutPair(v, guide.fin if guide is not None else _guide_absvar(st, None))


def _read_data(heap, mode, frz, addr, t: S.Type, guide, st: ReadoutState):
    """Read the data at `addr` of (tagged) type t.

    A frozen position reads out as a take of a prophecy variable where
    the data is actually borrowed away: with a guide, where the abstract
    side has a prophecy; without one, where some borrower handed out a
    prophecy for this address at the freezing lifetime."""
    if frz is not None:
        if guide is not None and isinstance(guide, V.AbsVar):
            st.summary[TakeX(frz, addr, guide.uid, S.canon_type(t))] += 1
            return guide
        if guide is None:
            # cut exactly where some borrower handed out a prophecy for
            # this address, at a lifetime ending by this freeze, for data
            # of an equivalent type
            from .typeck import type_equiv

            for entry in st.give_vars.get(addr, ()):
                x, give_lft, give_ty = entry
                if st.lctx.leq(give_lft, frz) and type_equiv(st.lctx, give_ty, t):
                    st.give_vars[addr].remove(entry)
                    st.summary[TakeX(frz, addr, x.uid, S.canon_type(t))] += 1
                    return x
    t = S.whnf_type(t)
    if isinstance(t, S.IntT):
        if addr not in heap:
            st.diag(f"missing cell {addr}")
            return None
        n = heap[addr]
        if guide is not None and n != guide:
            st.diag(f"cell {addr} holds {n}, abstract side has {V.show(guide)}")
            return None
        st.footprint[_mark(mode, frz, addr)] += 1
        return n
    if isinstance(t, S.UnitT):
        if guide is not None and not isinstance(guide, V.UnitVal):
            st.diag(f"unit position at {addr} vs {V.show(guide)}")
            return None
        return V.UNIT
    if isinstance(t, S.Ptr):
        if addr not in heap:
            st.diag(f"missing pointer cell {addr}")
            return None
        st.footprint[_mark(mode, frz, addr)] += 1
        return _read_ptr(heap, mode, frz, heap[addr], t, guide, st)
    if isinstance(t, S.Sum):
        if addr not in heap:
            st.diag(f"missing tag cell {addr}")
            return None
        tag = heap[addr]
        if tag not in (0, 1):
            st.diag(f"bad sum tag {tag} at {addr}")
            return None
        if guide is not None and (not isinstance(guide, V.Inj) or guide.tag != tag):
            st.diag(f"tag {tag} at {addr} vs abstract {V.show(guide)}")
            return None
        side = t.left if tag == 0 else t.right
        other = t.right if tag == 0 else t.left
        st.footprint[_mark(mode, frz, addr)] += 1
        pad = max(S.size_of(other) - S.size_of(side), 0)
        for k in range(pad):
            c = addr + 1 + S.size_of(side) + k
            if c not in heap or heap[c] != 0:
                st.diag(f"bad padding cell {c}")
                return None
            st.footprint[_mark(mode, frz, c)] += 1
        payload = _read_data(heap, mode, frz, addr + 1, side,
                             guide.payload if guide is not None else None, st)
        return V.Inj(tag, payload) if payload is not None else None
    if isinstance(t, S.Prod):
        g0 = guide.fst if isinstance(guide, V.Pair) else None
        g1 = guide.snd if isinstance(guide, V.Pair) else None
        if guide is not None and not isinstance(guide, V.Pair):
            st.diag(f"pair position at {addr} vs {V.show(guide)}")
            return None
        v0 = _read_data(heap, mode, frz, addr, t.left, g0, st)
        v1 = _read_data(heap, mode, frz, addr + S.size_of(t.left), t.right, g1, st)
        if v0 is None or v1 is None:
            return None
        return V.Pair(v0, v1)
    st.diag(f"cannot read type {t}")
    return None


def _frames_gamma(typing: TypingResult, entry, is_top: bool) -> dict:
    gamma = dict(typing.ctx(entry.fn, entry.label).gamma)
    if not is_top:
        gamma.pop(entry.recv, None)  # receiver is filled in at return time
    return gamma


def extended_readout(
    prog: S.Program,
    typing: TypingResult,
    cfg: cos.CosConfig,
    guide: Optional[aos.AbsConfig] = None,
) -> tuple[Optional[aos.AbsConfig], Counter, Counter, list[str]]:
    """Reconstruct an abstract configuration from a concrete one.

    With a guide, frozen/cold choices follow the guide's pre-values and
    concrete parts are checked against it; without one, every frozen
    position reads out as a fresh prophecy variable (and a cold mut gets
    a placeholder final component).
    """
    st = ReadoutState(supply=None if guide is not None else aos.AbsSupply())
    if guide is not None and len(guide.stack) != len(cfg.stack):
        return None, st.summary, st.footprint, [
            f"stack depth {len(cfg.stack)} vs abstract {len(guide.stack)}"
        ]
    thetas = []
    jobs = []  # (frame_index, var, tagged type, frozen tag, address, guide value)
    for i, entry in enumerate(cfg.stack):
        g_entry = guide.stack[i] if guide is not None else None
        if g_entry is not None and (g_entry.fn, g_entry.label, g_entry.recv) != (
            entry.fn, entry.label, entry.recv
        ):
            st.diag(f"frame {i}: program point mismatch")
            return None, st.summary, st.footprint, st.diags
        theta = g_entry.theta if g_entry is not None else _reconstruct_theta(
            prog, typing, cfg, i
        )
        thetas.append(dict(theta))
        gamma = _frames_gamma(typing, entry, i == 0)
        if set(entry.frame) != set(gamma):
            st.diag(f"frame {i}: variables {sorted(entry.frame)} vs context {sorted(gamma)}")
            return None, st.summary, st.footprint, st.diags
        for x in sorted(gamma):
            vi = gamma[x]
            t = S.subst_lifetimes(vi.ty, theta)
            frz = theta.get(vi.frozen_at) if vi.frozen_at is not None else None
            gv = g_entry.frame.get(x) if g_entry is not None else None
            if g_entry is not None and gv is None:
                st.diag(f"frame {i}: variable {x} missing on the abstract side")
                return None, st.summary, st.footprint, st.diags
            jobs.append((i, x, t, frz, entry.frame[x], gv))
    lft = guide.lft if guide is not None else _reconstruct_global_lft(prog, typing, cfg, thetas, len(cfg.stack))
    st.lctx = lft
    # unguided pairing needs borrowers (including frozen re-borrowers, in
    # later-lifetime-first order) read before their lenders
    if guide is None:
        active = [j for j in jobs if j[3] is None]
        frozen = [j for j in jobs if j[3] is not None]
        # earlier-ending freezes are re-borrowers: read them first
        frozen.sort(key=lambda j: -sum(lft.leq(j[3], other[3]) for other in frozen))
        ordered = active + frozen
    else:
        ordered = jobs
    aframes: list[dict] = [dict() for _ in cfg.stack]
    for i, x, t, frz, addr, gv in ordered:
        v = _read_ptr(cfg.heap, HOT, frz, addr, t, gv, st)
        if v is None:
            return None, st.summary, st.footprint, st.diags
        aframes[i][x] = v
    frames = tuple(
        aos.AbsFrameEntry(entry.fn, entry.label, thetas[i], entry.recv, aframes[i])
        for i, entry in enumerate(cfg.stack)
    )
    out = aos.AbsConfig(frames, lft)
    return out, st.summary, st.footprint, st.diags


def _reconstruct_theta(prog, typing, cfg: cos.CosConfig, i: int) -> dict[str, str]:
    """Frame i's lifetime tags, rebuilt from the static contexts: locals
    carry the frame's own (bottom-based) index, parameters resolve
    through the call instruction that pushed the frame above."""
    n = len(cfg.stack)
    entry = cfg.stack[i]
    a_ex = typing.a_ex[entry.fn]
    local = typing.ctx(entry.fn, entry.label).lft
    idx = n - 1 - i
    theta = {a: aos.tagged(a, idx) for a in local.carrier if a not in a_ex}
    if a_ex:
        caller = cfg.stack[i + 1]
        caller_theta = _reconstruct_theta(prog, typing, cfg, i + 1)
        fn = prog.fn(caller.fn)
        call = _find_call(fn, caller.label, caller.recv, entry.fn)
        if call is None:
            raise LinkError(f"cannot locate the call that pushed frame {i}")
        g = prog.fn(entry.fn)
        for gp, ca in zip(g.lft_params, call.lfts):
            theta[gp] = caller_theta[ca]
    return theta


def _find_call(fn: S.FunctionDef, cont_label: str, recv: str, callee: str):
    for stmt in fn.body.values():
        if (
            isinstance(stmt, S.StmtInstr)
            and isinstance(stmt.instr, S.Call)
            and stmt.goto == cont_label
            and stmt.instr.y == recv
            and stmt.instr.fn == callee
        ):
            return stmt.instr
    return None


def _reconstruct_global_lft(prog, typing, cfg, thetas, n):
    from .typeck import LftCtx

    carrier = set()
    pairs = set()
    for i, entry in enumerate(cfg.stack):
        local = typing.ctx(entry.fn, entry.label).lft
        a_ex = typing.a_ex[entry.fn]
        theta = thetas[i]
        for a in local.carrier:
            if a not in a_ex:
                carrier.add(theta[a])
        for a, b in local.order:
            if not (a in a_ex and b in a_ex):
                pairs.add((theta[a], theta[b]))
    return LftCtx.make(carrier, pairs)


def safe_extended(lctx, summary: Counter, footprint: Counter) -> list[str]:
    """Safety of the extended summary and footprint."""
    diags = []
    by_uid: dict[int, list] = {}
    for item, k in summary.items():
        by_uid.setdefault(item.uid, []).extend([item] * k)
    for uid, items in sorted(by_uid.items()):
        gives = [i for i in items if isinstance(i, GiveX)]
        takes = [i for i in items if isinstance(i, TakeX)]
        if len(gives) != 1 or len(takes) != 1:
            diags.append(f"prophecy {uid}: {len(gives)} gives / {len(takes)} takes")
            continue
        g, t = gives[0], takes[0]
        if g.addr != t.addr:
            diags.append(f"prophecy {uid}: give at {g.addr}, take at {t.addr}")
        from .typeck import type_equiv

        if not type_equiv(lctx, g.ty, t.ty):
            diags.append(f"prophecy {uid}: give/take types differ")
        if not lctx.leq(g.lft, t.lft):
            diags.append(f"prophecy {uid}: give lifetime {g.lft} not before take {t.lft}")
    by_addr: dict[int, list] = {}
    for mark, k in footprint.items():
        by_addr.setdefault(mark[2], []).extend([mark] * k)
    for addr, marks in sorted(by_addr.items()):
        hots = [m for m in marks if m[0] == "hot"]
        colds = [m for m in marks if m[0] == "cold"]
        if len(hots) == 1 and not colds:
            continue
        if len(hots) == 1 and hots[0][1] is not None:
            if all(lctx.leq(c[1], hots[0][1]) for c in colds):
                continue
            diags.append(f"address {addr}: cold access outlives the frozen owner")
            continue
        diags.append(f"address {addr}: access marks {sorted(str(m) for m in marks)}")
    return diags


def safe_link(
    prog: S.Program,
    typing: TypingResult,
    cfg: cos.CosConfig,
    acfg: aos.AbsConfig,
) -> tuple[bool, list[str]]:
    """Does the concrete configuration read out safely as the abstract
    one?  Checks the guided readout, summary/footprint safety and
    lifetime safety."""
    _, summary, footprint, diags = extended_readout(prog, typing, cfg, guide=acfg)
    if diags:
        return False, diags
    diags = safe_extended(acfg.lft, summary, footprint)
    diags += aos.lifetime_safe(prog, typing, acfg)
    return not diags, diags


# ---------------------------------------------------------------------------
# Lockstep runs
# ---------------------------------------------------------------------------


@dataclass
class LinkStep:
    index: int
    point: str
    linked: bool
    diagnostics: list[str] = field(default_factory=list)


@dataclass
class LinkReport:
    ok: bool
    steps: list[LinkStep]
    detail: str = ""
    final_value: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "detail": self.detail,
            "final_value": self.final_value,
            "steps": [
                {"index": s.index, "point": s.point, "linked": s.linked, "diagnostics": s.diagnostics}
                for s in self.steps
                if not s.linked
            ],
            "total_steps": len(self.steps),
        }


def lockstep_cos_aos(
    prog: S.Program,
    fname: str,
    inputs: list[V.Value],
    seed: int = 0,
    fuel: int = 100_000,
    typing: Optional[TypingResult] = None,
    rand_range: tuple[int, int] = (-128, 127),
) -> LinkReport:
    """Run both interpreters with one seed, checking the safe-link
    relation after every paired step and equality of final values."""
    typing = typing or type_program(prog)
    alloc = cos.Alloc()
    supply = aos.AbsSupply()
    rng_c = random.Random(seed)
    rng_a = random.Random(seed)
    c = cos.initial_config(prog, typing, fname, inputs, alloc)
    a = aos.initial_config(prog, fname, inputs)
    steps: list[LinkStep] = []
    for i in range(fuel + 1):
        point = f"{c.top.fn}:{c.top.label}"
        ok, diags = safe_link(prog, typing, c, a)
        ok2, diags2 = aos.safe_abstract(prog, typing, a)
        steps.append(LinkStep(i, point, ok and ok2, diags + diags2))
        if not (ok and ok2):
            return LinkReport(False, steps, f"link failed at step {i} ({point})")
        rc = cos.step(prog, typing, c, rng_c, alloc, rand_range)
        ra = aos.step(prog, typing, a, rng_a, supply, rand_range)
        if isinstance(rc, cos.Final) or isinstance(ra, aos.Final):
            if not (isinstance(rc, cos.Final) and isinstance(ra, aos.Final)):
                return LinkReport(False, steps, f"one side finished early at step {i}")
            gamma = typing.ctx(c.top.fn, c.top.label).gamma
            vals = cos.safe_readout_frame(c.heap, c.top.frame, gamma)
            (cv,) = vals.values()
            (av,) = a.top.frame.values()
            if cv != av:
                return LinkReport(False, steps, f"final values differ: {V.show(cv)} vs {V.show(av)}")
            return LinkReport(True, steps, final_value=V.show(cv))
        if isinstance(rc, cos.Stuck) or isinstance(ra, aos.Stuck):
            reason = rc.reason if isinstance(rc, cos.Stuck) else ra.reason
            return LinkReport(False, steps, f"stuck at step {i}: {reason}")
        c, a = rc.config, ra.config
    return LinkReport(True, steps, "fuel exhausted with all steps linked")


# -- prophecy interpreter vs resolution -------------------------------------


def resolutive_of(prog: S.Program, typing: TypingResult, acfg: aos.AbsConfig) -> sldc.ResConfig:
    """Render an abstract configuration as a resolutive configuration:
    one atom per frame, prophecy variables as logic variables, fresh
    result variables threading each receiver."""
    sorts: dict[str, L.Sort] = {}

    def record(v: V.PreValue, sort: L.Sort):
        sort = L.whnf_sort(sort)
        if isinstance(v, V.AbsVar):
            sorts[f"a#{v.uid}"] = sort
        elif isinstance(v, V.Box):
            record(v.inner, sort.inner)
        elif isinstance(v, V.MutPair):
            record(v.cur, sort.inner)
            record(v.fin, sort.inner)
        elif isinstance(v, V.Inj):
            record(v.payload, sort.left if v.tag == 0 else sort.right)
        elif isinstance(v, V.Pair):
            record(v.fst, sort.left)
            record(v.snd, sort.right)

    def term_of(v: V.PreValue) -> V.Term:
        return V.map_term(v, lambda leaf: V.Var(f"a#{leaf.uid}") if isinstance(leaf, V.AbsVar) else leaf)

    atoms = []
    for i, entry in enumerate(acfg.stack):
        wc = typing.ctx(entry.fn, entry.label)
        frame: dict[str, V.Term] = dict(entry.frame)
        if i > 0:
            frame[entry.recv] = V.Var(f"r#{i - 1}")
        args = []
        for x in T.label_vars(wc):
            val = frame[x]
            if isinstance(val, V.Var):
                args.append(val)
            else:
                record(val, T.sort_of_type(wc.gamma[x].ty))
                args.append(term_of(val))
            sorts[f"r#{i}"] = T.sort_of_type(prog.fn(entry.fn).ret)
        args.append(V.Var(f"r#{i}"))
        atoms.append(L.Atom(L.pred_name(entry.fn, entry.label), tuple(args)))
    n = len(acfg.stack) - 1
    return sldc.ResConfig(tuple(atoms), V.Var(f"r#{n}"), sorts)


def _match_refines(cand: V.Term, target: V.Term, m: dict[str, V.Term]) -> bool:
    """Candidate term refines to target by substituting candidate vars."""
    if isinstance(cand, V.Var):
        if cand.name in m:
            return m[cand.name] == target
        m[cand.name] = target
        return True
    if isinstance(cand, (int, V.UnitVal)):
        return cand == target
    if type(cand) is not type(target):
        return False
    if isinstance(cand, V.Inj) and cand.tag != target.tag:
        return False
    return all(
        _match_refines(a, b, m) for a, b in zip(V.children(cand), V.children(target))
    )


def _config_refines(cand: sldc.ResConfig, target: sldc.ResConfig) -> bool:
    if len(cand.stack) != len(target.stack):
        return False
    m: dict[str, V.Term] = {}
    for ca, ta in zip(cand.stack, target.stack):
        if ca.pred != ta.pred or len(ca.args) != len(ta.args):
            return False
        if not all(_match_refines(x, y, m) for x, y in zip(ca.args, ta.args)):
            return False
    return _match_refines(cand.result, target.result, m)


def _clauses_for_step(sys_index, clause_tags, fn, label, branch: Optional[int]):
    out = []
    for c in clause_tags.get((fn, label), ()):
        if branch is None or c.tag[3] == branch:
            out.append(c)
    return out


def lockstep_aos_sldc(
    prog: S.Program,
    fname: str,
    inputs: list[V.Value],
    seed: int = 0,
    fuel: int = 100_000,
    typing: Optional[TypingResult] = None,
    rand_range: tuple[int, int] = (-128, 127),
    spec: Optional[L.SampleSpec] = None,
) -> LinkReport:
    """Check that every prophecy-interpreter step corresponds to one
    resolution step using the clause generated from the executed
    statement, ending in an empty-stack configuration whose result
    refines to the returned value."""
    typing = typing or type_program(prog)
    spec = spec or L.SampleSpec(int_lo=rand_range[0], int_hi=rand_range[1])
    sys = T.translate_program(prog, typing)
    clause_tags: dict[tuple[str, str], list] = {}
    for c in sys.clauses:
        clause_tags.setdefault((c.tag[0], c.tag[2]), []).append(c)
    supply = aos.AbsSupply()
    rng = random.Random(seed)
    renamer = sldc.Renamer()
    a = aos.initial_config(prog, fname, inputs)
    k = resolutive_of(prog, typing, a)
    steps: list[LinkStep] = []
    for i in range(fuel + 1):
        top = a.top
        point = f"{top.fn}:{top.label}"
        stmt = prog.fn(top.fn).body[top.label]
        ra = aos.step(prog, typing, a, rng, supply, rand_range)
        if isinstance(ra, aos.Final):
            clauses = _clauses_for_step(None, clause_tags, top.fn, top.label, None)
            cands = sldc.step(sys, k, renamer, spec, clauses=clauses)
            (value,) = a.top.frame.values()
            done = [c for c in cands if c.done and L.refines_to(c.result, value)]
            ok = bool(done)
            steps.append(LinkStep(i, point, ok, [] if ok else ["no final resolution matches"]))
            return LinkReport(ok, steps,
                              "" if ok else f"final step diverged at {point}",
                              final_value=V.show(value))
        if isinstance(ra, aos.Stuck):
            return LinkReport(False, steps, f"interpreter stuck at step {i}: {ra.reason}")
        a2 = ra.config
        branch = None
        if isinstance(stmt, S.StmtMatch):
            branch = 0 if a2.top.label == stmt.l0 else 1
        clauses = _clauses_for_step(None, clause_tags, top.fn, top.label, branch)
        cands = sldc.step(sys, k, renamer, spec, clauses=clauses)
        target = resolutive_of(prog, typing, a2)
        ok = any(_config_refines(c, target) for c in cands if not c.done)
        steps.append(
            LinkStep(i, point, ok, [] if ok else [f"{len(cands)} candidates, none refines to the target"])
        )
        if not ok:
            return LinkReport(False, steps, f"diverged at step {i} ({point})")
        a, k = a2, target
        if i == fuel:
            break
    return LinkReport(True, steps, "fuel exhausted with all steps linked")


# ---------------------------------------------------------------------------
# Differential oracle
# ---------------------------------------------------------------------------


@dataclass
class OracleReport:
    checked: int
    returned: int
    misses: list[dict]
    budget_flags: int = 0

    @property
    def ok(self) -> bool:
        return not self.misses

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "returned": self.returned,
            "misses": self.misses,
            "budget_flags": self.budget_flags,
            "ok": self.ok,
        }


def oracle_diff(
    prog: S.Program,
    fname: str,
    input_tuples: Iterable[tuple[V.Value, ...]],
    seeds: Iterable[int] = (0, 1, 2, 3, 4),
    depth: int = 64,
    width: int = 4000,
    fuel: int = 20_000,
    typing: Optional[TypingResult] = None,
    rand_range: tuple[int, int] = (-8, 8),
    spec: Optional[L.SampleSpec] = None,
) -> OracleReport:
    """For every sampled input tuple and seed: if the heap interpreter
    returns a value, some resolution result pattern must refine to it."""
    typing = typing or type_program(prog)
    spec = spec or L.SampleSpec(int_lo=rand_range[0], int_hi=rand_range[1])
    sys = T.translate_program(prog, typing)
    pred = L.pred_name(fname, S.ENTRY)
    seeds = list(seeds)
    checked = returned = flags = 0
    misses: list[dict] = []
    for tup in input_tuples:
        checked += 1
        values = set()
        for seed in seeds:
            out = cos.run(prog, fname, list(tup), seed=seed, fuel=fuel,
                          typing=typing, rand_range=rand_range, keep_trace=False)
            if out.status == "returned":
                values.add(out.value)
        if not values:
            continue
        returned += 1
        enum = sldc.enumerate_results(sys, pred, tuple(tup), depth=depth, width=width, spec=spec)
        if enum.budget_exceeded:
            flags += 1
        for w in values:
            if not sldc.covers_value(enum, w):
                misses.append(
                    {
                        "inputs": [V.show(v) for v in tup],
                        "value": V.show(w),
                        "patterns": [V.show(p) for p, _ in enum.patterns],
                    }
                )
    return OracleReport(checked, returned, misses, flags)

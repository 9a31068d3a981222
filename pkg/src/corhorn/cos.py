"""Concrete operational semantics: a heap-and-stack interpreter.

A configuration is a stack of frames (each mapping variables to
addresses, with the program point and, below the top, the variable that
will receive the callee's result) together with an integer heap.  Steps
follow one rule per statement form; allocation uses a monotone bump
cursor so freed addresses are never reused and traces are deterministic
for a fixed seed.

The readout judgments reconstruct typed values from the heap together
with the multiset of addresses touched (the memory footprint); a
duplicate address in a frame's combined footprint is an ownership
violation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Union

from . import syntax as S
from . import values as V
from .typeck import TypingResult, type_program


class ReadoutError(S.CorError):
    def __init__(self, code: str, msg: str):
        super().__init__(f"[{code}] {msg}")
        self.code = code


class RunError(S.CorError):
    def __init__(self, code: str, msg: str):
        super().__init__(f"[{code}] {msg}")
        self.code = code


class Alloc:
    """Fresh-address supply.  Never reuses an address, so address
    comparisons in goldens are stable."""

    def __init__(self, start: int = 100):
        self.cursor = start

    def fresh(self, ncells: int) -> int:
        base = self.cursor
        self.cursor += max(ncells, 1)
        return base


@dataclass(frozen=True)
class FrameEntry:
    fn: str
    label: str
    recv: Optional[str]  # receiver variable; None for the top frame
    frame: dict[str, int] = field(hash=False)


@dataclass(frozen=True)
class CosConfig:
    stack: tuple[FrameEntry, ...]  # index 0 is the top frame
    heap: dict[int, int] = field(hash=False)

    @property
    def top(self) -> FrameEntry:
        return self.stack[0]

    def to_json(self) -> dict:
        return {
            "stack": [
                {"fn": e.fn, "label": e.label, "recv": e.recv, "frame": dict(sorted(e.frame.items()))}
                for e in self.stack
            ],
            "heap": [[a, v] for a, v in sorted(self.heap.items())],
        }


@dataclass(frozen=True)
class Next:
    config: CosConfig


@dataclass(frozen=True)
class Final:
    pass


@dataclass(frozen=True)
class Stuck:
    reason: str


StepResult = Union[Next, Final, Stuck]


# ---------------------------------------------------------------------------
# Readout and write
# ---------------------------------------------------------------------------


def readout(heap: dict[int, int], addr: int, t: S.Type) -> tuple[V.Value, list[int]]:
    """Read the data of type t at addr; returns the value and the
    footprint (multiset of addresses, as a list)."""
    t = S.whnf_type(t)
    if isinstance(t, S.IntT):
        if addr not in heap:
            raise ReadoutError("MissingCell", f"no cell at {addr}")
        return heap[addr], [addr]
    if isinstance(t, S.UnitT):
        return V.UNIT, []
    if isinstance(t, S.Ptr):
        if t.kind != S.OWN:
            raise ReadoutError("ReferenceInReadout", "cannot read references at a simple boundary")
        if addr not in heap:
            raise ReadoutError("MissingCell", f"no cell at {addr}")
        inner, m = readout(heap, heap[addr], t.target)
        return V.Box(inner), m + [addr]
    if isinstance(t, S.Sum):
        if addr not in heap:
            raise ReadoutError("MissingCell", f"no cell at {addr}")
        tag = heap[addr]
        if tag not in (0, 1):
            raise ReadoutError("BadTag", f"sum tag at {addr} is {tag}")
        side = t.left if tag == 0 else t.right
        other = t.right if tag == 0 else t.left
        pad = max(S.size_of(other) - S.size_of(side), 0)
        pad_cells = [addr + 1 + S.size_of(side) + k for k in range(pad)]
        for c in pad_cells:
            if c not in heap:
                raise ReadoutError("MissingCell", f"no padding cell at {c}")
            if heap[c] != 0:
                raise ReadoutError("NonzeroPadding", f"padding cell {c} holds {heap[c]}")
        payload, m = readout(heap, addr + 1, side)
        return V.Inj(tag, payload), [addr] + pad_cells + m
    if isinstance(t, S.Prod):
        v0, m0 = readout(heap, addr, t.left)
        v1, m1 = readout(heap, addr + S.size_of(t.left), t.right)
        return V.Pair(v0, v1), m0 + m1
    raise ReadoutError("IncompleteType", f"cannot read out at type {t}")


def value_matches(v: V.Value, t: S.Type) -> bool:
    """Does value v inhabit the sort of type t?"""
    t = S.whnf_type(t)
    if isinstance(t, S.IntT):
        return isinstance(v, int) and not isinstance(v, bool)
    if isinstance(t, S.UnitT):
        return isinstance(v, V.UnitVal)
    if isinstance(t, S.Ptr):
        if t.kind == S.MUT:
            return isinstance(v, V.MutPair) and value_matches(v.cur, t.target) and value_matches(v.fin, t.target)
        return isinstance(v, V.Box) and value_matches(v.inner, t.target)
    if isinstance(t, S.Sum):
        return isinstance(v, V.Inj) and value_matches(v.payload, t.left if v.tag == 0 else t.right)
    if isinstance(t, S.Prod):
        return isinstance(v, V.Pair) and value_matches(v.fst, t.left) and value_matches(v.snd, t.right)
    return False


def write_value(heap: dict[int, int], t: S.Type, v: V.Value, alloc: Alloc) -> int:
    """Store v (of the sort of t) into fresh cells; inverse of readout."""
    if not value_matches(v, t):
        raise RunError("SortMismatch", f"value {V.show(v)} does not have sort of {t}")
    base = alloc.fresh(S.size_of(t))
    _fill(heap, base, t, v, alloc)
    return base


def _fill(heap: dict[int, int], base: int, t: S.Type, v: V.Value, alloc: Alloc) -> None:
    t = S.whnf_type(t)
    if isinstance(t, S.IntT):
        heap[base] = v
    elif isinstance(t, S.UnitT):
        pass
    elif isinstance(t, S.Ptr):
        if t.kind != S.OWN:
            raise RunError("SortMismatch", "cannot write references at a simple boundary")
        heap[base] = write_value(heap, t.target, v.inner, alloc)
    elif isinstance(t, S.Sum):
        side = t.left if v.tag == 0 else t.right
        other = t.right if v.tag == 0 else t.left
        heap[base] = v.tag
        _fill(heap, base + 1, side, v.payload, alloc)
        for k in range(max(S.size_of(other) - S.size_of(side), 0)):
            heap[base + 1 + S.size_of(side) + k] = 0
    elif isinstance(t, S.Prod):
        _fill(heap, base, t.left, v.fst, alloc)
        _fill(heap, base + S.size_of(t.left), t.right, v.snd, alloc)
    else:
        raise RunError("SortMismatch", f"cannot write at type {t}")


def safe_readout_frame(
    heap: dict[int, int], frame: dict[str, int], gamma: dict
) -> dict[str, V.Value]:
    """Read every (owning) variable of a frame and insist the combined
    footprint has no duplicate address."""
    if set(frame) != set(gamma):
        raise ReadoutError("FrameMismatch", "frame and context domains differ")
    out: dict[str, V.Value] = {}
    combined: list[int] = []
    for x in sorted(frame):
        vi = gamma[x]
        if not vi.active or not (isinstance(vi.ty, S.Ptr) and vi.ty.kind == S.OWN):
            raise ReadoutError("NotOwnBoundary", f"variable {x!r} is not an active owner")
        v, m = readout(heap, frame[x], vi.ty.target)
        out[x] = V.Box(v)
        combined.extend(m)
    seen: set[int] = set()
    for a in combined:
        if a in seen:
            raise ReadoutError("DuplicateFootprint", f"address {a} owned twice")
        seen.add(a)
    return out


# ---------------------------------------------------------------------------
# Small-step transition
# ---------------------------------------------------------------------------


def _block(heap: dict[int, int], base: int, n: int, reason: str) -> list[int]:
    vals = []
    for k in range(n):
        if base + k not in heap:
            raise _StuckSignal(f"{reason}: missing cell {base + k}")
        vals.append(heap[base + k])
    return vals


class _StuckSignal(Exception):
    pass


def is_final(prog: S.Program, cfg: CosConfig) -> bool:
    top = cfg.top
    return len(cfg.stack) == 1 and isinstance(prog.fn(top.fn).body[top.label], S.StmtReturn)


def step(
    prog: S.Program,
    typing: TypingResult,
    cfg: CosConfig,
    rng: random.Random,
    alloc: Alloc,
    rand_range: tuple[int, int] = (-128, 127),
) -> StepResult:
    try:
        return _step(prog, typing, cfg, rng, alloc, rand_range)
    except _StuckSignal as e:
        return Stuck(str(e))


def _step(prog, typing, cfg, rng, alloc, rand_range) -> StepResult:
    top = cfg.top
    f, label = top.fn, top.label
    fn = prog.fn(f)
    stmt = fn.body[label]
    heap = dict(cfg.heap)
    frame = dict(top.frame)

    def ty(x: str) -> S.Type:
        return typing.ty(f, label, x)

    def retop(new_label: str) -> CosConfig:
        entry = FrameEntry(f, new_label, top.recv, frame)
        return CosConfig((entry,) + cfg.stack[1:], heap)

    if isinstance(stmt, S.StmtReturn):
        if len(cfg.stack) == 1:
            return Final()
        if len(frame) != 1:
            raise _StuckSignal("return with extra variables in frame")
        (addr,) = frame.values()
        caller = cfg.stack[1]
        cframe = dict(caller.frame)
        cframe[caller.recv] = addr
        entry = FrameEntry(caller.fn, caller.label, None, cframe)
        return Next(CosConfig((entry,) + cfg.stack[2:], heap))

    if isinstance(stmt, S.StmtMatch):
        t = ty(stmt.x)
        a = frame.pop(stmt.x)
        sum_t = S.whnf_type(t.target)
        if t.kind == S.OWN:
            if a not in heap:
                raise _StuckSignal(f"match: missing tag cell {a}")
            i = heap.pop(a)
            if i not in (0, 1):
                raise _StuckSignal(f"match: bad tag {i}")
            side = sum_t.left if i == 0 else sum_t.right
            other = sum_t.right if i == 0 else sum_t.left
            pad = max(S.size_of(other) - S.size_of(side), 0)
            for k in range(pad):
                c = a + 1 + S.size_of(side) + k
                if c not in heap:
                    raise _StuckSignal(f"match: missing padding cell {c}")
                del heap[c]
            binder, target = (stmt.y0, stmt.l0) if i == 0 else (stmt.y1, stmt.l1)
            frame[binder] = a + 1
            entry = FrameEntry(f, target, top.recv, frame)
            return Next(CosConfig((entry,) + cfg.stack[1:], heap))
        else:
            if a not in heap:
                raise _StuckSignal(f"match: missing tag cell {a}")
            i = heap[a]
            if i not in (0, 1):
                raise _StuckSignal(f"match: bad tag {i}")
            binder, target = (stmt.y0, stmt.l0) if i == 0 else (stmt.y1, stmt.l1)
            frame[binder] = a + 1
            entry = FrameEntry(f, target, top.recv, frame)
            return Next(CosConfig((entry,) + cfg.stack[1:], heap))

    instr = stmt.instr
    goto = stmt.goto

    if isinstance(instr, S.MutBor):
        frame[instr.y] = frame[instr.x]
        return Next(retop(goto))

    if isinstance(instr, S.Drop):
        t = ty(instr.x)
        a = frame.pop(instr.x)
        if t.kind == S.OWN:
            n = S.size_of(t.target)
            _block(heap, a, n, "drop")
            for k in range(n):
                del heap[a + k]
        return Next(retop(goto))

    if isinstance(instr, (S.Immut, S.TypeWeaken, S.IntroLft, S.NowLft, S.LftLeq)):
        return Next(retop(goto))

    if isinstance(instr, S.Swap):
        t = ty(instr.x)
        n = S.size_of(t.target)
        a, b = frame[instr.x], frame[instr.y]
        ma = _block(heap, a, n, "swap")
        mb = _block(heap, b, n, "swap")
        for k in range(n):
            heap[a + k] = mb[k]
            heap[b + k] = ma[k]
        return Next(retop(goto))

    if isinstance(instr, S.MakePtr):
        a_inner = frame.pop(instr.x)
        a = alloc.fresh(1)
        heap[a] = a_inner
        frame[instr.y] = a
        return Next(retop(goto))

    if isinstance(instr, S.Deref):
        t = ty(instr.x)
        a = frame.pop(instr.x)
        if a not in heap:
            raise _StuckSignal(f"deref: missing cell {a}")
        a2 = heap[a]
        if t.kind == S.OWN:
            del heap[a]  # the consumed box's own cell is freed here
        frame[instr.y] = a2
        return Next(retop(goto))

    if isinstance(instr, S.CopyDeref):
        t = ty(instr.x)
        n = S.size_of(t.target)
        src = frame[instr.x]
        vals = _block(heap, src, n, "copy")
        b = alloc.fresh(n)
        for k in range(n):
            heap[b + k] = vals[k]
        frame[instr.y] = b
        return Next(retop(goto))

    if isinstance(instr, S.Call):
        g = prog.fn(instr.fn)
        callee = {px: frame.pop(x) for x, (px, _) in zip(instr.args, g.params)}
        caller_entry = FrameEntry(f, goto, instr.y, frame)
        top_entry = FrameEntry(instr.fn, S.ENTRY, None, callee)
        return Next(CosConfig((top_entry, caller_entry) + cfg.stack[1:], heap))

    if isinstance(instr, S.ConstInstr):
        if isinstance(instr.value, int):
            a = alloc.fresh(1)
            heap[a] = instr.value
        else:
            a = alloc.fresh(0)
        frame[instr.y] = a
        return Next(retop(goto))

    if isinstance(instr, S.BinOpInstr):
        a, a2 = frame[instr.x], frame[instr.x2]
        if a not in heap or a2 not in heap:
            raise _StuckSignal("binop: missing operand cell")
        res = S.eval_op(instr.op, heap[a], heap[a2])
        b = alloc.fresh(1)
        heap[b] = int(res)  # booleans encoded 1/0
        frame[instr.y] = b
        return Next(retop(goto))

    if isinstance(instr, S.RandInstr):
        n = rng.randint(*rand_range)
        a = alloc.fresh(1)
        heap[a] = n
        frame[instr.y] = a
        return Next(retop(goto))

    if isinstance(instr, S.InjInstr):
        side = instr.sum_type.left if instr.index == 0 else instr.sum_type.right
        other = instr.sum_type.right if instr.index == 0 else instr.sum_type.left
        npay = S.size_of(side)
        a = frame.pop(instr.x)
        vals = _block(heap, a, npay, "inj")
        for k in range(npay):
            del heap[a + k]
        b = alloc.fresh(S.size_of(instr.sum_type))
        heap[b] = instr.index
        for k in range(npay):
            heap[b + 1 + k] = vals[k]
        for k in range(max(S.size_of(other) - npay, 0)):
            heap[b + 1 + npay + k] = 0
        frame[instr.y] = b
        return Next(retop(goto))

    if isinstance(instr, S.MakePair):
        t0 = ty(instr.x0).target
        t1 = ty(instr.x1).target
        n0, n1 = S.size_of(t0), S.size_of(t1)
        a0 = frame.pop(instr.x0)
        a1 = frame.pop(instr.x1)
        v0 = _block(heap, a0, n0, "pair")
        v1 = _block(heap, a1, n1, "pair")
        for k in range(n0):
            del heap[a0 + k]
        for k in range(n1):
            del heap[a1 + k]
        b = alloc.fresh(n0 + n1)
        for k in range(n0):
            heap[b + k] = v0[k]
        for k in range(n1):
            heap[b + n0 + k] = v1[k]
        frame[instr.y] = b
        return Next(retop(goto))

    if isinstance(instr, S.DestructPair):
        t = ty(instr.x)
        prod = S.whnf_type(t.target)
        a = frame.pop(instr.x)
        frame[instr.y0] = a
        frame[instr.y1] = a + S.size_of(prod.left)
        return Next(retop(goto))

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
    trace: list[CosConfig] = field(default_factory=list)
    leaked: tuple[int, ...] = ()


def initial_config(
    prog: S.Program, typing: TypingResult, fname: str, inputs: list[V.Value], alloc: Alloc
) -> CosConfig:
    fn = prog.fn(fname)
    if not fn.is_simple():
        raise RunError("NotSimpleFunction", f"{fname} takes lifetime parameters")
    if len(inputs) != len(fn.params):
        raise RunError("SortMismatch", f"{fname} expects {len(fn.params)} arguments")
    heap: dict[int, int] = {}
    frame: dict[str, int] = {}
    for v, (x, t) in zip(inputs, fn.params):
        if not isinstance(v, V.Box) or not value_matches(v, t):
            raise RunError("SortMismatch", f"argument {x!r}: {V.show(v)} does not fit {t}")
        frame[x] = write_value(heap, t.target, v.inner, alloc)
    return CosConfig((FrameEntry(fname, S.ENTRY, None, frame),), heap)


def run(
    prog: S.Program,
    fname: str,
    inputs: list[V.Value],
    seed: int = 0,
    fuel: int = 100_000,
    typing: Optional[TypingResult] = None,
    rand_range: tuple[int, int] = (-128, 127),
    keep_trace: bool = True,
) -> RunOutcome:
    """Execute a simple function on given boxed inputs and read the
    result back out of the final heap."""
    typing = typing or type_program(prog)
    alloc = Alloc()
    rng = random.Random(seed)
    cfg = initial_config(prog, typing, fname, inputs, alloc)
    trace = [cfg] if keep_trace else []
    steps = 0
    while True:
        res = step(prog, typing, cfg, rng, alloc, rand_range)
        if isinstance(res, Final):
            top = cfg.top
            gamma = typing.ctx(top.fn, top.label).gamma
            vals = safe_readout_frame(cfg.heap, top.frame, gamma)
            (value,) = vals.values()
            stmt = prog.fn(top.fn).body[top.label]
            _, m = readout(cfg.heap, top.frame[stmt.x], gamma[stmt.x].ty.target)
            leaked = tuple(sorted(set(cfg.heap) - set(m)))
            return RunOutcome("returned", value=value, steps=steps, trace=trace, leaked=leaked)
        if isinstance(res, Stuck):
            return RunOutcome("stuck", reason=res.reason, steps=steps, trace=trace)
        if steps >= fuel:
            return RunOutcome("out_of_fuel", steps=steps, trace=trace)
        cfg = res.config
        steps += 1
        if keep_trace:
            trace.append(cfg)

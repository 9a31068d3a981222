"""Top-down resolution with a calculation phase (SLDC resolution).

A resolutive configuration is a stack of elementary formulas (predicate
applications whose arguments are patterns) plus a result pattern.  One
step unifies the first stack entry with a freshly renamed clause head,
replaces it by the clause's body atoms, and then "calculates": reduces
redexes like *box(t) or 3 + 4, conservatively expands variables blocked
under a projection into constructor skeletons of fresh variables, and
branches over a bounded integer range when arithmetic is stuck on a
symbolic operand (the engine's documented incompleteness boundary).

Variables that survive to a result pattern are don't-care markers;
`refines_to`/`refine_default` from the logic module instantiate them.

A naive bottom-up fixpoint over bounded ground facts doubles as an
independent oracle for the least model on small systems.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import logic as L
from . import syntax as S
from . import values as V
from .logic import Atom, CHCSystem, Clause, SampleSpec, Sort


class Renamer:
    def __init__(self):
        self.n = 0

    def fresh(self, base: str) -> str:
        self.n += 1
        return f"{base}!{self.n}"


@dataclass(frozen=True)
class ResConfig:
    stack: tuple[Atom, ...]
    result: V.Term
    sorts: dict[str, Sort] = field(hash=False, default_factory=dict)

    @property
    def done(self) -> bool:
        return not self.stack


def canon_config(cfg: ResConfig) -> tuple:
    """Rename variables in first-occurrence order; the result is hashable
    and identifies configurations up to renaming."""
    mapping: dict[str, str] = {}

    def walk(t: V.Term) -> V.Term:
        if isinstance(t, V.Var):
            if t.name not in mapping:
                mapping[t.name] = f"v{len(mapping)}"
            return V.Var(mapping[t.name])
        kids = V.children(t)
        return V.rebuild(t, tuple(walk(k) for k in kids)) if kids else t

    atoms = tuple((a.pred, tuple(V.show(walk(x)) for x in a.args)) for a in cfg.stack)
    return (atoms, V.show(walk(cfg.result)))


# ---------------------------------------------------------------------------
# Calculation
# ---------------------------------------------------------------------------


def simplify(t: V.Term) -> V.Term:
    kids = V.children(t)
    if kids:
        t = V.rebuild(t, tuple(simplify(k) for k in kids))
    if isinstance(t, V.DerefT):
        if isinstance(t.arg, V.Box):
            return t.arg.inner
        if isinstance(t.arg, V.MutPair):
            return t.arg.cur
    if isinstance(t, V.FinalT) and isinstance(t.arg, V.MutPair):
        return t.arg.fin
    if isinstance(t, V.ProjT) and isinstance(t.arg, V.Pair):
        return t.arg.fst if t.index == 0 else t.arg.snd
    if isinstance(t, V.BinOpT) and isinstance(t.left, int) and isinstance(t.right, int):
        res = S.eval_op(t.op, t.left, t.right)
        if isinstance(res, bool):
            return V.TRUE if res else V.FALSE
        return res
    return t


def _find_stuck(t: V.Term) -> Optional[tuple[str, str]]:
    for k in V.children(t):
        r = _find_stuck(k)
        if r is not None:
            return r
    if isinstance(t, V.DerefT) and isinstance(t.arg, V.Var):
        return ("deref", t.arg.name)
    if isinstance(t, V.FinalT) and isinstance(t.arg, V.Var):
        return ("final", t.arg.name)
    if isinstance(t, V.ProjT) and isinstance(t.arg, V.Var):
        return ("proj", t.arg.name)
    if isinstance(t, V.BinOpT):
        if isinstance(t.left, V.Var):
            return ("int", t.left.name)
        if isinstance(t.right, V.Var):
            return ("int", t.right.name)
    return None


class CalculateError(S.CorError):
    pass


def _expand_var(name: str, kind: str, sorts: dict[str, Sort], renamer: Renamer):
    """Constructor skeleton of fresh variables for a projected variable."""
    sort = L.whnf_sort(sorts[name])
    if kind in ("deref",):
        if isinstance(sort, L.BoxS):
            v = renamer.fresh(name + "!c")
            return V.Box(V.Var(v)), {v: sort.inner}
        if isinstance(sort, L.MutS):
            c, p = renamer.fresh(name + "!c"), renamer.fresh(name + "!p")
            return V.MutPair(V.Var(c), V.Var(p)), {c: sort.inner, p: sort.inner}
        raise CalculateError(f"* applied to variable of sort {L.render_sort(sort)}")
    if kind == "final":
        if isinstance(sort, L.MutS):
            c, p = renamer.fresh(name + "!c"), renamer.fresh(name + "!p")
            return V.MutPair(V.Var(c), V.Var(p)), {c: sort.inner, p: sort.inner}
        raise CalculateError(f"^ applied to variable of sort {L.render_sort(sort)}")
    if kind == "proj":
        if isinstance(sort, L.ProdS):
            a, b = renamer.fresh(name + "!0"), renamer.fresh(name + "!1")
            return V.Pair(V.Var(a), V.Var(b)), {a: sort.left, b: sort.right}
        raise CalculateError(f"projection of variable of sort {L.render_sort(sort)}")
    raise CalculateError(kind)


def calculate(
    stack: tuple[Atom, ...], result: V.Term, sorts: dict[str, Sort],
    renamer: Renamer, spec: SampleSpec,
) -> list[ResConfig]:
    """Normalize a pre-resolutive configuration until every stack atom
    argument is a pattern.  May branch on stuck arithmetic."""
    out: list[ResConfig] = []
    work = [(stack, result, sorts)]
    while work:
        stk, res, srt = work.pop()
        stk = tuple(Atom(a.pred, tuple(simplify(x) for x in a.args)) for a in stk)
        res = simplify(res)
        stuck = None
        for a in stk:
            for x in a.args:
                if not V.is_pattern(x):
                    stuck = _find_stuck(x)
                    if stuck is None:
                        raise CalculateError(f"cannot normalize term {V.show(x)}")
                    break
            if stuck:
                break
        if stuck is None:
            out.append(ResConfig(stk, res, srt))
            continue
        kind, name = stuck
        if kind == "int":
            for n in range(spec.int_lo, spec.int_hi + 1):
                mapping = {name: n}
                work.append(
                    (
                        tuple(Atom(a.pred, tuple(V.subst_vars(x, mapping) for x in a.args)) for a in stk),
                        V.subst_vars(res, mapping),
                        srt,
                    )
                )
        else:
            skel, fresh_sorts = _expand_var(name, kind, srt, renamer)
            mapping = {name: skel}
            new_sorts = dict(srt)
            new_sorts.update(fresh_sorts)
            work.append(
                (
                    tuple(Atom(a.pred, tuple(V.subst_vars(x, mapping) for x in a.args)) for a in stk),
                    V.subst_vars(res, mapping),
                    new_sorts,
                )
            )
    return out


# ---------------------------------------------------------------------------
# Resolution steps
# ---------------------------------------------------------------------------


def rename_clause(clause: Clause, renamer: Renamer) -> tuple[Clause, dict[str, Sort]]:
    mapping = {x: V.Var(renamer.fresh(x)) for x, _ in clause.binders}
    sorts = {mapping[x].name: s for x, s in clause.binders}

    def sub(atom: Atom) -> Atom:
        return Atom(atom.pred, tuple(V.subst_vars(a, mapping) for a in atom.args))

    head = sub(clause.head) if clause.head is not None else None
    return Clause(tuple((mapping[x].name, s) for x, s in clause.binders), head,
                  tuple(sub(a) for a in clause.body), clause.tag), sorts


def step(
    sys: CHCSystem,
    cfg: ResConfig,
    renamer: Renamer,
    spec: SampleSpec,
    index: Optional[dict[str, list[Clause]]] = None,
    clauses: Optional[Iterable[Clause]] = None,
) -> list[ResConfig]:
    """All successors of one resolution step.  `clauses` restricts the
    candidates (used by the lockstep harness)."""
    if not cfg.stack:
        return []
    first = cfg.stack[0]
    if clauses is None:
        index = index if index is not None else sys.by_pred()
        clauses = index.get(first.pred, [])
    out: list[ResConfig] = []
    for clause in clauses:
        rc, csorts = rename_clause(clause, renamer)
        mgu = L.unify(first.args, rc.head.args)
        if mgu is None:
            continue
        theta, theta_p = mgu
        merged = {**theta, **theta_p}
        new_stack = tuple(
            Atom(a.pred, tuple(V.subst_vars(x, merged) for x in a.args)) for a in rc.body
        ) + tuple(
            Atom(a.pred, tuple(V.subst_vars(x, merged) for x in a.args)) for a in cfg.stack[1:]
        )
        new_result = V.subst_vars(cfg.result, merged)
        sorts = dict(cfg.sorts)
        sorts.update(csorts)
        out.extend(calculate(new_stack, new_result, sorts, renamer, spec))
    return out


@dataclass
class EnumOutcome:
    patterns: list[tuple[V.Term, dict[str, Sort]]]
    budget_exceeded: bool
    steps: int = 0


def enumerate_results(
    sys: CHCSystem,
    pred: str,
    inputs: tuple[V.Value, ...],
    depth: int = 64,
    width: int = 4000,
    spec: Optional[SampleSpec] = None,
) -> EnumOutcome:
    """All result patterns derivable for pred(inputs..., r) within the
    depth/width budget.  Deduplicates configurations up to variable
    renaming, which keeps the stuck-arithmetic branching in check."""
    spec = spec or SampleSpec()
    if pred not in sys.sigs:
        raise L.IllSorted(f"unknown predicate {pred}")
    sig = sys.sigs[pred]
    if len(inputs) + 1 != len(sig):
        raise L.IllSorted(f"{pred} expects {len(sig) - 1} inputs")
    for v, s in zip(inputs, sig):
        if not L.check_value(v, s):
            raise L.IllSorted(f"input {V.show(v)} does not have sort {L.render_sort(s)}")
    renamer = Renamer()
    index = sys.by_pred()
    r = renamer.fresh("r")
    init = ResConfig((Atom(pred, tuple(inputs) + (V.Var(r),)),), V.Var(r), {r: sig[-1]})
    seen = {canon_config(init)}
    frontier = [init]
    results: dict[tuple, tuple[V.Term, dict[str, Sort]]] = {}
    flag = False
    steps = 0
    for _ in range(depth):
        if not frontier:
            break
        new: list[ResConfig] = []
        for cfg in frontier:
            for nxt in step(sys, cfg, renamer, spec, index=index):
                steps += 1
                key = canon_config(nxt)
                if key in seen:
                    continue  # identical configurations derive identical results
                seen.add(key)
                if nxt.done:
                    results[key] = (nxt.result, nxt.sorts)
                else:
                    new.append(nxt)
        if len(new) > width:
            flag = True
            new = new[:width]
        frontier = new
    if frontier:
        flag = True
    return EnumOutcome(list(results.values()), flag, steps)


def covers_value(outcome: EnumOutcome, w: V.Value) -> bool:
    return any(L.refines_to(p, w) for p, _ in outcome.patterns)


# ---------------------------------------------------------------------------
# Bottom-up fixpoint oracle
# ---------------------------------------------------------------------------


class OracleBudget(S.CorError):
    pass


def _solve_arg(term, value, delta, binding, pending, checks):
    """Match a body-atom argument term against a ground fact value,
    extending `binding`.  Component constraints on mut/pair variables go
    to `pending`; non-invertible subterms go to `checks`."""
    if isinstance(term, V.Var):
        if term.name in binding:
            return binding[term.name] == value
        binding[term.name] = value
        return True
    if isinstance(term, (int, V.UnitVal)):
        return term == value
    if isinstance(term, V.Inj):
        return (
            isinstance(value, V.Inj)
            and term.tag == value.tag
            and _solve_arg(term.payload, value.payload, delta, binding, pending, checks)
        )
    if isinstance(term, V.Box):
        return isinstance(value, V.Box) and _solve_arg(term.inner, value.inner, delta, binding, pending, checks)
    if isinstance(term, V.MutPair):
        return (
            isinstance(value, V.MutPair)
            and _solve_arg(term.cur, value.cur, delta, binding, pending, checks)
            and _solve_arg(term.fin, value.fin, delta, binding, pending, checks)
        )
    if isinstance(term, V.Pair):
        return (
            isinstance(value, V.Pair)
            and _solve_arg(term.fst, value.fst, delta, binding, pending, checks)
            and _solve_arg(term.snd, value.snd, delta, binding, pending, checks)
        )
    if isinstance(term, V.DerefT):
        inner = L.whnf_sort(L.sort_of_term(delta, term.arg))
        if isinstance(inner, L.BoxS):
            return _solve_arg(term.arg, V.Box(value), delta, binding, pending, checks)
        if isinstance(inner, L.MutS) and isinstance(term.arg, V.Var):
            slot = pending.setdefault(term.arg.name, {})
            if "cur" in slot and slot["cur"] != value:
                return False
            slot["cur"] = value
            return True
        checks.append((term, value))
        return True
    if isinstance(term, V.FinalT):
        if isinstance(term.arg, V.Var):
            slot = pending.setdefault(term.arg.name, {})
            if "fin" in slot and slot["fin"] != value:
                return False
            slot["fin"] = value
            return True
        checks.append((term, value))
        return True
    if isinstance(term, V.ProjT):
        if isinstance(term.arg, V.Var):
            slot = pending.setdefault(term.arg.name, {})
            key = ("proj", term.index)
            if key in slot and slot[key] != value:
                return False
            slot[key] = value
            return True
        checks.append((term, value))
        return True
    if isinstance(term, V.BinOpT):
        checks.append((term, value))
        return True
    raise L.Undefined(f"cannot match term {V.show(term)}")


def _merge_pending(delta, binding, pending, spec, enum_cap):
    """Resolve component constraints: fully determined variables get
    bound; partially determined ones contribute bounded enumerations."""
    options: list[tuple[str, list]] = []
    for name, slot in pending.items():
        sort = L.whnf_sort(delta[name])
        if name in binding:
            val = binding[name]
            for key, want in slot.items():
                if key == "cur" and (not isinstance(val, V.MutPair) or val.cur != want):
                    return None
                if key == "fin" and (not isinstance(val, V.MutPair) or val.fin != want):
                    return None
                if isinstance(key, tuple) and key[0] == "proj":
                    got = val.fst if key[1] == 0 else val.snd
                    if not isinstance(val, V.Pair) or got != want:
                        return None
            continue
        if isinstance(sort, L.MutS):
            cur, fin = slot.get("cur"), slot.get("fin")
            if cur is not None and fin is not None:
                binding[name] = V.MutPair(cur, fin)
            else:
                dom = L.enumerate_values(sort.inner, spec)
                if cur is not None:
                    options.append((name, [V.MutPair(cur, o) for o in dom]))
                else:
                    options.append((name, [V.MutPair(o, fin) for o in dom]))
        elif isinstance(sort, L.ProdS):
            a, b = slot.get(("proj", 0)), slot.get(("proj", 1))
            if a is not None and b is not None:
                binding[name] = V.Pair(a, b)
            elif a is not None:
                options.append((name, [V.Pair(a, o) for o in L.enumerate_values(sort.right, spec)]))
            else:
                options.append((name, [V.Pair(o, b) for o in L.enumerate_values(sort.left, spec)]))
        else:
            return None
    return options


def _body_valuations(sys, clause, facts, spec, enum_cap):
    delta = dict(clause.binders)
    states = [({}, {}, [])]  # (binding, pending, checks)
    for atom in clause.body:
        new_states = []
        for binding, pending, checks in states:
            for fact in facts.get(atom.pred, ()):
                b2 = dict(binding)
                p2 = {k: dict(v) for k, v in pending.items()}
                c2 = list(checks)
                ok = True
                for term, value in zip(atom.args, fact):
                    if not _solve_arg(term, value, delta, b2, p2, c2):
                        ok = False
                        break
                if ok:
                    new_states.append((b2, p2, c2))
        states = new_states
        if not states:
            return
    head_vars = set()
    if clause.head is not None:
        for a in clause.head.args:
            head_vars |= V.vars_in(a)
    for binding, pending, checks in states:
        options = _merge_pending(delta, binding, pending, spec, enum_cap)
        if options is None:
            continue
        check_vars = set()
        for term, _ in checks:
            check_vars |= V.vars_in(term)
        needed = (head_vars | check_vars) - set(binding) - {n for n, _ in options}
        for name in sorted(needed):
            options.append((name, L.enumerate_values(delta[name], spec)))
        total = 1
        for _, dom in options:
            total *= max(len(dom), 1)
            if total > enum_cap:
                raise OracleBudget(
                    f"clause {clause.tag}: enumeration of {total}+ completions exceeds cap"
                )
        names = [n for n, _ in options]
        for combo in itertools.product(*[dom for _, dom in options]):
            full = dict(binding)
            full.update(zip(names, combo))
            if all(L.interpret_term(full, t) == v for t, v in checks):
                yield full


def bottom_up_facts(
    sys: CHCSystem,
    spec: Optional[SampleSpec] = None,
    enum_cap: int = 200_000,
    fact_cap: int = 2_000_000,
) -> dict[str, set[tuple]]:
    """Naive least-fixpoint of the clause system over bounded ground
    facts.  Exists solely as a test oracle; raises OracleBudget when the
    bounds cannot be respected."""
    spec = spec or SampleSpec()
    facts: dict[str, set[tuple]] = {p: set() for p in sys.sigs}
    rules = [c for c in sys.clauses if c.head is not None]
    changed = True
    while changed:
        changed = False
        for clause in rules:
            new = []
            for valuation in _body_valuations(sys, clause, facts, spec, enum_cap):
                fact = tuple(L.interpret_term(valuation, a) for a in clause.head.args)
                if fact not in facts[clause.head.pred]:
                    new.append(fact)
            if new:
                facts[clause.head.pred].update(new)
                changed = True
                if sum(len(s) for s in facts.values()) > fact_cap:
                    raise OracleBudget("fact cap exceeded")
    return facts

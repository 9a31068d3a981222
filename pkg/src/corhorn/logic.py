"""Multi-sorted constrained-Horn-clause logic.

Sorts are trees over box/mut containers, sums, products, int and unit,
with equi-recursive mu-sorts.  A clause has pattern arguments in its
head and arbitrary term arguments in body atoms; there are no primitive
constraints, arithmetic lives inside terms.  A clause with head None is
a query (an implication to false).

The module covers the static side (sort checking of terms and systems),
the semantic side (term interpretation, satisfaction of a system by a
predicate structure, sampled/exhaustive model checking) and syntactic
unification of pattern tuples, which the resolution engine builds on.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Union

from . import syntax as S
from . import values as V


# ---------------------------------------------------------------------------
# Sorts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoxS:
    inner: "Sort"


@dataclass(frozen=True)
class MutS:
    inner: "Sort"


@dataclass(frozen=True)
class SumS:
    left: "Sort"
    right: "Sort"


@dataclass(frozen=True)
class ProdS:
    left: "Sort"
    right: "Sort"


@dataclass(frozen=True)
class IntSort:
    pass


@dataclass(frozen=True)
class UnitSort:
    pass


@dataclass(frozen=True)
class SVar:
    name: str


@dataclass(frozen=True)
class MuS:
    var: str
    body: "Sort"


INT_S = IntSort()
UNIT_S = UnitSort()
BOOL_S = SumS(UNIT_S, UNIT_S)

Sort = Union[BoxS, MutS, SumS, ProdS, IntSort, UnitSort, SVar, MuS]


class IllSorted(S.CorError):
    pass


def subst_sort(s: Sort, var: str, repl: Sort) -> Sort:
    if isinstance(s, SVar):
        return repl if s.name == var else s
    if isinstance(s, MuS):
        if s.var == var:
            return s
        return MuS(s.var, subst_sort(s.body, var, repl))
    if isinstance(s, BoxS):
        return BoxS(subst_sort(s.inner, var, repl))
    if isinstance(s, MutS):
        return MutS(subst_sort(s.inner, var, repl))
    if isinstance(s, SumS):
        return SumS(subst_sort(s.left, var, repl), subst_sort(s.right, var, repl))
    if isinstance(s, ProdS):
        return ProdS(subst_sort(s.left, var, repl), subst_sort(s.right, var, repl))
    return s


def whnf_sort(s: Sort) -> Sort:
    while isinstance(s, MuS):
        s = subst_sort(s.body, s.var, s)
    return s


@lru_cache(maxsize=None)
def canon_sort(s: Sort) -> Sort:
    def walk(u: Sort, env: dict[str, str], depth: int) -> Sort:
        if isinstance(u, SVar):
            return SVar(env.get(u.name, u.name))
        if isinstance(u, MuS):
            name = f"X!{depth}"
            inner = dict(env)
            inner[u.var] = name
            return MuS(name, walk(u.body, inner, depth + 1))
        if isinstance(u, BoxS):
            return BoxS(walk(u.inner, env, depth))
        if isinstance(u, MutS):
            return MutS(walk(u.inner, env, depth))
        if isinstance(u, SumS):
            return SumS(walk(u.left, env, depth), walk(u.right, env, depth))
        if isinstance(u, ProdS):
            return ProdS(walk(u.left, env, depth), walk(u.right, env, depth))
        return u

    return walk(s, {}, 0)


def sort_equiv(a: Sort, b: Sort, _seen: frozenset = frozenset()) -> bool:
    """Equality up to unfolding mu-sorts (the congruence generated by
    mu X.s ~ s[mu X.s/X]); decided coinductively."""
    key = (canon_sort(a), canon_sort(b))
    if key[0] == key[1] or key in _seen:
        return True
    seen = _seen | {key}
    aw, bw = whnf_sort(a), whnf_sort(b)
    if isinstance(aw, BoxS) and isinstance(bw, BoxS):
        return sort_equiv(aw.inner, bw.inner, seen)
    if isinstance(aw, MutS) and isinstance(bw, MutS):
        return sort_equiv(aw.inner, bw.inner, seen)
    if isinstance(aw, SumS) and isinstance(bw, SumS):
        return sort_equiv(aw.left, bw.left, seen) and sort_equiv(aw.right, bw.right, seen)
    if isinstance(aw, ProdS) and isinstance(bw, ProdS):
        return sort_equiv(aw.left, bw.left, seen) and sort_equiv(aw.right, bw.right, seen)
    return canon_sort(aw) == canon_sort(bw)


def render_sort(s: Sort) -> str:
    if isinstance(s, BoxS):
        return f"box {render_atom(s.inner)}"
    if isinstance(s, MutS):
        return f"mut {render_atom(s.inner)}"
    if isinstance(s, SumS):
        if s == BOOL_S:
            return "bool"
        return f"{render_atom(s.left)} + {render_atom(s.right)}"
    if isinstance(s, ProdS):
        return f"{render_atom(s.left)} * {render_atom(s.right)}"
    if isinstance(s, IntSort):
        return "int"
    if isinstance(s, UnitSort):
        return "unit"
    if isinstance(s, SVar):
        return s.name
    if isinstance(s, MuS):
        return f"mu {s.var}. {render_sort(s.body)}"
    raise TypeError(f"not a sort: {s!r}")


def render_atom(s: Sort) -> str:
    txt = render_sort(s)
    if isinstance(s, (SumS, ProdS, MuS)) and s != BOOL_S:
        return f"({txt})"
    return txt


# ---------------------------------------------------------------------------
# Sort checking of terms
# ---------------------------------------------------------------------------


def check_term(delta: dict[str, Sort], t: V.Term, expect: Sort) -> None:
    """Check t against the expected sort (raises IllSorted)."""
    got = sort_of_term(delta, t, expect)
    if not sort_equiv(got, expect):
        raise IllSorted(f"term {V.show(t)} has sort {render_sort(got)}, expected {render_sort(expect)}")


def sort_of_term(delta: dict[str, Sort], t: V.Term, expect: Optional[Sort] = None) -> Sort:
    """Sort of a term under a variable sort context.

    Injections cannot be inferred alone (the other summand is free), so
    they are only accepted when an expected sort is supplied.
    """
    if isinstance(t, bool):
        raise IllSorted("Python bool leaked into a term")
    if isinstance(t, int):
        return INT_S
    if isinstance(t, V.UnitVal):
        return UNIT_S
    if isinstance(t, V.Var):
        if t.name not in delta:
            raise IllSorted(f"unbound variable {t.name!r}")
        return delta[t.name]
    if isinstance(t, V.Box):
        e = whnf_sort(expect) if expect is not None else None
        inner = e.inner if isinstance(e, BoxS) else None
        return BoxS(sort_of_term(delta, t.inner, inner))
    if isinstance(t, V.MutPair):
        e = whnf_sort(expect) if expect is not None else None
        inner = e.inner if isinstance(e, MutS) else None
        cur = sort_of_term(delta, t.cur, inner)
        fin = sort_of_term(delta, t.fin, inner)
        if not sort_equiv(cur, fin):
            raise IllSorted(f"mut components disagree: {render_sort(cur)} vs {render_sort(fin)}")
        return MutS(cur)
    if isinstance(t, V.Inj):
        e = whnf_sort(expect) if expect is not None else None
        if not isinstance(e, SumS):
            raise IllSorted(f"cannot determine sum sort of {V.show(t)}")
        side = e.left if t.tag == 0 else e.right
        check_term(delta, t.payload, side)
        return e
    if isinstance(t, V.Pair):
        e = whnf_sort(expect) if expect is not None else None
        l = sort_of_term(delta, t.fst, e.left if isinstance(e, ProdS) else None)
        r = sort_of_term(delta, t.snd, e.right if isinstance(e, ProdS) else None)
        return ProdS(l, r)
    if isinstance(t, V.DerefT):
        inner = whnf_sort(sort_of_term(delta, t.arg))
        if isinstance(inner, (BoxS, MutS)):
            return inner.inner
        raise IllSorted(f"*applied to sort {render_sort(inner)}")
    if isinstance(t, V.FinalT):
        inner = whnf_sort(sort_of_term(delta, t.arg))
        if isinstance(inner, MutS):
            return inner.inner
        raise IllSorted(f"^ applied to sort {render_sort(inner)}")
    if isinstance(t, V.ProjT):
        inner = whnf_sort(sort_of_term(delta, t.arg))
        if isinstance(inner, ProdS):
            return inner.left if t.index == 0 else inner.right
        raise IllSorted(f"projection applied to sort {render_sort(inner)}")
    if isinstance(t, V.BinOpT):
        check_term(delta, t.left, INT_S)
        check_term(delta, t.right, INT_S)
        return INT_S if t.op in S.INT_OPS else BOOL_S
    if isinstance(t, V.AbsVar):
        raise IllSorted("abstract variable in a logical term")
    raise IllSorted(f"not a term: {t!r}")


def check_value(v: V.Value, s: Sort) -> bool:
    s = whnf_sort(s)
    if isinstance(s, IntSort):
        return isinstance(v, int) and not isinstance(v, bool)
    if isinstance(s, UnitSort):
        return isinstance(v, V.UnitVal)
    if isinstance(s, BoxS):
        return isinstance(v, V.Box) and check_value(v.inner, s.inner)
    if isinstance(s, MutS):
        return isinstance(v, V.MutPair) and check_value(v.cur, s.inner) and check_value(v.fin, s.inner)
    if isinstance(s, SumS):
        return isinstance(v, V.Inj) and check_value(v.payload, s.left if v.tag == 0 else s.right)
    if isinstance(s, ProdS):
        return isinstance(v, V.Pair) and check_value(v.fst, s.left) and check_value(v.snd, s.right)
    return False


# ---------------------------------------------------------------------------
# Clauses and systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[V.Term, ...]


@dataclass(frozen=True)
class Clause:
    binders: tuple[tuple[str, Sort], ...]
    head: Optional[Atom]  # None encodes an implication to false (a query)
    body: tuple[Atom, ...]
    tag: tuple = ()  # provenance, keeps output ordering stable

    def free_vars(self) -> set[str]:
        out: set[str] = set()
        for atom in (() if self.head is None else (self.head,)) + self.body:
            for a in atom.args:
                out |= V.vars_in(a)
        return out


@dataclass
class CHCSystem:
    clauses: list[Clause]
    sigs: dict[str, tuple[Sort, ...]]

    def by_pred(self) -> dict[str, list[Clause]]:
        index: dict[str, list[Clause]] = {p: [] for p in self.sigs}
        for c in self.clauses:
            if c.head is not None:
                index.setdefault(c.head.pred, []).append(c)
        return index


def pred_name(fn: str, label: str) -> str:
    # '!' cannot occur in user identifiers, so this rendering is injective
    return f"{fn}!{label}"


def well_sorted_clause(sigs: dict[str, tuple[Sort, ...]], clause: Clause) -> None:
    delta = dict(clause.binders)
    if len(delta) != len(clause.binders):
        raise IllSorted(f"clause {clause.tag}: duplicate binders")
    missing = clause.free_vars() - set(delta)
    if missing:
        raise IllSorted(f"clause {clause.tag}: unbound variables {sorted(missing)}")
    atoms = clause.body if clause.head is None else (clause.head,) + clause.body
    for atom in atoms:
        if atom.pred not in sigs:
            raise IllSorted(f"clause {clause.tag}: unknown predicate {atom.pred}")
        sig = sigs[atom.pred]
        if len(atom.args) != len(sig):
            raise IllSorted(
                f"clause {clause.tag}: {atom.pred} applied to {len(atom.args)} args, wants {len(sig)}"
            )
        for arg, sort in zip(atom.args, sig):
            check_term(delta, arg, sort)
    if clause.head is not None:
        for arg in clause.head.args:
            if not V.is_pattern(arg):
                raise IllSorted(f"clause {clause.tag}: head argument {V.show(arg)} is not a pattern")


def well_sorted_system(sys: CHCSystem) -> None:
    for clause in sys.clauses:
        well_sorted_clause(sys.sigs, clause)


def equality_clause(sort: Sort) -> tuple[Clause, tuple[str, tuple[Sort, ...]]]:
    """The standard way to get equality without a primitive: one clause
    Eq(x, x) <= true at the given sort."""
    name = f"eq!{render_sort(canon_sort(sort))}"
    clause = Clause(
        binders=(("x", sort),),
        head=Atom(name, (V.Var("x"), V.Var("x"))),
        body=(),
        tag=("eq", render_sort(sort)),
    )
    return clause, (name, (sort, sort))


# ---------------------------------------------------------------------------
# Interpretation and model checking
# ---------------------------------------------------------------------------


class Undefined(S.CorError):
    pass


def interpret_term(valuation: dict[str, V.Value], t: V.Term) -> V.Value:
    if isinstance(t, bool):
        raise Undefined("Python bool leaked into a term")
    if isinstance(t, (int, V.UnitVal)):
        return t
    if isinstance(t, V.Var):
        if t.name not in valuation:
            raise Undefined(f"unbound variable {t.name!r}")
        return valuation[t.name]
    if isinstance(t, V.Box):
        return V.Box(interpret_term(valuation, t.inner))
    if isinstance(t, V.MutPair):
        return V.MutPair(interpret_term(valuation, t.cur), interpret_term(valuation, t.fin))
    if isinstance(t, V.Inj):
        return V.Inj(t.tag, interpret_term(valuation, t.payload))
    if isinstance(t, V.Pair):
        return V.Pair(interpret_term(valuation, t.fst), interpret_term(valuation, t.snd))
    if isinstance(t, V.DerefT):
        v = interpret_term(valuation, t.arg)
        if isinstance(v, V.Box):
            return v.inner
        if isinstance(v, V.MutPair):
            return v.cur
        raise Undefined(f"* of non-pointer value {V.show(v)}")
    if isinstance(t, V.FinalT):
        v = interpret_term(valuation, t.arg)
        if isinstance(v, V.MutPair):
            return v.fin
        raise Undefined(f"^ of non-mut value {V.show(v)}")
    if isinstance(t, V.ProjT):
        v = interpret_term(valuation, t.arg)
        if isinstance(v, V.Pair):
            return v.fst if t.index == 0 else v.snd
        raise Undefined(f"projection of non-pair value {V.show(v)}")
    if isinstance(t, V.BinOpT):
        a = interpret_term(valuation, t.left)
        b = interpret_term(valuation, t.right)
        if not isinstance(a, int) or not isinstance(b, int):
            raise Undefined("arithmetic on non-integers")
        res = S.eval_op(t.op, a, b)
        if isinstance(res, bool):
            return V.TRUE if res else V.FALSE
        return res
    raise Undefined(f"cannot interpret {t!r}")


PredCheck = Callable[[tuple], bool]


def as_pred_structure(model: dict[str, Union[PredCheck, set, frozenset]]) -> dict[str, PredCheck]:
    out: dict[str, PredCheck] = {}
    for name, m in model.items():
        if callable(m):
            out[name] = m
        else:
            table = frozenset(m)
            out[name] = lambda args, _t=table: args in _t
    return out


@dataclass
class SampleSpec:
    """Bounds for enumerating/sampling the value domain of a sort."""

    int_lo: int = -8
    int_hi: int = 8
    max_depth: int = 4  # constructor depth cap for recursive sorts
    exhaustive_limit: int = 10 ** 6

    def int_count(self) -> int:
        return self.int_hi - self.int_lo + 1


def enumerate_values(sort: Sort, spec: SampleSpec, depth: Optional[int] = None) -> list[V.Value]:
    """All values of the sort within the bounds: ints in the interval,
    recursion cut at max_depth constructors of mu-unfoldings."""
    depth = spec.max_depth if depth is None else depth
    s = whnf_sort(sort) if isinstance(sort, MuS) else sort
    if isinstance(s, MuS):
        s = whnf_sort(s)
    if isinstance(s, IntSort):
        return list(range(spec.int_lo, spec.int_hi + 1))
    if isinstance(s, UnitSort):
        return [V.UNIT]
    if isinstance(s, BoxS):
        return [V.Box(v) for v in enumerate_values(s.inner, spec, depth)]
    if isinstance(s, MutS):
        inner = enumerate_values(s.inner, spec, depth)
        return [V.MutPair(a, b) for a in inner for b in inner]
    if isinstance(s, ProdS):
        ls = enumerate_values(s.left, spec, depth)
        rs = enumerate_values(s.right, spec, depth)
        return [V.Pair(a, b) for a in ls for b in rs]
    if isinstance(s, SumS):
        if depth <= 0:
            return []
        out = [V.Inj(0, v) for v in enumerate_values(s.left, spec, depth - 1)]
        out += [V.Inj(1, v) for v in enumerate_values(s.right, spec, depth - 1)]
        return out
    raise Undefined(f"cannot enumerate sort {render_sort(sort)}")


def count_values(sort: Sort, spec: SampleSpec, depth: Optional[int] = None) -> int:
    depth = spec.max_depth if depth is None else depth
    s = whnf_sort(sort) if isinstance(sort, MuS) else sort
    if isinstance(s, MuS):
        s = whnf_sort(s)
    if isinstance(s, IntSort):
        return spec.int_count()
    if isinstance(s, UnitSort):
        return 1
    if isinstance(s, BoxS):
        return count_values(s.inner, spec, depth)
    if isinstance(s, MutS):
        return count_values(s.inner, spec, depth) ** 2
    if isinstance(s, ProdS):
        return count_values(s.left, spec, depth) * count_values(s.right, spec, depth)
    if isinstance(s, SumS):
        if depth <= 0:
            return 0
        return count_values(s.left, spec, depth - 1) + count_values(s.right, spec, depth - 1)
    raise Undefined(f"cannot count sort {render_sort(sort)}")


def random_value(sort: Sort, spec: SampleSpec, rng: random.Random, depth: Optional[int] = None) -> V.Value:
    depth = spec.max_depth if depth is None else depth
    s = whnf_sort(sort)
    if isinstance(s, IntSort):
        return rng.randint(spec.int_lo, spec.int_hi)
    if isinstance(s, UnitSort):
        return V.UNIT
    if isinstance(s, BoxS):
        return V.Box(random_value(s.inner, spec, rng, depth))
    if isinstance(s, MutS):
        return V.MutPair(random_value(s.inner, spec, rng, depth),
                         random_value(s.inner, spec, rng, depth))
    if isinstance(s, ProdS):
        return V.Pair(random_value(s.left, spec, rng, depth),
                      random_value(s.right, spec, rng, depth))
    if isinstance(s, SumS):
        # prefer the cheaper side when the depth budget runs out
        sides = [(0, s.left), (1, s.right)]
        if depth <= 0:
            finite = [p for p in sides if count_values(p[1], spec, 0) > 0]
            sides = finite or sides
        tag, side = rng.choice(sides)
        return V.Inj(tag, random_value(side, spec, rng, max(depth - 1, 0)))
    raise Undefined(f"cannot sample sort {render_sort(sort)}")


def default_value(sort: Sort, spec: Optional[SampleSpec] = None) -> V.Value:
    """A canonical inhabitant: 0, unit, and for sums the first side that
    bottoms out within the depth budget."""
    spec = spec or SampleSpec()
    for depth in range(spec.max_depth, spec.max_depth + 8):
        vals = enumerate_values(sort, SampleSpec(0, 0, depth))
        if vals:
            return vals[0]
    raise Undefined(f"no inhabitant found for {render_sort(sort)}")


@dataclass
class Verdict:
    violated: bool
    clause: Optional[Clause] = None
    valuation: Optional[dict[str, V.Value]] = None
    checked: int = 0


def _clause_holds(model: dict[str, PredCheck], clause: Clause, valuation: dict[str, V.Value]) -> bool:
    for atom in clause.body:
        args = tuple(interpret_term(valuation, a) for a in atom.args)
        if not model[atom.pred](args):
            return True  # body false: clause vacuously holds
    if clause.head is None:
        return False  # body holds, head is false
    args = tuple(interpret_term(valuation, a) for a in clause.head.args)
    return model[clause.head.pred](args)


def check_model_sampled(
    sys: CHCSystem,
    model: dict[str, Union[PredCheck, set, frozenset]],
    spec: Optional[SampleSpec] = None,
    budget: int = 10 ** 5,
    seed: int = 0,
) -> Verdict:
    """Check every clause under the predicate structure.

    Per clause: exhaustive over the bounded value domain when its size
    fits the exhaustive limit, otherwise `budget` random samples.  A
    returned violation is a genuine countermodel witness; no violation
    found is a semi-decision within the bounds.
    """
    spec = spec or SampleSpec()
    preds = as_pred_structure(model)
    rng = random.Random(seed)
    checked = 0
    for clause in sys.clauses:
        binders = clause.binders
        size = 1
        for _, sort in binders:
            size *= max(count_values(sort, spec), 1)
            if size > spec.exhaustive_limit:
                break
        if size <= spec.exhaustive_limit:
            import itertools

            names = [name for name, _ in binders]
            domains = [enumerate_values(sort, spec) for _, sort in binders]
            for combo in itertools.product(*domains):
                valuation = dict(zip(names, combo))
                checked += 1
                if not _clause_holds(preds, clause, valuation):
                    return Verdict(True, clause, valuation, checked)
        else:
            for _ in range(budget):
                valuation = {name: random_value(sort, spec, rng) for name, sort in binders}
                checked += 1
                if not _clause_holds(preds, clause, valuation):
                    return Verdict(True, clause, valuation, checked)
    return Verdict(False, checked=checked)


# ---------------------------------------------------------------------------
# Unification of pattern tuples
# ---------------------------------------------------------------------------


def _walk(t: V.Term, subst: dict[str, V.Term]) -> V.Term:
    while isinstance(t, V.Var) and t.name in subst:
        t = subst[t.name]
    return t


def _occurs(name: str, t: V.Term, subst: dict[str, V.Term]) -> bool:
    t = _walk(t, subst)
    if isinstance(t, V.Var):
        return t.name == name
    return any(_occurs(name, k, subst) for k in V.children(t))


def _unify(a: V.Term, b: V.Term, subst: dict[str, V.Term]) -> bool:
    a = _walk(a, subst)
    b = _walk(b, subst)
    if isinstance(a, V.Var):
        if isinstance(b, V.Var) and b.name == a.name:
            return True
        if _occurs(a.name, b, subst):
            return False
        subst[a.name] = b
        return True
    if isinstance(b, V.Var):
        return _unify(b, a, subst)
    if isinstance(a, int) and isinstance(b, int):
        return a == b
    if isinstance(a, V.UnitVal) and isinstance(b, V.UnitVal):
        return True
    if type(a) is type(b):
        if isinstance(a, V.Inj) and a.tag != b.tag:
            return False
        ka, kb = V.children(a), V.children(b)
        return len(ka) == len(kb) and all(_unify(x, y, subst) for x, y in zip(ka, kb))
    return False


def resolve(t: V.Term, subst: dict[str, V.Term]) -> V.Term:
    t = _walk(t, subst)
    kids = V.children(t)
    if not kids:
        return t
    return V.rebuild(t, tuple(resolve(k, subst) for k in kids))


def unify(
    ps: tuple[V.Term, ...], qs: tuple[V.Term, ...]
) -> Optional[tuple[dict[str, V.Term], dict[str, V.Term]]]:
    """Most general unifier of two pattern tuples over disjoint variable
    namespaces.  Returns (theta, theta') with ps[i]*theta == qs[i]*theta',
    split by which tuple each variable came from.  Repeated variables
    (non-linear patterns) are supported."""
    if len(ps) != len(qs):
        return None
    subst: dict[str, V.Term] = {}
    for p, q in zip(ps, qs):
        if not _unify(p, q, subst):
            return None
    left_vars = set()
    for p in ps:
        left_vars |= V.vars_in(p)
    theta = {v: resolve(V.Var(v), subst) for v in left_vars if not (
        isinstance(resolve(V.Var(v), subst), V.Var) and resolve(V.Var(v), subst).name == v)}
    right_vars = set()
    for q in qs:
        right_vars |= V.vars_in(q)
    theta_p = {v: resolve(V.Var(v), subst) for v in right_vars if not (
        isinstance(resolve(V.Var(v), subst), V.Var) and resolve(V.Var(v), subst).name == v)}
    return theta, theta_p


def full_subst(subst: dict[str, V.Term]) -> Callable[[V.Term], V.Term]:
    return lambda t: resolve(t, subst)


# ---------------------------------------------------------------------------
# Pattern refinement
# ---------------------------------------------------------------------------


def refines_to(p: V.Term, w: V.Value) -> bool:
    """Can pattern p be instantiated to the value w?  Repeated pattern
    variables must take equal values."""
    binding: dict[str, V.Value] = {}

    def go(pt: V.Term, val: V.Value) -> bool:
        if isinstance(pt, V.Var):
            if pt.name in binding:
                return binding[pt.name] == val
            binding[pt.name] = val
            return True
        if isinstance(pt, int) or isinstance(pt, V.UnitVal):
            return pt == val
        if type(pt) is not type(val):
            return False
        if isinstance(pt, V.Inj) and pt.tag != val.tag:
            return False
        return all(go(a, b) for a, b in zip(V.children(pt), V.children(val)))

    return go(p, w)


def refine_default(p: V.Term, delta: dict[str, Sort], spec: Optional[SampleSpec] = None) -> V.Value:
    """Instantiate the don't-care variables of a result pattern with
    default values of their sorts."""
    spec = spec or SampleSpec()

    def go(t: V.Term) -> V.Term:
        if isinstance(t, V.Var):
            return default_value(delta[t.name], spec)
        kids = V.children(t)
        return V.rebuild(t, tuple(go(k) for k in kids)) if kids else t

    return go(p)

"""Translation from typed programs to CHC systems.

Each (function, label) pair becomes a predicate over the label's live
variables plus a result position; each labeled statement becomes one
clause (two for a match) relating the label's predicate to its
successor's.  Lifetime information is erased: owning pointers and
immutable references become box sorts, mutable references become mut
(current, final) pair sorts, and releasing a mutable reference pins its
final component to the current value via a non-linear head pattern.

Generated variable names carry the reserved '!' character: x!c / x!p
are the fresh current/final values split off x, and x!cc, x!cp, x!pc
name the three fresh components when dereferencing a mut-of-mut.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import logic as L
from . import syntax as S
from . import values as V
from .logic import Atom, CHCSystem, Clause, Sort, pred_name
from .typeck import TypingResult, WholeCtx

RES = "res"


class TranslateError(S.CorError):
    def __init__(self, code: str, msg: str):
        super().__init__(f"[{code}] {msg}")
        self.code = code


def sort_of_type(t: S.Type) -> Sort:
    """Erase lifetimes: own/immut -> box, mut -> mut, rest structurally."""
    if isinstance(t, S.Ptr):
        inner = sort_of_type(t.target)
        return L.MutS(inner) if t.kind == S.MUT else L.BoxS(inner)
    if isinstance(t, S.Sum):
        return L.SumS(sort_of_type(t.left), sort_of_type(t.right))
    if isinstance(t, S.Prod):
        return L.ProdS(sort_of_type(t.left), sort_of_type(t.right))
    if isinstance(t, S.IntT):
        return L.INT_S
    if isinstance(t, S.UnitT):
        return L.UNIT_S
    if isinstance(t, S.Mu):
        return L.MuS(t.var, sort_of_type(t.body))
    if isinstance(t, S.TypeVar):
        return L.SVar(t.name)
    raise TypeError(f"not a type: {t!r}")


def label_vars(wc: WholeCtx) -> list[str]:
    """The fixed enumeration order for a label's variables: lexicographic,
    with the result position appended last."""
    return sorted(wc.gamma)


def signature_for(
    prog: S.Program, typing: TypingResult, f: str, label: str
) -> tuple[str, tuple[Sort, ...], dict[str, Sort], Atom]:
    wc = typing.ctx(f, label)
    ret = prog.fn(f).ret
    names = label_vars(wc)
    sorts = tuple(sort_of_type(wc.gamma[x].ty) for x in names) + (sort_of_type(ret),)
    delta = dict(zip(names, sorts))
    delta[RES] = sorts[-1]
    head = Atom(pred_name(f, label), tuple(V.Var(x) for x in names) + (V.Var(RES),))
    return pred_name(f, label), sorts, delta, head


def _atom(typing: TypingResult, f: str, label: str, subst: dict[str, V.Term]) -> Atom:
    wc = typing.ctx(f, label)
    args = [subst.get(x, V.Var(x)) for x in label_vars(wc)]
    args.append(subst.get(RES, V.Var(RES)))
    return Atom(pred_name(f, label), tuple(args))


def _binders(
    typing: TypingResult, prog: S.Program, f: str, label: str,
    drop: tuple[str, ...] = (), fresh: tuple[tuple[str, Sort], ...] = (),
) -> tuple[tuple[str, Sort], ...]:
    wc = typing.ctx(f, label)
    ret_sort = sort_of_type(prog.fn(f).ret)
    out = [
        (x, sort_of_type(wc.gamma[x].ty))
        for x in label_vars(wc)
        if x not in drop
    ]
    out.append((RES, ret_sort))
    out.extend(fresh)
    return tuple(out)


def clauses_for_label(
    prog: S.Program, typing: TypingResult, f: str, label: str, stmt: S.Statement,
    order: int = 0,
) -> list[Clause]:
    """The clause set modeling one labeled statement."""
    ty = lambda x: typing.ty(f, label, x)
    head_plain = _atom(typing, f, label, {})

    def clause(binders, head, body, case=0):
        return [Clause(tuple(binders), head, tuple(body), tag=(f, order, label, case))]

    if isinstance(stmt, S.StmtReturn):
        head = _atom(typing, f, label, {RES: V.Var(stmt.x)})
        return clause(_binders(typing, prog, f, label), head, [])

    if isinstance(stmt, S.StmtMatch):
        t = ty(stmt.x)
        sum_t = S.whnf_type(t.target)
        out = []
        for i, (binder, target) in enumerate(((stmt.y0, stmt.l0), (stmt.y1, stmt.l1))):
            side = sum_t.left if i == 0 else sum_t.right
            side_sort = sort_of_type(side)
            if t.kind in (S.OWN, S.IMMUT):
                fresh = ((f"{stmt.x}!c", side_sort),)
                head = _atom(typing, f, label, {stmt.x: V.Box(V.Inj(i, V.Var(f"{stmt.x}!c")))})
                body = _atom(typing, f, target, {binder: V.Box(V.Var(f"{stmt.x}!c"))})
            else:
                fresh = ((f"{stmt.x}!c", side_sort), (f"{stmt.x}!p", side_sort))
                head = _atom(
                    typing, f, label,
                    {stmt.x: V.MutPair(V.Inj(i, V.Var(f"{stmt.x}!c")), V.Inj(i, V.Var(f"{stmt.x}!p")))},
                )
                body = _atom(
                    typing, f, target,
                    {binder: V.MutPair(V.Var(f"{stmt.x}!c"), V.Var(f"{stmt.x}!p"))},
                )
            binders = _binders(typing, prog, f, target, drop=(binder,), fresh=fresh)
            out += clause(binders, head, [body], case=i)
        return out

    instr = stmt.instr
    goto = stmt.goto

    def next_atom(subst: dict[str, V.Term]) -> Atom:
        return _atom(typing, f, goto, subst)

    if isinstance(instr, S.MutBor):
        t = ty(instr.x)
        fresh_fin = f"{instr.x}!p"
        fresh = ((fresh_fin, sort_of_type(t.target)),)
        if t.kind == S.OWN:
            subst = {
                instr.y: V.MutPair(V.DerefT(V.Var(instr.x)), V.Var(fresh_fin)),
                instr.x: V.Box(V.Var(fresh_fin)),
            }
        else:
            subst = {
                instr.y: V.MutPair(V.DerefT(V.Var(instr.x)), V.Var(fresh_fin)),
                instr.x: V.MutPair(V.Var(fresh_fin), V.FinalT(V.Var(instr.x))),
            }
        binders = _binders(typing, prog, f, label, fresh=fresh)
        return clause(binders, head_plain, [next_atom(subst)])

    if isinstance(instr, S.Drop):
        t = ty(instr.x)
        if t.kind == S.MUT:
            cur = f"{instr.x}!c"
            binders = _binders(
                typing, prog, f, label, drop=(instr.x,), fresh=((cur, sort_of_type(t.target)),)
            )
            head = _atom(typing, f, label, {instr.x: V.MutPair(V.Var(cur), V.Var(cur))})
            return clause(binders, head, [next_atom({})])
        return clause(_binders(typing, prog, f, label), head_plain, [next_atom({})])

    if isinstance(instr, S.Immut):
        t = ty(instr.x)
        cur = f"{instr.x}!c"
        binders = _binders(
            typing, prog, f, label, drop=(instr.x,), fresh=((cur, sort_of_type(t.target)),)
        )
        head = _atom(typing, f, label, {instr.x: V.MutPair(V.Var(cur), V.Var(cur))})
        return clause(binders, head, [next_atom({instr.x: V.Box(V.Var(cur))})])

    if isinstance(instr, S.Swap):
        t = ty(instr.y)
        subst = {instr.x: V.MutPair(V.DerefT(V.Var(instr.y)), V.FinalT(V.Var(instr.x)))}
        if t.kind == S.OWN:
            subst[instr.y] = V.Box(V.DerefT(V.Var(instr.x)))
        else:
            subst[instr.y] = V.MutPair(V.DerefT(V.Var(instr.x)), V.FinalT(V.Var(instr.y)))
        return clause(_binders(typing, prog, f, label), head_plain, [next_atom(subst)])

    if isinstance(instr, S.MakePtr):
        return clause(
            _binders(typing, prog, f, label), head_plain,
            [next_atom({instr.y: V.Box(V.Var(instr.x))})],
        )

    if isinstance(instr, S.Deref):
        t = ty(instr.x)
        inner = t.target
        x = V.Var(instr.x)
        if t.kind == S.OWN:
            subst = {instr.y: V.DerefT(x)}
            return clause(_binders(typing, prog, f, label), head_plain, [next_atom(subst)])
        if t.kind == S.IMMUT:
            subst = {instr.y: V.Box(V.DerefT(V.DerefT(x)))}
            return clause(_binders(typing, prog, f, label), head_plain, [next_atom(subst)])
        if inner.kind == S.OWN:
            subst = {instr.y: V.MutPair(V.DerefT(V.DerefT(x)), V.DerefT(V.FinalT(x)))}
            return clause(_binders(typing, prog, f, label), head_plain, [next_atom(subst)])
        if inner.kind == S.IMMUT:
            cur = f"{instr.x}!c"
            binders = _binders(
                typing, prog, f, label, drop=(instr.x,),
                fresh=((cur, L.BoxS(sort_of_type(inner.target))),),
            )
            head = _atom(typing, f, label, {instr.x: V.MutPair(V.Var(cur), V.Var(cur))})
            return clause(binders, head, [next_atom({instr.y: V.Var(cur)})])
        # mut of mut
        cc, cp, pc = (f"{instr.x}!cc", f"{instr.x}!cp", f"{instr.x}!pc")
        inner_sort = sort_of_type(inner.target)
        binders = _binders(
            typing, prog, f, label, drop=(instr.x,),
            fresh=((cc, inner_sort), (cp, inner_sort), (pc, inner_sort)),
        )
        head = _atom(
            typing, f, label,
            {instr.x: V.MutPair(
                V.MutPair(V.Var(cc), V.Var(cp)), V.MutPair(V.Var(pc), V.Var(cp))
            )},
        )
        return clause(binders, head, [next_atom({instr.y: V.MutPair(V.Var(cc), V.Var(pc))})])

    if isinstance(instr, S.CopyDeref):
        subst = {instr.y: V.Box(V.DerefT(V.Var(instr.x)))}
        return clause(_binders(typing, prog, f, label), head_plain, [next_atom(subst)])

    if isinstance(instr, (S.TypeWeaken, S.IntroLft, S.NowLft, S.LftLeq)):
        return clause(_binders(typing, prog, f, label), head_plain, [next_atom({})])

    if isinstance(instr, S.Call):
        ret_t = typing.ty(f, goto, instr.y)
        fresh = ((instr.y, sort_of_type(ret_t)),)
        call_atom = Atom(
            pred_name(instr.fn, S.ENTRY),
            tuple(V.Var(x) for x in instr.args) + (V.Var(instr.y),),
        )
        binders = _binders(typing, prog, f, label, fresh=fresh)
        return clause(binders, head_plain, [call_atom, next_atom({})])

    if isinstance(instr, S.ConstInstr):
        lit: V.Term = V.UNIT if instr.value == S.UNIT_CONST else instr.value
        subst = {instr.y: V.Box(lit)}
        return clause(_binders(typing, prog, f, label), head_plain, [next_atom(subst)])

    if isinstance(instr, S.BinOpInstr):
        subst = {instr.y: V.Box(V.BinOpT(V.DerefT(V.Var(instr.x)), instr.op, V.DerefT(V.Var(instr.x2))))}
        return clause(_binders(typing, prog, f, label), head_plain, [next_atom(subst)])

    if isinstance(instr, S.RandInstr):
        # binders come from the successor label, so y is quantified but
        # unconstrained on the left: the random draw
        binders = _binders(typing, prog, f, goto)
        return clause(binders, head_plain, [next_atom({})])

    if isinstance(instr, S.InjInstr):
        subst = {instr.y: V.Box(V.Inj(instr.index, V.DerefT(V.Var(instr.x))))}
        return clause(_binders(typing, prog, f, label), head_plain, [next_atom(subst)])

    if isinstance(instr, S.MakePair):
        subst = {instr.y: V.Box(V.Pair(V.DerefT(V.Var(instr.x0)), V.DerefT(V.Var(instr.x1))))}
        return clause(_binders(typing, prog, f, label), head_plain, [next_atom(subst)])

    if isinstance(instr, S.DestructPair):
        t = ty(instr.x)
        x = V.Var(instr.x)
        if t.kind in (S.OWN, S.IMMUT):
            subst = {
                instr.y0: V.Box(V.ProjT(V.DerefT(x), 0)),
                instr.y1: V.Box(V.ProjT(V.DerefT(x), 1)),
            }
        else:
            subst = {
                instr.y0: V.MutPair(V.ProjT(V.DerefT(x), 0), V.ProjT(V.FinalT(x), 0)),
                instr.y1: V.MutPair(V.ProjT(V.DerefT(x), 1), V.ProjT(V.FinalT(x), 1)),
            }
        return clause(_binders(typing, prog, f, label), head_plain, [next_atom(subst)])

    raise TypeError(f"not an instruction: {instr!r}")


def translate_program(prog: S.Program, typing: Optional[TypingResult] = None) -> CHCSystem:
    from .typeck import type_program

    typing = typing or type_program(prog)
    sigs: dict[str, tuple[Sort, ...]] = {}
    clauses: list[Clause] = []
    for fn in prog:
        for order, label in enumerate(fn.body):
            name, sorts, _, _ = signature_for(prog, typing, fn.name, label)
            sigs[name] = sorts
    for fn in prog:
        for order, (label, stmt) in enumerate(fn.body.items()):
            clauses += clauses_for_label(prog, typing, fn.name, label, stmt, order)
    return CHCSystem(clauses, sigs)


# ---------------------------------------------------------------------------
# Goal attachment
# ---------------------------------------------------------------------------

GOAL_PRED = "goal_violation"
IS_TRUE_PRED = "is_true"


@dataclass(frozen=True)
class GoalSpec:
    fn: str
    kind: str  # 'returns_true' | 'equals'
    expect: Optional[V.Value] = None

    @staticmethod
    def parse(text: str) -> "GoalSpec":
        from .parser import parse_value

        words = text.strip().split(None, 2)
        if len(words) == 3 and words[1] == "returns" and words[2] == "true":
            return GoalSpec(words[0], "returns_true")
        if len(words) == 3 and words[1] == "equals":
            return GoalSpec(words[0], "equals", parse_value(words[2]))
        raise TranslateError(
            "UnsupportedGoalShape",
            f"cannot parse goal {text!r}; use 'NAME returns true' or 'NAME equals VALUE'",
        )


def attach_goal(sys: CHCSystem, prog: S.Program, goal: GoalSpec) -> CHCSystem:
    """Add a violation predicate for the goal plus the query clause.

    'f returns true' marks as a violation any run of f producing
    box(inj0 ()); since the logic has no primitive constraints, the
    boolean is matched structurally on its sum tag.
    """
    if goal.fn not in prog.functions:
        raise TranslateError("UnsupportedGoalShape", f"unknown function {goal.fn!r}")
    fn = prog.fn(goal.fn)
    if not fn.is_simple():
        raise TranslateError("UnsupportedGoalShape", f"{goal.fn} takes lifetime parameters")
    entry = pred_name(goal.fn, S.ENTRY)
    sig = sys.sigs[entry]
    arg_sorts, res_sort = sig[:-1], sig[-1]
    arg_vars = tuple(V.Var(f"a!{i}") for i in range(len(arg_sorts)))
    binders = tuple((f"a!{i}", s) for i, s in enumerate(arg_sorts))
    clauses = list(sys.clauses)
    sigs = dict(sys.sigs)
    sigs[GOAL_PRED] = ()

    if goal.kind == "returns_true":
        if not L.sort_equiv(res_sort, L.BoxS(L.BOOL_S)):
            raise TranslateError("UnsupportedGoalShape", f"{goal.fn} does not return own bool")
        bad = V.Box(V.Inj(0, V.Var("u!0")))
        clauses.append(
            Clause(
                binders + (("u!0", L.UNIT_S),),
                Atom(GOAL_PRED, ()),
                (Atom(entry, arg_vars + (bad,)),),
                tag=("goal", goal.fn, "returns_true"),
            )
        )
    elif goal.kind == "equals":
        if not L.sort_equiv(res_sort, L.BoxS(L.INT_S)) or not isinstance(goal.expect, V.Box):
            raise TranslateError("UnsupportedGoalShape", f"{goal.fn} equals-goal needs an own int result")
        sigs[IS_TRUE_PRED] = (L.BOOL_S,)
        clauses.append(
            Clause(
                (("b!0", L.UNIT_S),),
                Atom(IS_TRUE_PRED, (V.Inj(1, V.Var("b!0")),)),
                (),
                tag=("goal", "is_true"),
            )
        )
        clauses.append(
            Clause(
                binders + (("r!0", L.INT_S),),
                Atom(GOAL_PRED, ()),
                (
                    Atom(entry, arg_vars + (V.Box(V.Var("r!0")),)),
                    Atom(IS_TRUE_PRED, (V.BinOpT(V.Var("r!0"), "!=", goal.expect.inner),)),
                ),
                tag=("goal", goal.fn, "equals"),
            )
        )
    else:
        raise TranslateError("UnsupportedGoalShape", f"unknown goal kind {goal.kind!r}")

    clauses.append(Clause((), None, (Atom(GOAL_PRED, ()),), tag=("goal", "query")))
    return CHCSystem(clauses, sigs)


# ---------------------------------------------------------------------------
# Text dump
# ---------------------------------------------------------------------------


def render_atom(atom: Atom) -> str:
    return f"{atom.pred}({', '.join(V.show(a) for a in atom.args)})"


def render_clause(clause: Clause) -> str:
    head = "false" if clause.head is None else render_atom(clause.head)
    body = " /\\ ".join(render_atom(a) for a in clause.body) if clause.body else "true"
    return f"{head} <= {body}"


def render_system(sys: CHCSystem) -> str:
    return "\n".join(render_clause(c) for c in sys.clauses) + "\n"

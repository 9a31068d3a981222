"""Abstract syntax for the Cor language.

Cor is a small typed procedural language with Rust-style ownership:
every variable is a pointer (owning pointer, mutable reference or
immutable reference), control flow is unstructured (labeled statements
joined by gotos), and borrows are delimited by explicitly introduced
lifetime variables.

This module defines the type and instruction ASTs plus the structural
utilities the rest of the pipeline needs: memory size of a type,
completeness of recursive types, capture-avoiding substitution and a
canonical form for comparing types up to renaming of mu-binders.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Union

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

# Words that the surface grammar claims for itself; variables, labels and
# function names must avoid them.  `res` is claimed by the CHC translation
# for the result position of every predicate.
RESERVED_WORDS = frozenset(
    {
        "fn", "let", "mutbor", "drop", "immut", "swap", "copy", "as",
        "intro", "now", "return", "match", "goto", "rand",
        "inj0", "inj1", "mu", "own", "mut", "int", "unit", "bool",
        "true", "false", "box", "res",
    }
)


class CorError(Exception):
    """Base class for all errors raised by the corhorn pipeline."""


class InvalidName(CorError):
    pass


def check_ident(name: str, what: str = "identifier") -> str:
    if not IDENT_RE.match(name) or name in RESERVED_WORDS:
        raise InvalidName(f"bad {what}: {name!r}")
    return name


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

OWN = "own"
MUT = "mut"
IMMUT = "immut"


@dataclass(frozen=True)
class TypeVar:
    name: str


@dataclass(frozen=True)
class Mu:
    var: str
    body: "Type"


@dataclass(frozen=True)
class Ptr:
    kind: str  # OWN | MUT | IMMUT
    lft: Optional[str]  # None exactly when kind == OWN
    target: "Type"

    def __post_init__(self):
        assert (self.kind == OWN) == (self.lft is None)


@dataclass(frozen=True)
class Sum:
    left: "Type"
    right: "Type"


@dataclass(frozen=True)
class Prod:
    left: "Type"
    right: "Type"


@dataclass(frozen=True)
class IntT:
    pass


@dataclass(frozen=True)
class UnitT:
    pass


INT = IntT()
UNIT = UnitT()
BOOL = Sum(UNIT, UNIT)  # surface sugar: bool = unit + unit

Type = Union[TypeVar, Mu, Ptr, Sum, Prod, IntT, UnitT]


def own(t: Type) -> Ptr:
    return Ptr(OWN, None, t)


def mut(lft: str, t: Type) -> Ptr:
    return Ptr(MUT, lft, t)


def immut(lft: str, t: Type) -> Ptr:
    return Ptr(IMMUT, lft, t)


def subst_type(t: Type, var: str, repl: Type) -> Type:
    """t[repl/var], capture-avoiding for mu-binders."""
    if isinstance(t, TypeVar):
        return repl if t.name == var else t
    if isinstance(t, Mu):
        if t.var == var:
            return t
        if t.var in free_type_vars(repl):
            # rename the binder away from repl's free variables
            fresh = t.var
            taken = free_type_vars(repl) | free_type_vars(t.body)
            while fresh in taken:
                fresh += "_"
            body = subst_type(t.body, t.var, TypeVar(fresh))
            return Mu(fresh, subst_type(body, var, repl))
        return Mu(t.var, subst_type(t.body, var, repl))
    if isinstance(t, Ptr):
        return Ptr(t.kind, t.lft, subst_type(t.target, var, repl))
    if isinstance(t, Sum):
        return Sum(subst_type(t.left, var, repl), subst_type(t.right, var, repl))
    if isinstance(t, Prod):
        return Prod(subst_type(t.left, var, repl), subst_type(t.right, var, repl))
    return t


def free_type_vars(t: Type) -> frozenset[str]:
    if isinstance(t, TypeVar):
        return frozenset({t.name})
    if isinstance(t, Mu):
        return free_type_vars(t.body) - {t.var}
    if isinstance(t, Ptr):
        return free_type_vars(t.target)
    if isinstance(t, (Sum, Prod)):
        return free_type_vars(t.left) | free_type_vars(t.right)
    return frozenset()


def lifetimes_of(t: Type) -> frozenset[str]:
    """All lifetime variables occurring in t."""
    if isinstance(t, Ptr):
        base = frozenset() if t.lft is None else frozenset({t.lft})
        return base | lifetimes_of(t.target)
    if isinstance(t, Mu):
        return lifetimes_of(t.body)
    if isinstance(t, (Sum, Prod)):
        return lifetimes_of(t.left) | lifetimes_of(t.right)
    return frozenset()


def subst_lifetimes(t: Type, mapping: dict[str, str]) -> Type:
    if isinstance(t, Ptr):
        lft = mapping.get(t.lft, t.lft) if t.lft is not None else None
        return Ptr(t.kind, lft, subst_lifetimes(t.target, mapping))
    if isinstance(t, Mu):
        return Mu(t.var, subst_lifetimes(t.body, mapping))
    if isinstance(t, Sum):
        return Sum(subst_lifetimes(t.left, mapping), subst_lifetimes(t.right, mapping))
    if isinstance(t, Prod):
        return Prod(subst_lifetimes(t.left, mapping), subst_lifetimes(t.right, mapping))
    return t


def is_complete(t: Type) -> bool:
    """True iff every type variable is mu-bound and guarded by a pointer.

    A guarded variable sits under at least one pointer constructor
    somewhere between its binder and the occurrence, which is what makes
    the memory size of the type well defined.
    """

    def walk(u: Type, guarded: dict[str, bool]) -> bool:
        if isinstance(u, TypeVar):
            return guarded.get(u.name, False)
        if isinstance(u, Mu):
            inner = dict(guarded)
            inner[u.var] = False
            return walk(u.body, inner)
        if isinstance(u, Ptr):
            return walk(u.target, {v: True for v in guarded})
        if isinstance(u, (Sum, Prod)):
            return walk(u.left, guarded) and walk(u.right, guarded)
        return True

    return walk(t, {})


class IncompleteType(CorError):
    pass


@lru_cache(maxsize=None)
def size_of(t: Type) -> int:
    """Number of memory cells a value of type t occupies at the top level.

    Pointers and ints take one cell, unit takes none, a sum takes a tag
    cell plus the larger payload, a product concatenates its components.
    Recursive types unfold; termination relies on completeness (every
    recursive occurrence hides behind a pointer, which stops recursion).
    """
    if isinstance(t, (Ptr, IntT)):
        return 1
    if isinstance(t, UnitT):
        return 0
    if isinstance(t, Sum):
        return 1 + max(size_of(t.left), size_of(t.right))
    if isinstance(t, Prod):
        return size_of(t.left) + size_of(t.right)
    if isinstance(t, Mu):
        return size_of(subst_type(t.body, t.var, t))
    raise IncompleteType(f"size of incomplete type: {t}")


@lru_cache(maxsize=None)
def canon_type(t: Type) -> Type:
    """Rename mu-binders to position-derived names.

    The result is a canonical representative of the alpha-equivalence
    class, so structural equality on canon forms decides alpha-equality.
    Generated binder names use the reserved '!' character.
    """

    def walk(u: Type, env: dict[str, str], depth: int) -> Type:
        if isinstance(u, TypeVar):
            return TypeVar(env.get(u.name, u.name))
        if isinstance(u, Mu):
            name = f"X!{depth}"
            inner = dict(env)
            inner[u.var] = name
            return Mu(name, walk(u.body, inner, depth + 1))
        if isinstance(u, Ptr):
            return Ptr(u.kind, u.lft, walk(u.target, env, depth))
        if isinstance(u, Sum):
            return Sum(walk(u.left, env, depth), walk(u.right, env, depth))
        if isinstance(u, Prod):
            return Prod(walk(u.left, env, depth), walk(u.right, env, depth))
        return u

    return walk(t, {}, 0)


def unfold_mu(t: Mu) -> Type:
    return subst_type(t.body, t.var, t)


def whnf_type(t: Type) -> Type:
    """Unfold top-level mu-binders until a constructor appears."""
    while isinstance(t, Mu):
        t = unfold_mu(t)
    return t


# ---------------------------------------------------------------------------
# Constants and operators
# ---------------------------------------------------------------------------

# A constant is either an int or the unit value, modeled as the empty tuple.
Const = Union[int, tuple]
UNIT_CONST: tuple = ()

INT_OPS = ("+", "-", "*")
BOOL_OPS = (">=", "<=", "==", "!=", "<", ">")


def op_result_type(op: str) -> Type:
    if op in INT_OPS:
        return INT
    if op in BOOL_OPS:
        return BOOL
    raise CorError(f"unknown operator {op!r}")


def eval_op(op: str, a: int, b: int) -> int | bool:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == ">=":
        return a >= b
    if op == "<=":
        return a <= b
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == ">":
        return a > b
    raise CorError(f"unknown operator {op!r}")


# ---------------------------------------------------------------------------
# Instructions and statements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MutBor:
    """let y = mutbor 'a x"""
    y: str
    lft: str
    x: str


@dataclass(frozen=True)
class Drop:
    x: str


@dataclass(frozen=True)
class Immut:
    x: str


@dataclass(frozen=True)
class Swap:
    x: str
    y: str


@dataclass(frozen=True)
class MakePtr:
    """let *y = x"""
    y: str
    x: str


@dataclass(frozen=True)
class Deref:
    """let y = *x"""
    y: str
    x: str


@dataclass(frozen=True)
class CopyDeref:
    """let *y = copy *x"""
    y: str
    x: str


@dataclass(frozen=True)
class TypeWeaken:
    """x as T"""
    x: str
    ty: Type


@dataclass(frozen=True)
class Call:
    """let y = g<'a,...>(x0,...)"""
    y: str
    fn: str
    lfts: tuple[str, ...]
    args: tuple[str, ...]


@dataclass(frozen=True)
class IntroLft:
    lft: str


@dataclass(frozen=True)
class NowLft:
    lft: str


@dataclass(frozen=True)
class LftLeq:
    lo: str
    hi: str


@dataclass(frozen=True)
class ConstInstr:
    """let *y = c"""
    y: str
    value: Const


@dataclass(frozen=True)
class BinOpInstr:
    """let *y = *x op *x2"""
    y: str
    x: str
    op: str
    x2: str


@dataclass(frozen=True)
class RandInstr:
    """let *y = rand()"""
    y: str


@dataclass(frozen=True)
class InjInstr:
    """let *y = inj_i<T0+T1> *x"""
    y: str
    index: int
    sum_type: Sum
    x: str


@dataclass(frozen=True)
class MakePair:
    """let *y = (*x0, *x1)"""
    y: str
    x0: str
    x1: str


@dataclass(frozen=True)
class DestructPair:
    """let (*y0, *y1) = *x"""
    y0: str
    y1: str
    x: str


Instruction = Union[
    MutBor, Drop, Immut, Swap, MakePtr, Deref, CopyDeref, TypeWeaken,
    Call, IntroLft, NowLft, LftLeq, ConstInstr, BinOpInstr, RandInstr,
    InjInstr, MakePair, DestructPair,
]


def bound_vars(instr: Instruction) -> tuple[str, ...]:
    """Variables an instruction introduces (left-hand side of its let)."""
    if isinstance(instr, (MutBor, MakePtr, Deref, CopyDeref, Call, ConstInstr,
                          BinOpInstr, RandInstr, InjInstr, MakePair)):
        return (instr.y,)
    if isinstance(instr, DestructPair):
        return (instr.y0, instr.y1)
    return ()


@dataclass(frozen=True)
class StmtInstr:
    instr: Instruction
    goto: str


@dataclass(frozen=True)
class StmtReturn:
    x: str


@dataclass(frozen=True)
class StmtMatch:
    """match *x { inj0 *y0 => goto l0, inj1 *y1 => goto l1 }"""
    x: str
    y0: str
    l0: str
    y1: str
    l1: str


Statement = Union[StmtInstr, StmtReturn, StmtMatch]

ENTRY = "entry"


class ProgramError(CorError):
    """Structural (not type) error in a program: bad labels, duplicate
    definitions, unreachable code, incomplete signature types."""


@dataclass(frozen=True)
class FunctionDef:
    name: str
    lft_params: tuple[str, ...]
    lft_constraints: tuple[tuple[str, str], ...]  # (lo, hi) meaning lo <= hi
    params: tuple[tuple[str, Type], ...]
    ret: Type
    body: dict[str, Statement] = field(hash=False)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.body.keys())

    def statement(self, label: str) -> Statement:
        return self.body[label]

    def is_simple(self) -> bool:
        """A simple function takes no lifetime parameters; its boundary
        types then cannot mention references, so calls to it have a plain
        value-level input/output meaning."""
        return not self.lft_params


@dataclass(frozen=True)
class Program:
    functions: dict[str, FunctionDef] = field(hash=False)

    def __iter__(self) -> Iterable[FunctionDef]:
        return iter(self.functions.values())

    def fn(self, name: str) -> FunctionDef:
        return self.functions[name]


def successors(stmt: Statement) -> tuple[str, ...]:
    if isinstance(stmt, StmtInstr):
        return (stmt.goto,)
    if isinstance(stmt, StmtMatch):
        return (stmt.l0, stmt.l1)
    return ()


def validate_function(fn: FunctionDef) -> None:
    check_ident(fn.name, "function name")
    if len(set(fn.lft_params)) != len(fn.lft_params):
        raise ProgramError(f"{fn.name}: duplicate lifetime parameters")
    for lo, hi in fn.lft_constraints:
        if lo not in fn.lft_params or hi not in fn.lft_params:
            raise ProgramError(f"{fn.name}: constraint on unknown lifetime {lo} <= {hi}")
    names = [x for x, _ in fn.params]
    if len(set(names)) != len(names):
        raise ProgramError(f"{fn.name}: duplicate parameter names")
    for x, t in fn.params:
        check_ident(x, "parameter")
        if not (isinstance(t, Ptr) and is_complete(t)):
            raise ProgramError(f"{fn.name}: parameter {x} must have a complete pointer type")
    if not (isinstance(fn.ret, Ptr) and is_complete(fn.ret)):
        raise ProgramError(f"{fn.name}: return type must be a complete pointer type")
    if ENTRY not in fn.body:
        raise ProgramError(f"{fn.name}: missing entry label")
    for label, stmt in fn.body.items():
        check_ident(label, "label")
        for target in successors(stmt):
            if target not in fn.body:
                raise ProgramError(
                    f"{fn.name}: goto target {target!r} undefined (at {label})"
                )
        if isinstance(stmt, StmtInstr):
            bs = bound_vars(stmt.instr)
            if len(set(bs)) != len(bs):
                raise ProgramError(f"{fn.name}:{label}: bound variables must be distinct")
            if isinstance(stmt.instr, Swap) and stmt.instr.x == stmt.instr.y:
                raise ProgramError(f"{fn.name}:{label}: swap operands must be distinct")
            if isinstance(stmt.instr, MakePair) and stmt.instr.x0 == stmt.instr.x1:
                raise ProgramError(f"{fn.name}:{label}: pair operands must be distinct")
            if isinstance(stmt.instr, Call) and len(set(stmt.instr.args)) != len(stmt.instr.args):
                raise ProgramError(f"{fn.name}:{label}: call arguments must be distinct")
    # syntactic reachability from entry
    seen = {ENTRY}
    work = [ENTRY]
    while work:
        for target in successors(fn.body[work.pop()]):
            if target not in seen:
                seen.add(target)
                work.append(target)
    unreachable = set(fn.body) - seen
    if unreachable:
        raise ProgramError(f"{fn.name}: unreachable labels {sorted(unreachable)}")


def validate_program(prog: Program) -> None:
    for fn in prog:
        validate_function(fn)
    for fn in prog:
        for label, stmt in fn.body.items():
            if isinstance(stmt, StmtInstr) and isinstance(stmt.instr, Call):
                if stmt.instr.fn not in prog.functions:
                    raise ProgramError(
                        f"{fn.name}:{label}: call to undefined function {stmt.instr.fn!r}"
                    )

"""Pretty-printer producing the canonical .cor text form.

The output is deterministic and re-parses to a structurally equal
program, which is what the golden files rely on.
"""

from __future__ import annotations

from . import syntax as S


def type_text(t: S.Type) -> str:
    return _type(t, 0)


def _type(t: S.Type, prec: int) -> str:
    # precedence: 0 sum < 1 prod < 2 atom
    if t == S.BOOL:
        return "bool"
    if isinstance(t, S.Sum):
        s = f"{_type(t.left, 0)} + {_type(t.right, 1)}"
        return f"({s})" if prec > 0 else s
    if isinstance(t, S.Prod):
        s = f"{_type(t.left, 1)} * {_type(t.right, 2)}"
        return f"({s})" if prec > 1 else s
    if isinstance(t, S.Ptr):
        if t.kind == S.OWN:
            return f"own {_type(t.target, 2)}"
        return f"{t.kind}<'{t.lft}> {_type(t.target, 2)}"
    if isinstance(t, S.Mu):
        s = f"mu {t.var}. {_type(t.body, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(t, S.TypeVar):
        return t.name
    if isinstance(t, S.IntT):
        return "int"
    if isinstance(t, S.UnitT):
        return "unit"
    raise TypeError(f"not a type: {t!r}")


def instr_text(i: S.Instruction) -> str:
    if isinstance(i, S.MutBor):
        return f"let {i.y} = mutbor '{i.lft} {i.x}"
    if isinstance(i, S.Drop):
        return f"drop {i.x}"
    if isinstance(i, S.Immut):
        return f"immut {i.x}"
    if isinstance(i, S.Swap):
        return f"swap(*{i.x}, *{i.y})"
    if isinstance(i, S.MakePtr):
        return f"let *{i.y} = {i.x}"
    if isinstance(i, S.Deref):
        return f"let {i.y} = *{i.x}"
    if isinstance(i, S.CopyDeref):
        return f"let *{i.y} = copy *{i.x}"
    if isinstance(i, S.TypeWeaken):
        return f"{i.x} as {type_text(i.ty)}"
    if isinstance(i, S.Call):
        lfts = f"<{', '.join(chr(39) + l for l in i.lfts)}>" if i.lfts else ""
        return f"let {i.y} = {i.fn}{lfts}({', '.join(i.args)})"
    if isinstance(i, S.IntroLft):
        return f"intro '{i.lft}"
    if isinstance(i, S.NowLft):
        return f"now '{i.lft}"
    if isinstance(i, S.LftLeq):
        return f"'{i.lo} <= '{i.hi}"
    if isinstance(i, S.ConstInstr):
        lit = "()" if i.value == S.UNIT_CONST else str(i.value)
        return f"let *{i.y} = {lit}"
    if isinstance(i, S.BinOpInstr):
        return f"let *{i.y} = *{i.x} {i.op} *{i.x2}"
    if isinstance(i, S.RandInstr):
        return f"let *{i.y} = rand()"
    if isinstance(i, S.InjInstr):
        return f"let *{i.y} = inj{i.index}<{type_text(i.sum_type)}> *{i.x}"
    if isinstance(i, S.MakePair):
        return f"let *{i.y} = (*{i.x0}, *{i.x1})"
    if isinstance(i, S.DestructPair):
        return f"let (*{i.y0}, *{i.y1}) = *{i.x}"
    raise TypeError(f"not an instruction: {i!r}")


def stmt_text(s: S.Statement) -> str:
    if isinstance(s, S.StmtInstr):
        return f"{instr_text(s.instr)}; goto {s.goto};"
    if isinstance(s, S.StmtReturn):
        return f"return {s.x};"
    if isinstance(s, S.StmtMatch):
        return (
            f"match *{s.x} {{ inj0 *{s.y0} => goto {s.l0}, "
            f"inj1 *{s.y1} => goto {s.l1} }};"
        )
    raise TypeError(f"not a statement: {s!r}")


def function_text(fn: S.FunctionDef) -> str:
    sig = ""
    if fn.lft_params or fn.lft_constraints:
        parts = ", ".join(f"'{l}" for l in fn.lft_params)
        if fn.lft_constraints:
            cons = ", ".join(f"'{lo} <= '{hi}" for lo, hi in fn.lft_constraints)
            parts = f"{parts} | {cons}"
        sig = f"<{parts}>"
    params = ", ".join(f"{x}: {type_text(t)}" for x, t in fn.params)
    lines = [f"fn {fn.name}{sig}({params}) -> {type_text(fn.ret)} {{"]
    for label, stmt in fn.body.items():
        lines.append(f"  {label}: {stmt_text(stmt)}")
    lines.append("}")
    return "\n".join(lines)


def program_text(prog: S.Program) -> str:
    if not prog.functions:
        return ""
    return "\n\n".join(function_text(fn) for fn in prog) + "\n"

"""Pretty-printer for the surface AST; its output re-parses to an equal Model."""
from __future__ import annotations

from ..ir import ArraySort, BitVecSort, BoolSort, IntSort
from . import ast as A


def format_sort(sort) -> str:
    if isinstance(sort, BoolSort):
        return "boolean"
    if isinstance(sort, IntSort):
        return "integer"
    if isinstance(sort, BitVecSort):
        return f"bv{sort.width}"
    if isinstance(sort, ArraySort):
        return f"[{format_sort(sort.index)}]{format_sort(sort.element)}"
    raise TypeError(sort)


def _atomic(e) -> bool:
    return isinstance(e, (A.Name, A.IntLit, A.BoolLit, A.BVLit, A.Call, A.Index, A.Update, A.Extract))


def _wrap(e) -> str:
    s = format_expr(e)
    return s if _atomic(e) else f"({s})"


def format_expr(e) -> str:
    if isinstance(e, A.Name):
        return e.name
    if isinstance(e, A.IntLit):
        return str(e.value)
    if isinstance(e, A.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, A.BVLit):
        return f"{e.value}bv{e.width}"
    if isinstance(e, A.Unary):
        return f"{e.op}{_wrap(e.operand)}"
    if isinstance(e, A.Binary):
        return f"{_wrap(e.lhs)} {e.op} {_wrap(e.rhs)}"
    if isinstance(e, A.IfThenElse):
        return f"if ({format_expr(e.cond)}) then {_wrap(e.then)} else {_wrap(e.else_)}"
    if isinstance(e, A.Call):
        return f"{e.fname}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, A.Index):
        return f"{_wrap(e.base)}[{format_expr(e.index)}]"
    if isinstance(e, A.Update):
        return f"{_wrap(e.base)}[{format_expr(e.index)} -> {format_expr(e.value)}]"
    if isinstance(e, A.Extract):
        return f"{_wrap(e.base)}[{e.hi}:{e.lo}]"
    raise TypeError(e)


def _params(params) -> str:
    return ", ".join(f"{n}: {format_sort(s)}" for n, s in params)


def format_define(d: A.DefineDecl) -> str:
    return f"define {d.name}({_params(d.params)}): {format_sort(d.rsort)} = {format_expr(d.body)};"


def format_model(model: A.Model) -> str:
    out = [f"module {model.name} {{"]
    for d in model.state_vars:
        out.append(f"  var {d.name} : {format_sort(d.sort)};")
    for d in model.inputs:
        out.append(f"  input {d.name} : {format_sort(d.sort)};")
    for d in model.defines:
        out.append("  " + format_define(d))
    for f in model.synth_funs:
        head = f"  synthesis function {f.name}({_params(f.params)}): {format_sort(f.rsort)}"
        if f.grammar is None:
            out.append(head + ";")
        else:
            out.append(head + " grammar {")
            for rule in f.grammar:
                # '|' separates alternatives here, so every compound template is parenthesised
                alts = " | ".join(_wrap(t) for t in rule.templates)
                out.append(f"    {rule.nonterminal}: {format_sort(rule.sort)} ::= {alts};")
            out.append("  };")
    if model.init_block:
        out.append("  init {")
        out.extend(f"    {a.lhs} = {format_expr(a.rhs)};" for a in model.init_block)
        out.append("  }")
    if model.next_block:
        out.append("  next {")
        out.extend(f"    {a.lhs}' = {format_expr(a.rhs)};" for a in model.next_block)
        out.append("  }")
    for inv in model.invariants:
        out.append(f"  invariant {inv.label}: {format_expr(inv.expr)};")
    if model.control:
        out.append("  control {")
        for c in model.control:
            out.append(f"    {c.kind}({c.k});" if c.k is not None else f"    {c.kind};")
        out.append("  }")
    out.append("}")
    return "\n".join(out) + "\n"

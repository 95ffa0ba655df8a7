"""Untyped surface syntax tree produced by the parser.

Spans are excluded from equality so that structurally identical models
compare equal regardless of where they came from.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..ir import Sort
from .lexer import SourceSpan

_NOSPAN = SourceSpan("<none>", 1, 1, 0)


def _span():
    return field(default=_NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Name:
    name: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class IntLit:
    value: int
    span: SourceSpan = _span()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    span: SourceSpan = _span()


@dataclass(frozen=True)
class BVLit:
    value: int
    width: int
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Unary:
    op: str  # "!", "-", "~"
    operand: object
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Binary:
    op: str
    lhs: object
    rhs: object
    span: SourceSpan = _span()


@dataclass(frozen=True)
class IfThenElse:
    cond: object
    then: object
    else_: object
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Call:
    fname: str
    args: tuple
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Index:
    base: object
    index: object
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Update:
    base: object
    index: object
    value: object
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Extract:
    base: object
    hi: int
    lo: int
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Decl:
    name: str
    sort: Sort
    span: SourceSpan = _span()


@dataclass(frozen=True)
class DefineDecl:
    name: str
    params: tuple  # ((name, Sort), ...)
    rsort: Sort
    body: object
    span: SourceSpan = _span()


@dataclass(frozen=True)
class GrammarRule:
    nonterminal: str
    sort: Sort
    templates: tuple
    span: SourceSpan = _span()


@dataclass(frozen=True)
class SynthFunAst:
    name: str
    params: tuple
    rsort: Sort
    grammar: tuple | None = None  # (GrammarRule, ...)
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Assignment:
    lhs: str
    rhs: object
    span: SourceSpan = _span()


@dataclass(frozen=True)
class InvariantDecl:
    label: str
    expr: object
    span: SourceSpan = _span()


@dataclass(frozen=True)
class ControlCmd:
    kind: str  # bmc | induction | kinduction | synthesize | check
    k: int | None = None
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Model:
    name: str
    state_vars: tuple = ()
    inputs: tuple = ()
    defines: tuple = ()
    synth_funs: tuple = ()
    init_block: tuple = ()
    next_block: tuple = ()
    invariants: tuple = ()
    control: tuple = ()
    span: SourceSpan = _span()

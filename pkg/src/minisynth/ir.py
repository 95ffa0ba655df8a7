"""Sorted terms, function declarations and the operations over them.

Terms are immutable trees. Nothing here simplifies: ``mk_term`` only checks
operand sorts and computes the result sort.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .errors import SortError

MAX_BV_WIDTH = 64
MAX_ARRAY_DEPTH = 4


# ---------------------------------------------------------------------------
# Sorts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoolSort:
    def __str__(self) -> str:
        return "Bool"


@dataclass(frozen=True)
class IntSort:
    def __str__(self) -> str:
        return "Int"


@dataclass(frozen=True)
class BitVecSort:
    width: int

    def __post_init__(self):
        if not isinstance(self.width, int) or not 1 <= self.width <= MAX_BV_WIDTH:
            raise SortError(f"bit-vector width must be in 1..{MAX_BV_WIDTH}, got {self.width}")

    def __str__(self) -> str:
        return f"(_ BitVec {self.width})"


@dataclass(frozen=True)
class ArraySort:
    index: "Sort"
    element: "Sort"

    def __post_init__(self):
        if array_depth(self) > MAX_ARRAY_DEPTH:
            raise SortError(f"array nesting deeper than {MAX_ARRAY_DEPTH}")

    def __str__(self) -> str:
        return f"(Array {self.index} {self.element})"


Sort = Union[BoolSort, IntSort, BitVecSort, ArraySort]

BOOL = BoolSort()
INT = IntSort()


def array_depth(sort: Sort) -> int:
    if isinstance(sort, ArraySort):
        return 1 + max(array_depth(sort.index), array_depth(sort.element))
    return 0


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: Union[bool, int]
    sort: Sort

    def __post_init__(self):
        if isinstance(self.sort, BoolSort):
            if not isinstance(self.value, bool):
                raise SortError(f"Bool constant expects a bool, got {self.value!r}")
        elif isinstance(self.sort, IntSort):
            if isinstance(self.value, bool) or not isinstance(self.value, int):
                raise SortError(f"Int constant expects an int, got {self.value!r}")
        elif isinstance(self.sort, BitVecSort):
            if isinstance(self.value, bool) or not 0 <= self.value < (1 << self.sort.width):
                raise SortError(f"{self.value!r} does not fit in {self.sort}")
        else:
            raise SortError(f"no constants of sort {self.sort}")


@dataclass(frozen=True)
class Symbol:
    name: str
    sort: Sort


@dataclass(frozen=True)
class Apply:
    op: str
    args: tuple
    sort: Sort
    indices: tuple = ()


@dataclass(frozen=True)
class Ite:
    cond: "Term"
    then: "Term"
    else_: "Term"
    sort: Sort


FUN_KINDS = ("defined", "synth", "uninterpreted")


@dataclass(frozen=True)
class FunApp:
    name: str
    args: tuple
    sort: Sort
    kind: str = "defined"


Term = Union[Const, Symbol, Apply, Ite, FunApp]

TRUE = Const(True, BOOL)
FALSE = Const(False, BOOL)


def bool_const(value: bool) -> Const:
    return TRUE if value else FALSE


def int_const(value: int) -> Const:
    return Const(value, INT)


def bv_const(value: int, width: int) -> Const:
    return Const(value, BitVecSort(width))


# ---------------------------------------------------------------------------
# Function declarations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DefineFun:
    name: str
    params: tuple  # ((name, Sort), ...)
    rsort: Sort
    body: Term

    @property
    def param_sorts(self) -> tuple:
        return tuple(s for _, s in self.params)


@dataclass(frozen=True)
class Grammar:
    """Sorted nonterminals plus production templates.

    Nonterminals appear inside templates as ``Symbol``s carrying the
    nonterminal's sort. The first nonterminal is the start symbol.
    """

    nonterminals: tuple  # ((name, Sort), ...)
    productions: tuple  # ((name, (Term, ...)), ...), same order as nonterminals

    def rules(self, nonterminal: str) -> tuple:
        for name, templates in self.productions:
            if name == nonterminal:
                return templates
        raise KeyError(nonterminal)

    @property
    def start(self) -> tuple:
        return self.nonterminals[0]


@dataclass(frozen=True)
class SynthFunDecl:
    name: str
    params: tuple  # ((name, Sort), ...)
    rsort: Sort
    grammar: Grammar | None = field(default=None)

    def __post_init__(self):
        names = [n for n, _ in self.params]
        if len(set(names)) != len(names):
            raise SortError(f"synthesis function {self.name} has duplicate parameter names")
        if self.grammar is not None and self.grammar.start[1] != self.rsort:
            raise SortError(
                f"grammar start symbol of {self.name} has sort {self.grammar.start[1]}, expected {self.rsort}")

    @property
    def param_sorts(self) -> tuple:
        return tuple(s for _, s in self.params)


# ---------------------------------------------------------------------------
# Typing rules
# ---------------------------------------------------------------------------

BOOL_OPS = {"not", "and", "or", "=>"}
INT_OPS = {"+", "-", "*", "<=", "<", ">=", ">"}
BV_OPS = {"bvadd", "bvsub", "bvand", "bvor", "bvnot", "bvult", "bvule", "concat", "extract"}
ARRAY_OPS = {"select", "store"}
OPERATORS = BOOL_OPS | INT_OPS | BV_OPS | ARRAY_OPS | {"=", "ite"}


def _require(cond: bool, op: str, args, why: str):
    if not cond:
        shown = ", ".join(str(a.sort) for a in args)
        raise SortError(f"{op}: {why} (operand sorts: {shown})")


def mk_term(op: str, args: Iterable[Term], indices: tuple = ()) -> Term:
    """Build ``op(args)`` with its result sort, or raise SortError."""
    args = tuple(args)
    sorts = [a.sort for a in args]
    n = len(args)

    if op == "ite":
        _require(n == 3, op, args, "expects 3 operands")
        _require(sorts[0] == BOOL, op, args, "condition must be Bool")
        _require(sorts[1] == sorts[2], op, args, "branches must have the same sort")
        return Ite(args[0], args[1], args[2], sorts[1])
    if op == "not":
        _require(n == 1 and sorts[0] == BOOL, op, args, "expects one Bool")
        return Apply(op, args, BOOL)
    if op in ("and", "or"):
        _require(n >= 2 and all(s == BOOL for s in sorts), op, args, "expects two or more Bools")
        return Apply(op, args, BOOL)
    if op == "=>":
        _require(n == 2 and all(s == BOOL for s in sorts), op, args, "expects two Bools")
        return Apply(op, args, BOOL)
    if op == "=":
        _require(n == 2 and sorts[0] == sorts[1], op, args, "expects two operands of one sort")
        return Apply(op, args, BOOL)
    if op in ("+", "*"):
        _require(n >= 2 and all(s == INT for s in sorts), op, args, "expects two or more Ints")
        return Apply(op, args, INT)
    if op == "-":
        _require(n in (1, 2) and all(s == INT for s in sorts), op, args, "expects one or two Ints")
        return Apply(op, args, INT)
    if op in ("<=", "<", ">=", ">"):
        _require(n == 2 and all(s == INT for s in sorts), op, args, "expects two Ints")
        return Apply(op, args, BOOL)
    if op in ("bvadd", "bvsub", "bvand", "bvor"):
        _require(n == 2 and isinstance(sorts[0], BitVecSort) and sorts[0] == sorts[1],
                 op, args, "expects two bit-vectors of equal width")
        return Apply(op, args, sorts[0])
    if op == "bvnot":
        _require(n == 1 and isinstance(sorts[0], BitVecSort), op, args, "expects one bit-vector")
        return Apply(op, args, sorts[0])
    if op in ("bvult", "bvule"):
        _require(n == 2 and isinstance(sorts[0], BitVecSort) and sorts[0] == sorts[1],
                 op, args, "expects two bit-vectors of equal width")
        return Apply(op, args, BOOL)
    if op == "concat":
        _require(n == 2 and all(isinstance(s, BitVecSort) for s in sorts), op, args, "expects two bit-vectors")
        return Apply(op, args, BitVecSort(sorts[0].width + sorts[1].width))
    if op == "extract":
        _require(n == 1 and isinstance(sorts[0], BitVecSort), op, args, "expects one bit-vector")
        if len(indices) != 2:
            raise SortError("extract: expects indices (hi, lo)")
        hi, lo = indices
        if not 0 <= lo <= hi < sorts[0].width:
            raise SortError(f"extract: indices [{hi}:{lo}] out of range for {sorts[0]}")
        return Apply(op, args, BitVecSort(hi - lo + 1), (hi, lo))
    if op == "select":
        _require(n == 2 and isinstance(sorts[0], ArraySort) and sorts[0].index == sorts[1],
                 op, args, "expects an array and an index of its index sort")
        return Apply(op, args, sorts[0].element)
    if op == "store":
        _require(n == 3 and isinstance(sorts[0], ArraySort) and sorts[0].index == sorts[1]
                 and sorts[0].element == sorts[2], op, args, "expects array, index and element")
        return Apply(op, args, sorts[0])
    raise SortError(f"unknown operator {op!r}")


def apply_fun(name: str, params_sorts: tuple, rsort: Sort, args: Iterable[Term], kind: str) -> FunApp:
    """Apply a declared function, checking arity and argument sorts."""
    args = tuple(args)
    if len(args) != len(params_sorts):
        raise SortError(f"{name} expects {len(params_sorts)} argument(s), got {len(args)}")
    for i, (a, s) in enumerate(zip(args, params_sorts)):
        if a.sort != s:
            raise SortError(f"{name}: argument {i + 1} has sort {a.sort}, expected {s}")
    if kind not in FUN_KINDS:
        raise ValueError(kind)
    return FunApp(name, args, rsort, kind)


def conjoin(terms: Iterable[Term]) -> Term:
    """Conjunction of ``terms`` with nested ``and``s flattened; ``true`` if empty."""
    flat = []
    for t in terms:
        if isinstance(t, Apply) and t.op == "and":
            flat.extend(t.args)
        else:
            flat.append(t)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return mk_term("and", flat)


# ---------------------------------------------------------------------------
# Traversals
# ---------------------------------------------------------------------------

def children(term: Term) -> tuple:
    if isinstance(term, (Apply, FunApp)):
        return term.args
    if isinstance(term, Ite):
        return (term.cond, term.then, term.else_)
    return ()


def rebuild(term: Term, new_children: tuple) -> Term:
    if isinstance(term, Apply):
        return Apply(term.op, tuple(new_children), term.sort, term.indices)
    if isinstance(term, FunApp):
        return FunApp(term.name, tuple(new_children), term.sort, term.kind)
    if isinstance(term, Ite):
        return Ite(*new_children, term.sort)
    return term


def iter_subterms(term: Term):
    stack = [term]
    while stack:
        t = stack.pop()
        yield t
        stack.extend(reversed(children(t)))


def substitute(term: Term, binding: Mapping[str, Term]) -> Term:
    """Simultaneously replace symbols by terms.

    Terms contain no binders, so the substitution is trivially capture-free.
    """
    if not binding:
        return term

    def go(t: Term) -> Term:
        if isinstance(t, Symbol):
            repl = binding.get(t.name)
            if repl is None:
                return t
            if repl.sort != t.sort:
                raise SortError(f"cannot substitute {t.name}: {t.sort} with a term of sort {repl.sort}")
            return repl
        kids = children(t)
        if not kids:
            return t
        new = tuple(go(k) for k in kids)
        if all(a is b for a, b in zip(new, kids)):
            return t
        return rebuild(t, new)

    return go(term)


def free_symbols(term: Term) -> set:
    """Set of ``(name, sort)`` for every Symbol leaf. Function names are not symbols."""
    return {(t.name, t.sort) for t in iter_subterms(term) if isinstance(t, Symbol)}


def fun_names(term: Term, kind: str | None = None) -> set:
    return {t.name for t in iter_subterms(term)
            if isinstance(t, FunApp) and (kind is None or t.kind == kind)}


def inline_functions(term: Term, defs: Mapping[str, DefineFun]) -> Term:
    """Replace every application of a function in ``defs`` by its body.

    Bodies may themselves call other functions in ``defs``; those are
    inlined as well. Recursion is not supported (the frontend forbids it).
    """
    if not defs:
        return term

    def go(t: Term) -> Term:
        kids = children(t)
        new = tuple(go(k) for k in kids)
        if isinstance(t, FunApp) and t.name in defs:
            d = defs[t.name]
            body = substitute(d.body, {p: a for (p, _), a in zip(d.params, new)})
            return go(body)
        if kids and any(a is not b for a, b in zip(new, kids)):
            return rebuild(t, new)
        return t

    return go(term)


def recompute_sort(term: Term) -> Sort:
    """Re-derive the sort of ``term`` bottom-up from the typing rules."""
    if isinstance(term, (Const, Symbol)):
        return term.sort
    if isinstance(term, FunApp):
        for a in term.args:
            recompute_sort(a)
        return term.sort
    if isinstance(term, Ite):
        return mk_term("ite", [_resorted(k) for k in children(term)]).sort
    return mk_term(term.op, [_resorted(k) for k in term.args], term.indices).sort


def _resorted(term: Term) -> Term:
    s = recompute_sort(term)
    if s != term.sort:
        raise SortError(f"annotation {term.sort} disagrees with recomputed sort {s}")
    return term


def smt_sort(sort: Sort) -> str:
    return str(sort)

from __future__ import annotations

from dataclasses import dataclass

from ..errors import SortError, TypeCheckError
from ..ir import (BOOL, BitVecSort, DefineFun, Grammar, Symbol,
                  SynthFunDecl, apply_fun, bool_const, bv_const, int_const,
                  mk_term)
from . import ast as A
from .lexer import SourceSpan


@dataclass(frozen=True)
class TypeError_:
    message: str
    span: SourceSpan

    def __str__(self) -> str:
        return f"{self.span}: {self.message}"


@dataclass(frozen=True)
class TypedModel:
    name: str
    state_vars: tuple  # ((name, Sort), ...)
    inputs: tuple
    defines: dict  # name -> DefineFun
    synth_funs: dict  # name -> SynthFunDecl
    init: tuple  # ((name, Term), ...)
    next: tuple
    invariants: tuple  # ((label, Term), ...)
    control: tuple  # (ControlCmd, ...)

    @property
    def proof_commands(self) -> tuple:
        return tuple(c for c in self.control if c.kind in ("bmc", "induction", "kinduction"))

    @property
    def wants_synthesis(self) -> bool:
        return any(c.kind == "synthesize" for c in self.control)

    def sort_of(self, name: str):
        return dict(self.state_vars + self.inputs)[name]


class _Failed(Exception):
    pass


# surface operator -> (Int operator, BitVec operator, swap operands for BitVec)
_ARITH = {
    "+": ("+", "bvadd", False),
    "-": ("-", "bvsub", False),
    "*": ("*", None, False),
    "<": ("<", "bvult", False),
    "<=": ("<=", "bvule", False),
    ">": (">", "bvult", True),
    ">=": (">=", "bvule", True),
}
_LOGIC = {"&&": "and", "||": "or", "==>": "=>"}
_BITWISE = {"&": "bvand", "|": "bvor", "++": "concat"}


class _Checker:
    def __init__(self, model: A.Model):
        self.model = model
        self.errors: list[TypeError_] = []
        self.defines: dict = {}
        self.synths: dict = {}

    def err(self, message: str, span: SourceSpan):
        self.errors.append(TypeError_(message, span))

    def run(self) -> TypedModel:
        m = self.model
        seen: dict = {}
        for kind, items in (("state variable", m.state_vars), ("input", m.inputs),
                            ("function", m.defines), ("synthesis function", m.synth_funs)):
            for d in items:
                if d.name in seen:
                    self.err(f"{kind} {d.name} clashes with an earlier declaration", d.span)
                seen[d.name] = kind
        labels = set()
        for inv in m.invariants:
            if inv.label in labels:
                self.err(f"duplicate invariant label {inv.label}", inv.span)
            labels.add(inv.label)

        for f in m.synth_funs:
            self._synth_fun(f)
        for d in m.defines:
            self._define(d)

        scope = {d.name: Symbol(d.name, d.sort) for d in m.state_vars + m.inputs}
        state_sorts = {d.name: d.sort for d in m.state_vars}
        init = self._block(m.init_block, scope, state_sorts, "init")
        nxt = self._block(m.next_block, scope, state_sorts, "next")
        invariants = []
        for inv in m.invariants:
            t = self._typed(inv.expr, scope)
            if t is not None:
                if t.sort != BOOL:
                    self.err(f"invariant {inv.label} has sort {t.sort}, expected Bool", inv.span)
                invariants.append((inv.label, t))

        if self.errors:
            raise TypeCheckError(self.errors)
        return TypedModel(
            name=m.name,
            state_vars=tuple((d.name, d.sort) for d in m.state_vars),
            inputs=tuple((d.name, d.sort) for d in m.inputs),
            defines=self.defines,
            synth_funs=self.synths,
            init=tuple(init),
            next=tuple(nxt),
            invariants=tuple(invariants),
            control=m.control,
        )

    def _params_ok(self, params, span) -> bool:
        names = [n for n, _ in params]
        if len(set(names)) != len(names):
            self.err("duplicate parameter names", span)
            return False
        return True

    def _synth_fun(self, f: A.SynthFunAst):
        if not self._params_ok(f.params, f.span):
            return
        grammar = None
        if f.grammar is not None:
            nts = [(r.nonterminal, r.sort) for r in f.grammar]
            names = [n for n, _ in nts]
            param_names = {n for n, _ in f.params}
            ok = True
            if len(set(names)) != len(names):
                self.err(f"grammar of {f.name} declares a nonterminal twice", f.span)
                ok = False
            for r in f.grammar:
                if r.nonterminal in param_names:
                    self.err(f"nonterminal {r.nonterminal} shadows a parameter", r.span)
                    ok = False
            if nts[0][1] != f.rsort:
                self.err(f"grammar start symbol {nts[0][0]} must have the return sort", f.grammar[0].span)
                ok = False
            scope = {n: Symbol(n, s) for n, s in f.params}
            scope.update({n: Symbol(n, s) for n, s in nts})
            productions = []
            for r in f.grammar:
                templates = []
                for t in r.templates:
                    typed = self._typed(t, scope, allow_calls=False)
                    if typed is None:
                        ok = False
                    elif typed.sort != r.sort:
                        self.err(f"production for {r.nonterminal} has sort {typed.sort}, expected {r.sort}",
                                 getattr(t, "span", r.span))
                        ok = False
                    else:
                        templates.append(typed)
                productions.append((r.nonterminal, tuple(templates)))
            if not ok:
                return
            grammar = Grammar(tuple(nts), tuple(productions))
        self.synths[f.name] = SynthFunDecl(f.name, tuple(f.params), f.rsort, grammar)

    def _define(self, d: A.DefineDecl):
        if not self._params_ok(d.params, d.span):
            return
        scope = {n: Symbol(n, s) for n, s in d.params}
        body = self._typed(d.body, scope)
        if body is None:
            return
        if body.sort != d.rsort:
            self.err(f"body of {d.name} has sort {body.sort}, expected {d.rsort}", d.span)
            return
        self.defines[d.name] = DefineFun(d.name, tuple(d.params), d.rsort, body)

    def _block(self, block, scope, state_sorts, which):
        out = []
        assigned = set()
        for a in block:
            if a.lhs not in state_sorts:
                self.err(f"{a.lhs} is not a state variable", a.span)
                continue
            if a.lhs in assigned:
                self.err(f"{a.lhs} assigned twice in {which} block", a.span)
                continue
            assigned.add(a.lhs)
            rhs = self._typed(a.rhs, scope)
            if rhs is None:
                continue
            if rhs.sort != state_sorts[a.lhs]:
                self.err(f"cannot assign {rhs.sort} to {a.lhs}: {state_sorts[a.lhs]}", a.span)
                continue
            out.append((a.lhs, rhs))
        return out

    def _typed(self, e, scope, allow_calls=True):
        try:
            return self._expr(e, scope, allow_calls)
        except _Failed:
            return None

    def _fail(self, message, e):
        self.err(message, e.span)
        raise _Failed

    def _expr(self, e, scope, allow_calls):
        def sub(x):
            return self._expr(x, scope, allow_calls)

        def build(op, args, indices=()):
            try:
                return mk_term(op, args, indices)
            except SortError as exc:
                self._fail(str(exc), e)

        if isinstance(e, A.IntLit):
            return int_const(e.value)
        if isinstance(e, A.BoolLit):
            return bool_const(e.value)
        if isinstance(e, A.BVLit):
            return bv_const(e.value, e.width)
        if isinstance(e, A.Name):
            if e.name in scope:
                return scope[e.name]
            if e.name in self.defines or e.name in self.synths:
                self._fail(f"function {e.name} used without arguments", e)
            self._fail(f"unknown identifier {e.name}", e)
        if isinstance(e, A.Unary):
            if e.op == "-" and isinstance(e.operand, A.IntLit):
                return int_const(-e.operand.value)
            x = sub(e.operand)
            if e.op == "!":
                return build("not", [x])
            if e.op == "~":
                return build("bvnot", [x])
            return build("-", [x])
        if isinstance(e, A.Binary):
            lhs, rhs = sub(e.lhs), sub(e.rhs)
            if e.op in _LOGIC:
                return build(_LOGIC[e.op], [lhs, rhs])
            if e.op == "==":
                return build("=", [lhs, rhs])
            if e.op == "!=":
                return build("not", [build("=", [lhs, rhs])])
            if e.op in _BITWISE:
                return build(_BITWISE[e.op], [lhs, rhs])
            int_op, bv_op, swap = _ARITH[e.op]
            if isinstance(lhs.sort, BitVecSort) and bv_op is not None:
                return build(bv_op, [rhs, lhs] if swap else [lhs, rhs])
            return build(int_op, [lhs, rhs])
        if isinstance(e, A.IfThenElse):
            return build("ite", [sub(e.cond), sub(e.then), sub(e.else_)])
        if isinstance(e, A.Index):
            return build("select", [sub(e.base), sub(e.index)])
        if isinstance(e, A.Update):
            return build("store", [sub(e.base), sub(e.index), sub(e.value)])
        if isinstance(e, A.Extract):
            return build("extract", [sub(e.base)], (e.hi, e.lo))
        if isinstance(e, A.Call):
            if not allow_calls:
                self._fail(f"function call {e.fname}(...) not allowed in a grammar", e)
            args = [sub(a) for a in e.args]
            if e.fname in self.synths:
                d, kind = self.synths[e.fname], "synth"
            elif e.fname in self.defines:
                d, kind = self.defines[e.fname], "defined"
            elif e.fname in scope:
                self._fail(f"{e.fname} is not a function", e)
            else:
                self._fail(f"unknown function {e.fname}", e)
            try:
                return apply_fun(d.name, d.param_sorts, d.rsort, args, kind)
            except SortError as exc:
                self._fail(str(exc), e)
        raise TypeError(e)


def typecheck(model: A.Model) -> TypedModel:
    """Resolve names and sorts; raise TypeCheckError listing every problem found."""
    return _Checker(model).run()


"""Recursive-descent parser for MiniUCL.

Grammar (informal)::

    model   := 'module' ID '{' decl* '}'
    decl    := ('var' | 'input') ID (',' ID)* ':' type ';'
             | 'define' ID '(' params? ')' ':' type '=' expr ';'
             | 'synthesis' 'function' ID '(' params? ')' ':' type grammar? ';'
             | 'init' '{' (ID '=' expr ';')* '}'
             | 'next' '{' (ID "'" '=' expr ';')* '}'
             | 'invariant' ID ':' expr ';'
             | 'control' '{' (ctrl ';')* '}'
    grammar := 'grammar' '{' (ID ':' type '::=' expr ('|' expr)* ';')+ '}'
    type    := 'boolean' | 'integer' | 'bv'N | '[' type ']' type

Binary operators, loosest first: ``==>`` (right-assoc), ``||``, ``&&``,
``== !=``, ``< <= > >=``, ``|``, ``&``, ``++``, ``+ -``, ``*``. Inside a
grammar production ``|`` separates alternatives, so bitwise-or must be
parenthesised there.
"""
from __future__ import annotations

import re

from ..errors import ParseError, SortError
from ..ir import BOOL, INT, ArraySort, BitVecSort
from . import ast as A
from .lexer import PUNCTUATION, SourceSpan, Token, tokenize

# Names that would need quoting, or clash with operators, in emitted SMT-LIB/SyGuS text.
SMT_RESERVED = frozenset({
    "and", "or", "not", "xor", "ite", "distinct", "let", "forall", "exists", "match", "par",
    "select", "store", "concat", "extract", "true", "false", "Int", "Bool", "Array", "BitVec",
    "bvadd", "bvsub", "bvand", "bvor", "bvnot", "bvult", "bvule", "bvneg", "bvmul",
    "div", "mod", "abs", "Constant", "Variable", "as",
})

_KIND_TEXT = {kind: f"'{text}'" for text, kind in PUNCTUATION}

CONTROL_KINDS = ("bmc", "induction", "kinduction", "synthesize", "check")

_BINARY_LEVELS = [
    # (token kinds, allowed inside a grammar production)
    ({"or"}, True),
    ({"and"}, True),
    ({"eq", "neq"}, True),
    ({"lt", "le", "gt", "ge"}, True),
    ({"bar"}, False),
    ({"bvand"}, True),
    ({"concat"}, True),
    ({"plus", "minus"}, True),
    ({"star"}, True),
]


class Parser:
    def __init__(self, tokens: list[Token], allow_synthesis: bool = True):
        self.tokens = tokens
        self.pos = 0
        self.allow_synthesis = allow_synthesis
        self._grammar_mode = False

    # -- token helpers ---------------------------------------------------

    def peek(self, offset: int = 0) -> Token | None:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def _eof_span(self) -> SourceSpan:
        if self.tokens:
            last = self.tokens[-1].span
            return SourceSpan(last.file, last.line, last.column + last.length, 0)
        return SourceSpan("<input>", 1, 1, 0)

    def error(self, expected: str, tok: Token | None = None):
        tok = tok if tok is not None else self.peek()
        if tok is None:
            raise ParseError(f"expected {expected}, found end of input", self._eof_span(), expected, "EOF")
        raise ParseError(f"expected {expected}, found {tok.text!r}", tok.span, expected, tok.text)

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == kind and (text is None or tok.text == text)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            tok = self.tokens[self.pos]
            self.pos += 1
            return tok
        return None

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        tok = self.accept(kind, text)
        if tok is None:
            self.error(what or (f"'{text}'" if text else _KIND_TEXT.get(kind, kind)))
        return tok

    def ident(self, what: str = "identifier") -> Token:
        tok = self.expect("ident", what=what)
        if tok.text in SMT_RESERVED:
            raise ParseError(f"{tok.text!r} is reserved", tok.span, what, tok.text)
        return tok

    # -- declarations ----------------------------------------------------

    def parse_model(self) -> A.Model:
        start = self.expect("kw", "module")
        name = self.ident("module name").text
        self.expect("lbrace")
        parts = {k: [] for k in ("state_vars", "inputs", "defines", "synth_funs", "invariants")}
        blocks: dict = {}
        control = None
        while not self.at("rbrace"):
            tok = self.peek()
            if tok is None:
                self.error("'}'")
            if self.accept("kw", "var"):
                parts["state_vars"].extend(self._decl_list())
            elif self.accept("kw", "input"):
                parts["inputs"].extend(self._decl_list())
            elif self.accept("kw", "define"):
                parts["defines"].append(self._define(tok))
            elif self.at("kw", "synthesis"):
                if not self.allow_synthesis:
                    raise ParseError("synthesis functions are not enabled", tok.span, "declaration", tok.text)
                self.pos += 1
                self.expect("kw", "function")
                parts["synth_funs"].append(self._synth_fun(tok))
            elif self.at("kw", "init") or self.at("kw", "next"):
                self.pos += 1
                if tok.text in blocks:
                    raise ParseError(f"duplicate {tok.text} block", tok.span)
                blocks[tok.text] = self._block(primed=tok.text == "next")
            elif self.accept("kw", "invariant"):
                label = self.ident("invariant label").text
                self.expect("colon")
                expr = self.expr()
                self.expect("semi")
                parts["invariants"].append(A.InvariantDecl(label, expr, tok.span))
            elif self.accept("kw", "control"):
                if control is not None:
                    raise ParseError("duplicate control block", tok.span)
                control = self._control()
            else:
                self.error("declaration")
        self.expect("rbrace")
        if self.peek() is not None:
            self.error("end of input")
        return A.Model(
            name=name,
            state_vars=tuple(parts["state_vars"]),
            inputs=tuple(parts["inputs"]),
            defines=tuple(parts["defines"]),
            synth_funs=tuple(parts["synth_funs"]),
            init_block=tuple(blocks.get("init", ())),
            next_block=tuple(blocks.get("next", ())),
            invariants=tuple(parts["invariants"]),
            control=tuple(control or ()),
            span=start.span,
        )

    def _decl_list(self) -> list[A.Decl]:
        names = [self.ident()]
        while self.accept("comma"):
            names.append(self.ident())
        self.expect("colon")
        sort = self.sort()
        self.expect("semi")
        return [A.Decl(t.text, sort, t.span) for t in names]

    def _params(self) -> tuple:
        self.expect("lparen")
        params = []
        if not self.at("rparen"):
            while True:
                name = self.ident("parameter name").text
                self.expect("colon")
                params.append((name, self.sort()))
                if not self.accept("comma"):
                    break
        self.expect("rparen")
        return tuple(params)

    def _define(self, start: Token) -> A.DefineDecl:
        name = self.ident("function name").text
        params = self._params()
        self.expect("colon")
        rsort = self.sort()
        self.expect("assign", what="'='")
        body = self.expr()
        self.expect("semi")
        return A.DefineDecl(name, params, rsort, body, start.span)

    def _synth_fun(self, start: Token) -> A.SynthFunAst:
        name = self.ident("function name").text
        params = self._params()
        self.expect("colon")
        rsort = self.sort()
        grammar = None
        if self.accept("kw", "grammar"):
            grammar = self._grammar()
        self.expect("semi")
        return A.SynthFunAst(name, params, rsort, grammar, start.span)

    def _grammar(self) -> tuple:
        self.expect("lbrace")
        rules = []
        while not self.at("rbrace"):
            nt = self.ident("nonterminal")
            self.expect("colon")
            sort = self.sort()
            self.expect("produces", what="'::='")
            saved, self._grammar_mode = self._grammar_mode, True
            try:
                templates = [self.expr()]
                while self.accept("bar"):
                    templates.append(self.expr())
            finally:
                self._grammar_mode = saved
            self.expect("semi")
            rules.append(A.GrammarRule(nt.text, sort, tuple(templates), nt.span))
        if not rules:
            self.error("nonterminal")
        self.expect("rbrace")
        return tuple(rules)

    def _block(self, primed: bool) -> list[A.Assignment]:
        self.expect("lbrace")
        out = []
        while not self.accept("rbrace"):
            lhs = self.ident("state variable")
            if primed:
                self.expect("prime", what="\"'\"")
            self.expect("assign", what="'='")
            rhs = self.expr()
            self.expect("semi")
            out.append(A.Assignment(lhs.text, rhs, lhs.span))
        return out

    def _control(self) -> list[A.ControlCmd]:
        self.expect("lbrace")
        cmds = []
        while not self.accept("rbrace"):
            tok = self.expect("ident", what="control command")
            if tok.text not in CONTROL_KINDS:
                self.error("one of " + ", ".join(CONTROL_KINDS), tok)
            k = None
            if tok.text in ("bmc", "kinduction"):
                self.expect("lparen")
                num = self.expect("int", what="bound")
                k = int(num.text)
                if k < 1:
                    raise ParseError("bound must be positive", num.span, "positive integer", num.text)
                self.expect("rparen")
            self.expect("semi")
            cmds.append(A.ControlCmd(tok.text, k, tok.span))
        proofs = [c for c in cmds if c.kind in ("induction", "kinduction")]
        if len(proofs) > 1:
            raise ParseError("at most one induction or kinduction command per control block", proofs[1].span)
        return cmds

    # -- sorts -----------------------------------------------------------

    def sort(self):
        start = self.accept("lbrack")
        if start:
            index = self.sort()
            self.expect("rbrack")
            element = self.sort()
            try:
                return ArraySort(index, element)
            except SortError as e:
                raise ParseError(str(e), start.span, "type", start.text) from None
        tok = self.expect("ident", what="type")
        if tok.text == "boolean":
            return BOOL
        if tok.text == "integer":
            return INT
        m = re.fullmatch(r"bv([0-9]+)", tok.text)
        if m:
            try:
                return BitVecSort(int(m.group(1)))
            except SortError as e:
                raise ParseError(str(e), tok.span, "type", tok.text) from None
        self.error("type", tok)

    # -- expressions -----------------------------------------------------

    def expr(self):
        lhs = self._binary(0)
        tok = self.accept("implies")
        if tok:
            return A.Binary("==>", lhs, self.expr(), tok.span)
        return lhs

    def _binary(self, level: int):
        if level == len(_BINARY_LEVELS):
            return self._unary()
        kinds, in_grammar = _BINARY_LEVELS[level]
        lhs = self._binary(level + 1)
        while True:
            tok = self.peek()
            if tok is None or tok.kind not in kinds or (self._grammar_mode and not in_grammar):
                return lhs
            self.pos += 1
            rhs = self._binary(level + 1)
            lhs = A.Binary(tok.text, lhs, rhs, tok.span)
            if tok.kind in ("eq", "neq", "lt", "le", "gt", "ge"):
                # comparisons do not chain
                return lhs

    def _unary(self):
        tok = self.peek()
        if tok is not None and tok.kind in ("not", "minus", "tilde"):
            self.pos += 1
            return A.Unary(tok.text, self._unary(), tok.span)
        return self._postfix()

    def _postfix(self):
        e = self._primary()
        while True:
            tok = self.accept("lbrack")
            if tok is None:
                return e
            if self.at("int") and self.peek(1) is not None and self.peek(1).kind == "colon":
                hi = int(self.expect("int").text)
                self.expect("colon")
                lo = int(self.expect("int", what="low index").text)
                self.expect("rbrack")
                e = A.Extract(e, hi, lo, tok.span)
                continue
            saved, self._grammar_mode = self._grammar_mode, False
            try:
                index = self.expr()
                if self.accept("arrow"):
                    value = self.expr()
                    self.expect("rbrack")
                    e = A.Update(e, index, value, tok.span)
                else:
                    self.expect("rbrack")
                    e = A.Index(e, index, tok.span)
            finally:
                self._grammar_mode = saved

    def _primary(self):
        tok = self.peek()
        if tok is None:
            self.error("expression")
        if tok.kind == "int":
            self.pos += 1
            return A.IntLit(int(tok.text), tok.span)
        if tok.kind == "bv":
            self.pos += 1
            value, width = (int(x) for x in tok.text.split("bv"))
            if not 1 <= width <= 64 or value >= (1 << width):
                raise ParseError(f"bit-vector literal {tok.text} out of range", tok.span)
            return A.BVLit(value, width, tok.span)
        if tok.kind == "kw" and tok.text in ("true", "false"):
            self.pos += 1
            return A.BoolLit(tok.text == "true", tok.span)
        if tok.kind == "kw" and tok.text == "if":
            self.pos += 1
            self.expect("lparen")
            saved, self._grammar_mode = self._grammar_mode, False
            try:
                cond = self.expr()
            finally:
                self._grammar_mode = saved
            self.expect("rparen")
            self.expect("kw", "then")
            then = self.expr()
            self.expect("kw", "else")
            else_ = self.expr()
            return A.IfThenElse(cond, then, else_, tok.span)
        if tok.kind == "lparen":
            self.pos += 1
            saved, self._grammar_mode = self._grammar_mode, False
            try:
                e = self.expr()
            finally:
                self._grammar_mode = saved
            self.expect("rparen")
            return e
        if tok.kind == "ident":
            name = self.ident()
            if self.accept("lparen"):
                args = []
                if not self.at("rparen"):
                    saved, self._grammar_mode = self._grammar_mode, False
                    try:
                        args.append(self.expr())
                        while self.accept("comma"):
                            args.append(self.expr())
                    finally:
                        self._grammar_mode = saved
                self.expect("rparen")
                return A.Call(name.text, tuple(args), name.span)
            return A.Name(name.text, name.span)
        self.error("expression")


def parse(tokens: list[Token], allow_synthesis: bool = True) -> A.Model:
    return Parser(tokens, allow_synthesis).parse_model()


def parse_source(source: str, file: str = "<input>", allow_synthesis: bool = True) -> A.Model:
    return parse(tokenize(source, file), allow_synthesis)


def parse_define(source: str, file: str = "<input>") -> A.DefineDecl:
    """Parse a single ``define f(...): T = e;`` declaration."""
    p = Parser(tokenize(source, file))
    start = p.expect("kw", "define")
    d = p._define(start)
    if p.peek() is not None:
        p.error("end of input")
    return d

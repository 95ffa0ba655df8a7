"""Lower verification conditions to SYNTH-LIB, rewrite to SyGuS-IF, print text.

Rewrite rules applied by :func:`rewrite_to_sygus`:

1. ``(assert a)`` becomes ``(constraint (not a))``
2. ``(declare-const a s)`` becomes ``(declare-var a s)`` (zero arity only)
3. ``synth-blocking-fun`` becomes ``synth-fun``, grammar preserved
4. ``check-sat`` becomes ``check-synth``

Variables of the i-th script are renamed with a ``q{i}_`` prefix so the
merged query quantifies over the disjoint union of all per-query variables.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .errors import EmitError, ScriptError
from .ir import (BOOL, Apply, ArraySort, BitVecSort, BoolSort, Const, DefineFun,
                 FunApp, IntSort, Ite, Sort, Symbol, SynthFunDecl, Term,
                 iter_subterms, mk_term, substitute)
from .symsim import VerificationCondition
from .synthlib import (Assert, CheckSat, DeclareConst, DeclareFun, SetLogic,
                       SynthBlockingFun, SynthLibScript)

# ---------------------------------------------------------------------------
# SyGuS data model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeclareVar:
    name: str
    sort: Sort


@dataclass(frozen=True)
class SynthFun:
    decl: SynthFunDecl


@dataclass(frozen=True)
class Constraint:
    term: Term


@dataclass(frozen=True)
class CheckSynth:
    pass


SygusCommand = Union[SetLogic, DeclareVar, SynthFun, DefineFun, Constraint, CheckSynth]


@dataclass(frozen=True)
class SygusScript:
    commands: tuple
    provenance: tuple = field(default=())

    def __post_init__(self):
        checks = [i for i, c in enumerate(self.commands) if isinstance(c, CheckSynth)]
        if len(checks) != 1 or checks[0] != len(self.commands) - 1:
            raise ScriptError("a SyGuS script needs exactly one check-synth, as its last command")
        for c in self.commands:
            if isinstance(c, Constraint) and c.term.sort != BOOL:
                raise ScriptError("constraints must be Bool")

    @property
    def constraints(self) -> list:
        return [c.term for c in self.commands if isinstance(c, Constraint)]

    @property
    def variables(self) -> list:
        return [(c.name, c.sort) for c in self.commands if isinstance(c, DeclareVar)]

    @property
    def synth_decls(self) -> list:
        return [c.decl for c in self.commands if isinstance(c, SynthFun)]


# ---------------------------------------------------------------------------
# Logic inference
# ---------------------------------------------------------------------------

def _script_terms_and_sorts(script) -> tuple[list, list]:
    terms, sorts = [], []
    for c in script.commands:
        if isinstance(c, (Assert, Constraint)):
            terms.append(c.term)
        elif isinstance(c, (DeclareConst, DeclareVar)):
            sorts.append(c.sort)
        elif isinstance(c, DeclareFun):
            sorts.extend(c.argsorts)
            sorts.append(c.rsort)
        elif isinstance(c, DefineFun):
            terms.append(c.body)
            sorts.extend(c.param_sorts)
            sorts.append(c.rsort)
        elif isinstance(c, (SynthBlockingFun, SynthFun)):
            d = c.decl
            sorts.extend(d.param_sorts)
            sorts.append(d.rsort)
            if d.grammar is not None:
                sorts.extend(s for _, s in d.grammar.nonterminals)
                for _, templates in d.grammar.productions:
                    terms.extend(templates)
    return terms, sorts


def _sort_features(sort: Sort, feats: set):
    if isinstance(sort, IntSort):
        feats.add("int")
    elif isinstance(sort, BitVecSort):
        feats.add("bv")
    elif isinstance(sort, ArraySort):
        feats.add("array")
        _sort_features(sort.index, feats)
        _sort_features(sort.element, feats)


def infer_logic(scripts: Iterable) -> str:
    """Smallest standard logic covering the sorts and operators used.

    Quantifier-free variants are not distinguished; the logic names double as
    SyGuS-IF logics.
    """
    feats: set = set()
    for script in scripts:
        terms, sorts = _script_terms_and_sorts(script)
        for s in sorts:
            _sort_features(s, feats)
        for term in terms:
            for t in iter_subterms(term):
                _sort_features(t.sort, feats)
                if isinstance(t, Apply) and t.op == "*":
                    if sum(not isinstance(a, Const) for a in t.args) > 1:
                        feats.add("nonlinear")
    ints, bvs, arrays = "int" in feats, "bv" in feats, "array" in feats
    arith = "NIA" if "nonlinear" in feats else "LIA"
    if ints and bvs:
        return "ALL"
    if bvs:
        return "ABV" if arrays else "BV"
    if arrays:
        return "A" + arith if ints else "ALL"
    return arith


# ---------------------------------------------------------------------------
# Lowering and rewriting
# ---------------------------------------------------------------------------

def vc_to_synthlib(vc: VerificationCondition, synth_decls: Mapping[str, SynthFunDecl],
                   logic: str | None = None) -> SynthLibScript:
    """One SYNTH-LIB query for one VC: declarations, the negated obligation, check-sat."""
    missing = vc.uses_synth - set(synth_decls)
    if missing:
        raise EmitError(f"{vc.label} uses undeclared synthesis function(s) {sorted(missing)}")
    body = [SynthBlockingFun(d) for name, d in synth_decls.items() if name in vc.uses_synth]
    body += [DeclareConst(n, s) for n, s in vc.symbols]
    body += [Assert(vc.assertion), CheckSat()]
    if logic is None:
        logic = infer_logic([SynthLibScript(tuple(body), (vc.label,))])
    return SynthLibScript((SetLogic(logic),) + tuple(body), (vc.label,))


def renaming_for(index: int, script: SynthLibScript) -> dict:
    """Per-script renaming ``x -> q{index}_x`` of every declared constant."""
    out = {}
    for c in script.commands:
        if isinstance(c, DeclareConst):
            out[c.name] = Symbol(f"q{index}_{c.name}", c.sort)
        elif isinstance(c, DeclareFun) and not c.argsorts:
            out[c.name] = Symbol(f"q{index}_{c.name}", c.rsort)
    return out


def rewrite_to_sygus(scripts: Iterable[SynthLibScript], logic: str | None = None) -> SygusScript:
    """Merge SYNTH-LIB queries into a single SyGuS-IF problem."""
    scripts = list(scripts)
    if not scripts:
        raise EmitError("nothing to merge: no SYNTH-LIB scripts")
    synths: dict = {}
    defines: dict = {}
    for s in scripts:
        for c in s.commands:
            if isinstance(c, DeclareFun) and c.argsorts:
                raise EmitError(
                    f"declare-fun {c.name} has arity {len(c.argsorts)}; only constants become declare-var")
            if isinstance(c, SynthBlockingFun):
                prev = synths.setdefault(c.decl.name, c.decl)
                if prev != c.decl:
                    raise EmitError(f"conflicting declarations of synthesis function {c.decl.name}")
            if isinstance(c, DefineFun):
                prev = defines.setdefault(c.name, c)
                if prev != c:
                    raise EmitError(f"conflicting definitions of {c.name}")
    if not synths:
        raise EmitError("no function to synthesize in any script")

    variables, constraints = [], []
    for i, s in enumerate(scripts):
        ren = renaming_for(i, s)
        variables.extend(DeclareVar(sym.name, sym.sort) for sym in ren.values())
        constraints.extend(Constraint(mk_term("not", [substitute(a, ren)])) for a in s.asserts)

    commands = [SetLogic(logic or infer_logic(scripts))]
    commands += [SynthFun(d) for d in synths.values()]
    commands += list(defines.values())
    commands += variables + constraints + [CheckSynth()]
    provenance = tuple(label for s in scripts for label in s.provenance)
    return SygusScript(tuple(commands), provenance)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def format_sort(sort: Sort) -> str:
    return str(sort)


def format_const(c: Const) -> str:
    if isinstance(c.sort, BoolSort):
        return "true" if c.value else "false"
    if isinstance(c.sort, IntSort):
        return str(c.value) if c.value >= 0 else f"(- {-c.value})"
    w = c.sort.width
    if w % 4 == 0:
        return f"#x{c.value:0{w // 4}x}"
    return f"#b{c.value:0{w}b}"


def format_term(t: Term) -> str:
    if isinstance(t, Const):
        return format_const(t)
    if isinstance(t, Symbol):
        return t.name
    if isinstance(t, Ite):
        return f"(ite {format_term(t.cond)} {format_term(t.then)} {format_term(t.else_)})"
    if isinstance(t, FunApp):
        if not t.args:
            return t.name
        return f"({t.name} {' '.join(format_term(a) for a in t.args)})"
    if isinstance(t, Apply):
        args = " ".join(format_term(a) for a in t.args)
        if t.op == "extract":
            hi, lo = t.indices
            return f"((_ extract {hi} {lo}) {args})"
        return f"({t.op} {args})"
    raise TypeError(t)


def _params(params) -> str:
    return "(" + " ".join(f"({n} {format_sort(s)})" for n, s in params) + ")"


def _grammar(decl: SynthFunDecl) -> str:
    g = decl.grammar
    nts = "(" + " ".join(f"({n} {format_sort(s)})" for n, s in g.nonterminals) + ")"
    groups = []
    for (n, s), (_, templates) in zip(g.nonterminals, g.productions):
        groups.append(f"({n} {format_sort(s)} ({' '.join(format_term(t) for t in templates)}))")
    return f"\n  {nts}\n  ({' '.join(groups)})"


def _fun_head(keyword: str, decl: SynthFunDecl) -> str:
    head = f"({keyword} {decl.name} {_params(decl.params)} {format_sort(decl.rsort)}"
    if decl.grammar is not None:
        head += _grammar(decl)
    return head + ")"


def format_define_fun(d: DefineFun) -> str:
    return f"(define-fun {d.name} {_params(d.params)} {format_sort(d.rsort)} {format_term(d.body)})"


def _format_smt_command(c, allow_synth: bool) -> str:
    if isinstance(c, SetLogic):
        return f"(set-logic {c.name})"
    if isinstance(c, DeclareConst):
        return f"(declare-const {c.name} {format_sort(c.sort)})"
    if isinstance(c, DeclareFun):
        args = " ".join(format_sort(s) for s in c.argsorts)
        return f"(declare-fun {c.name} ({args}) {format_sort(c.rsort)})"
    if isinstance(c, DefineFun):
        return format_define_fun(c)
    if isinstance(c, SynthBlockingFun):
        if not allow_synth:
            raise EmitError(f"function to synthesize {c.decl.name} left in an SMT-LIB script")
        return _fun_head("synth-blocking-fun", c.decl)
    if isinstance(c, Assert):
        return f"(assert {format_term(c.term)})"
    if isinstance(c, CheckSat):
        return "(check-sat)"
    raise TypeError(c)


def _implicit_logic(script) -> list:
    if any(isinstance(c, SetLogic) for c in script.commands):
        return []
    return [f"(set-logic {infer_logic([script])})"]


def print_smtlib(script: SynthLibScript, get_model: bool = False) -> str:
    """SMT-LIB v2.6 text. Rejects residual synthesis functions and uninterpreted functions."""
    lines = _implicit_logic(script)
    for c in script.commands:
        if isinstance(c, DeclareFun) and c.argsorts:
            raise EmitError(f"uninterpreted function {c.name} is not supported in emitted queries")
        lines.append(_format_smt_command(c, allow_synth=False))
    if get_model:
        lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def print_synthlib(script: SynthLibScript) -> str:
    """SYNTH-LIB text: SMT-LIB plus ``synth-blocking-fun`` commands."""
    lines = _implicit_logic(script)
    lines += [_format_smt_command(c, allow_synth=True) for c in script.commands]
    return "\n".join(lines) + "\n"


def print_sygus(script: SygusScript) -> str:
    lines = []
    for c in script.commands:
        if isinstance(c, SetLogic):
            lines.append(f"(set-logic {c.name})")
        elif isinstance(c, SynthFun):
            lines.append(_fun_head("synth-fun", c.decl))
        elif isinstance(c, DeclareVar):
            lines.append(f"(declare-var {c.name} {format_sort(c.sort)})")
        elif isinstance(c, DefineFun):
            lines.append(format_define_fun(c))
        elif isinstance(c, Constraint):
            lines.append(f"(constraint {format_term(c.term)})")
        elif isinstance(c, CheckSynth):
            lines.append("(check-synth)")
        else:
            raise TypeError(c)
    return "\n".join(lines) + "\n"

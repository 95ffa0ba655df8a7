"""SYNTH-LIB scripts: SMT-LIB commands plus ``synth-blocking-fun``."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import ScriptError, SignatureMismatch
from .ir import (BOOL, DefineFun, FunApp, Sort, Symbol, SynthFunDecl, Term,
                 free_symbols, iter_subterms, recompute_sort)


@dataclass(frozen=True)
class SetLogic:
    name: str


@dataclass(frozen=True)
class DeclareConst:
    name: str
    sort: Sort


@dataclass(frozen=True)
class DeclareFun:
    name: str
    argsorts: tuple
    rsort: Sort


@dataclass(frozen=True)
class SynthBlockingFun:
    decl: SynthFunDecl


@dataclass(frozen=True)
class Assert:
    term: Term


@dataclass(frozen=True)
class CheckSat:
    pass


SynthLibCommand = Union[SetLogic, DeclareConst, DeclareFun, DefineFun, SynthBlockingFun, Assert, CheckSat]


@dataclass(frozen=True)
class SynthLibScript:
    commands: tuple
    provenance: tuple = field(default=())

    def __post_init__(self):
        check_script(self)

    @property
    def synth_decls(self) -> list:
        return [c.decl for c in self.commands if isinstance(c, SynthBlockingFun)]

    @property
    def asserts(self) -> list:
        return [c.term for c in self.commands if isinstance(c, Assert)]

    @property
    def is_pure_smtlib(self) -> bool:
        return not any(isinstance(c, SynthBlockingFun) for c in self.commands)


def check_script(script: SynthLibScript) -> None:
    """Enforce ordering and declare-before-use; raise ScriptError otherwise."""
    cmds = script.commands
    checks = [i for i, c in enumerate(cmds) if isinstance(c, CheckSat)]
    if len(checks) != 1 or checks[0] != len(cmds) - 1:
        raise ScriptError("a script needs exactly one check-sat, as its last command")

    consts: dict = {}
    funs: dict = {}

    def declare(name, entry):
        if name in consts or name in funs:
            raise ScriptError(f"{name} declared twice")
        if entry[0] == "const":
            consts[name] = entry[1]
        else:
            funs[name] = entry[1:]

    def check_term(term: Term, bound: dict):
        for t in iter_subterms(term):
            if isinstance(t, Symbol):
                sort = bound.get(t.name, consts.get(t.name))
                if sort is None:
                    raise ScriptError(f"symbol {t.name} used before declaration")
                if sort != t.sort:
                    raise ScriptError(f"symbol {t.name} used at sort {t.sort}, declared {sort}")
            elif isinstance(t, FunApp):
                sig = funs.get(t.name)
                if sig is None:
                    raise ScriptError(f"function {t.name} used before declaration")
                argsorts, rsort = sig
                if tuple(a.sort for a in t.args) != tuple(argsorts) or rsort != t.sort:
                    raise ScriptError(f"application of {t.name} does not match its signature")

    for c in cmds:
        if isinstance(c, DeclareConst):
            declare(c.name, ("const", c.sort))
        elif isinstance(c, DeclareFun):
            if c.argsorts:
                declare(c.name, ("fun", tuple(c.argsorts), c.rsort))
            else:
                declare(c.name, ("const", c.rsort))
        elif isinstance(c, DefineFun):
            check_term(c.body, dict(c.params))
            if recompute_sort(c.body) != c.rsort:
                raise ScriptError(f"body of {c.name} does not have sort {c.rsort}")
            declare(c.name, ("fun", c.param_sorts, c.rsort))
        elif isinstance(c, SynthBlockingFun):
            d = c.decl
            declare(d.name, ("fun", d.param_sorts, d.rsort))
        elif isinstance(c, Assert):
            if c.term.sort != BOOL:
                raise ScriptError("assert needs a Bool term")
            check_term(c.term, {})
        elif isinstance(c, (SetLogic, CheckSat)):
            pass
        else:
            raise ScriptError(f"not a SYNTH-LIB command: {c!r}")


def inline_candidate(script: SynthLibScript, solution: DefineFun) -> SynthLibScript:
    """Replace the ``synth-blocking-fun`` named like ``solution`` with ``solution``.

    Assertions are left untouched; the result has one fewer function to
    synthesize.
    """
    for i, c in enumerate(script.commands):
        if isinstance(c, SynthBlockingFun) and c.decl.name == solution.name:
            decl = c.decl
            break
    else:
        raise SignatureMismatch(f"script has no function to synthesize named {solution.name}")
    if decl.param_sorts != solution.param_sorts or decl.rsort != solution.rsort:
        raise SignatureMismatch(
            f"candidate {solution.name}: ({', '.join(map(str, solution.param_sorts))}) -> {solution.rsort} "
            f"does not match ({', '.join(map(str, decl.param_sorts))}) -> {decl.rsort}")
    params = set(solution.params)
    if not free_symbols(solution.body) <= params:
        raise SignatureMismatch(f"candidate {solution.name} refers to symbols outside its parameters")
    commands = script.commands[:i] + (solution,) + script.commands[i + 1:]
    return SynthLibScript(commands, script.provenance)

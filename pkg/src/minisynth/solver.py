"""Run external SMT-LIB and SyGuS-IF engines as subprocesses.

Engines are described by a command template such as ``"z3 {file}"``; the
script is written to a temporary file whose path replaces ``{file}`` (or is
appended when the template has no placeholder).
"""
from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import Mapping

from .errors import ParseFailure, SexprError, SolverNotFound, SortError
from .ir import (BOOL, INT, ArraySort, BitVecSort, Const, DefineFun, Sort,
                 Symbol, SynthFunDecl, Term, apply_fun, bool_const, bv_const,
                 int_const, mk_term)
from .sexpr import BVLit, Sym, parse_sexprs

SMT_ENV = "MINISYNTH_SMT_CMD"
SYGUS_ENV = "MINISYNTH_SYGUS_CMD"


@dataclass(frozen=True)
class SolverConfig:
    smt_command: str | None = None
    sygus_command: str | None = None
    timeout: float = 60.0
    workdir: str | None = None

    @classmethod
    def from_env(cls, **overrides) -> "SolverConfig":
        values = {
            "smt_command": os.environ.get(SMT_ENV) or None,
            "sygus_command": os.environ.get(SYGUS_ENV) or None,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class SolverOutcome:
    verdict: str  # sat | unsat | unknown
    model: dict | None = None
    raw: str = ""
    duration: float = 0.0
    timed_out: bool = False


@dataclass(frozen=True)
class SynthesisOutcome:
    verdict: str  # solved | infeasible | unknown
    definitions: tuple = field(default=())
    raw: str = ""
    duration: float = 0.0
    timed_out: bool = False


# ---------------------------------------------------------------------------
# Subprocess handling
# ---------------------------------------------------------------------------

def _expand(template: str, path: str) -> list[str]:
    argv = shlex.split(template)
    if not argv:
        raise SolverNotFound("empty solver command")
    if any("{file}" in a for a in argv):
        return [a.replace("{file}", path) for a in argv]
    return argv + [path]


def _run(template: str | None, text: str, suffix: str, config: SolverConfig, env_name: str):
    if not template:
        raise SolverNotFound(f"no solver configured; set {env_name} to a command template like 'z3 {{file}}'")
    fd, path = tempfile.mkstemp(suffix=suffix, prefix="minisynth_", dir=config.workdir)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        argv = _expand(template, path)
        start = time.monotonic()
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=config.timeout)
        except FileNotFoundError as e:
            raise SolverNotFound(f"solver executable not found: {argv[0]}") from e
        except PermissionError as e:
            raise SolverNotFound(f"solver executable not runnable: {argv[0]}") from e
        except subprocess.TimeoutExpired as e:
            out = e.stdout.decode() if isinstance(e.stdout, bytes) else (e.stdout or "")
            return out, "", time.monotonic() - start, True, None
        return proc.stdout, proc.stderr, time.monotonic() - start, False, proc.returncode
    finally:
        os.unlink(path)


def _sexprs(raw: str) -> list:
    try:
        return parse_sexprs(raw)
    except SexprError as e:
        raise ParseFailure(f"malformed solver output: {e}") from e


def _check_error(items: list, raw: str):
    for it in items:
        if isinstance(it, list) and it and it[0] == "error":
            raise ParseFailure(f"solver reported an error: {raw.strip()}")


def run_smt(script_text: str, config: SolverConfig) -> SolverOutcome:
    """Run an SMT-LIB script and read the first verdict plus any model."""
    out, err, duration, timed_out, _ = _run(config.smt_command, script_text, ".smt2", config, SMT_ENV)
    raw = out + (("\n" + err) if err else "")
    if timed_out:
        return SolverOutcome("unknown", None, raw, duration, True)
    items = _sexprs(out)
    verdict = None
    rest: list = []
    for i, it in enumerate(items):
        if isinstance(it, Sym) and str(it) in ("sat", "unsat", "unknown"):
            verdict = str(it)
            rest = items[i + 1:]
            break
        if isinstance(it, list) and it and it[0] == "error":
            raise ParseFailure(f"solver reported an error: {raw.strip()}")
    if verdict is None:
        raise ParseFailure(f"no sat/unsat/unknown verdict in solver output: {raw.strip()[:200]!r}")
    model = None
    if verdict == "sat":
        defs = _define_funs(rest)
        if defs:
            model = {}
            for d in defs:
                if len(d) != 5 or d[2] != []:
                    continue
                model[str(d[1])] = value_from_sexpr(d[4], sort_from_sexpr(d[3]))
    return SolverOutcome(verdict, model, raw, duration, False)


def _define_funs(items: list) -> list:
    """``define-fun`` forms at top level, inside ``(model ...)`` or inside a bare list."""
    found = []
    for it in items:
        if not isinstance(it, list) or not it:
            continue
        if it[0] == "define-fun":
            found.append(it)
        elif it[0] == "model" or all(isinstance(x, list) for x in it):
            found.extend(_define_funs(it[1:] if it[0] == "model" else it))
    return found


def run_sygus(script_text: str, config: SolverConfig, decls: Mapping[str, SynthFunDecl] | None = None) -> SynthesisOutcome:
    """Run a SyGuS-IF problem and read back ``define-fun`` solutions."""
    out, err, duration, timed_out, code = _run(config.sygus_command, script_text, ".sl", config, SYGUS_ENV)
    raw = out + (("\n" + err) if err else "")
    if timed_out:
        return SynthesisOutcome("unknown", (), raw, duration, True)
    items = _sexprs(out)
    _check_error(items, raw)
    defs = [define_fun_from_sexpr(d) for d in _define_funs(items)]
    if defs:
        if decls is not None:
            for d in defs:
                want = decls.get(d.name)
                if want is None or want.param_sorts != d.param_sorts or want.rsort != d.rsort:
                    raise ParseFailure(f"engine returned {d.name} with an unexpected signature")
        return SynthesisOutcome("solved", tuple(defs), raw, duration)
    atoms = {str(it) for it in items if isinstance(it, Sym)}
    if atoms & {"infeasible", "fail"}:
        return SynthesisOutcome("infeasible", (), raw, duration)
    if not items and code:
        raise ParseFailure(f"synthesis engine exited with status {code}: {err.strip()[:200]!r}")
    if "unknown" in atoms or not items:
        return SynthesisOutcome("unknown", (), raw, duration)
    raise ParseFailure(f"cannot interpret synthesis engine output: {raw.strip()[:200]!r}")


# ---------------------------------------------------------------------------
# Reading sorts, values and terms back from s-expressions
# ---------------------------------------------------------------------------

def sort_from_sexpr(sx) -> Sort:
    if sx == "Int":
        return INT
    if sx == "Bool":
        return BOOL
    if isinstance(sx, list):
        if len(sx) == 3 and sx[0] == "_" and sx[1] == "BitVec" and isinstance(sx[2], int):
            return BitVecSort(sx[2])
        if len(sx) == 3 and sx[0] == "Array":
            return ArraySort(sort_from_sexpr(sx[1]), sort_from_sexpr(sx[2]))
    raise ParseFailure(f"unknown sort {sx!r}")


def value_from_sexpr(sx, sort: Sort):
    t = term_from_sexpr(sx, {}, {})
    if not isinstance(t, Const) or t.sort != sort:
        raise ParseFailure(f"model value {sx!r} is not a literal of sort {sort}")
    return t.value


def term_from_sexpr(sx, env: Mapping[str, Sort], funs: Mapping[str, tuple]) -> Term:
    """Build a sorted term. ``env`` gives symbol sorts, ``funs`` maps names to (argsorts, rsort)."""

    def go(x, scope):
        if isinstance(x, bool):
            raise ParseFailure(f"unexpected {x!r}")
        if isinstance(x, int):
            return int_const(x)
        if isinstance(x, BVLit):
            return bv_const(x.value, x.width)
        if isinstance(x, Sym):
            if x == "true":
                return bool_const(True)
            if x == "false":
                return bool_const(False)
            if x in scope:
                return scope[x]
            if x in env:
                return Symbol(str(x), env[x])
            if x in funs and not funs[x][0]:
                return apply_fun(str(x), (), funs[x][1], (), "defined")
            raise ParseFailure(f"unknown symbol {x}")
        if not isinstance(x, list) or not x:
            raise ParseFailure(f"unexpected {x!r}")
        head = x[0]
        if isinstance(head, list):
            if len(head) == 4 and head[0] == "_" and head[1] == "extract":
                return mk_term("extract", [go(x[1], scope)], (head[2], head[3]))
            raise ParseFailure(f"unsupported indexed operator {head!r}")
        if head == "_" and len(x) == 3 and isinstance(x[1], Sym) and x[1].startswith("bv"):
            return bv_const(int(x[1][2:]), x[2])
        if head == "let":
            new_scope = dict(scope)
            for binding in x[1]:
                new_scope[str(binding[0])] = go(binding[1], scope)
            return go(x[2], new_scope)
        args = [go(a, scope) for a in x[1:]]
        if head == "-" and len(args) == 1 and isinstance(args[0], Const):
            return int_const(-args[0].value)
        if head in ("and", "or") and len(args) == 1:
            return args[0]
        if head == "=>" and len(args) > 2:
            out = args[-1]
            for a in reversed(args[:-1]):
                out = mk_term("=>", [a, out])
            return out
        if head == "distinct" and len(args) == 2:
            return mk_term("not", [mk_term("=", args)])
        if head == "xor" and len(args) == 2:
            return mk_term("not", [mk_term("=", args)])
        if head == "bvneg" and len(args) == 1:
            w = args[0].sort.width
            return mk_term("bvsub", [bv_const(0, w), args[0]])
        if head in funs:
            argsorts, rsort = funs[head]
            return apply_fun(str(head), argsorts, rsort, args, "defined")
        return mk_term(str(head), args)

    try:
        return go(sx, {})
    except SortError as e:
        raise ParseFailure(f"ill-sorted term in solver output: {e}") from e


def define_fun_from_sexpr(sx) -> DefineFun:
    if not (isinstance(sx, list) and len(sx) == 5 and sx[0] == "define-fun"):
        raise ParseFailure(f"not a define-fun: {sx!r}")
    params = []
    for p in sx[2]:
        if not (isinstance(p, list) and len(p) == 2):
            raise ParseFailure(f"bad parameter {p!r}")
        params.append((str(p[0]), sort_from_sexpr(p[1])))
    rsort = sort_from_sexpr(sx[3])
    body = term_from_sexpr(sx[4], dict(params), {})
    if body.sort != rsort:
        raise ParseFailure(f"body of {sx[1]} has sort {body.sort}, declared {rsort}")
    return DefineFun(str(sx[1]), tuple(params), rsort, body)


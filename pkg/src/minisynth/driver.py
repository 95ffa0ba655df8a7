"""Pipeline glue behind the command-line interface."""
from __future__ import annotations

import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .emit import (format_define_fun, print_smtlib, print_sygus, print_synthlib, rewrite_to_sygus,
                   vc_to_synthlib)
from .errors import MinisynthError, UnsupportedSort
from .frontend import load_model, parse_define, typecheck
from .frontend.ast import Model
from .frontend.typecheck import TypedModel
from .ir import DefineFun, SynthFunDecl
from .oracle import Bounded, DomainBounds, Invalid, Valid, validate_solution
from .solver import SolverConfig, run_smt, run_sygus
from .symsim import VerificationCondition, demangle, generate_vcs
from .synthlib import inline_candidate

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 3
EXIT_SOLVER = 4


class UsageError(MinisynthError):
    """The request cannot be carried out for this model (exit code 3)."""


@dataclass
class VCResult:
    label: str
    kind: str
    verdict: str  # holds | violated | unknown
    witness: dict | None = None
    note: str = ""

    def to_json(self) -> dict:
        out = {"label": self.label, "kind": self.kind, "verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class SynthesisReport:
    verdict: str  # solved | infeasible | unknown
    definitions: list = field(default_factory=list)  # printed define-fun text
    validation: str | None = None  # valid | invalid | unknown

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "definitions": self.definitions, "validation": self.validation}


@dataclass
class RunReport:
    model: str
    vcs: list = field(default_factory=list)
    synthesis: SynthesisReport | None = None
    timings: dict = field(default_factory=dict)
    exit_code: int = EXIT_OK

    def to_json(self) -> dict:
        out = {"model": self.model, "vcs": [v.to_json() for v in self.vcs]}
        if self.synthesis is not None:
            out["synthesis"] = self.synthesis.to_json()
        out["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return out


def verdict_exit_code(results) -> int:
    verdicts = {r.verdict for r in results}
    if "violated" in verdicts:
        return EXIT_VIOLATED
    if "unknown" in verdicts:
        return EXIT_UNKNOWN
    return EXIT_OK


def _witness(values: dict, vc: VerificationCondition) -> dict:
    return {demangle(name): values[name] for name, _ in vc.symbols if name in values}


def check_vc(vc: VerificationCondition, *, oracle: bool, config: SolverConfig | None,
             bounds: DomainBounds, solutions: dict | None = None) -> VCResult:
    """Decide one VC. ``solutions`` replaces synthesis functions by definitions."""
    solutions = solutions or {}
    if oracle:
        try:
            res = validate_solution([vc], solutions, bounds)
        except UnsupportedSort as e:
            return VCResult(vc.label, vc.kind, "unknown", note=str(e))
        if isinstance(res, Invalid):
            return VCResult(vc.label, vc.kind, "violated", _witness(res.witness, vc))
        if isinstance(res, Bounded):
            return VCResult(vc.label, vc.kind, "unknown", note=res.reason)
        note = "no counterexample within the Int window" if res.within_bounds else ""
        return VCResult(vc.label, vc.kind, "holds", note=note)
    script = vc_to_synthlib(vc, {n: _decl_for(d) for n, d in solutions.items() if n in vc.uses_synth})
    for name in sorted(vc.uses_synth):
        script = inline_candidate(script, solutions[name])
    out = run_smt(print_smtlib(script, get_model=True), config)
    if out.verdict == "sat":
        return VCResult(vc.label, vc.kind, "violated", _witness(out.model or {}, vc))
    if out.verdict == "unsat":
        return VCResult(vc.label, vc.kind, "holds")
    return VCResult(vc.label, vc.kind, "unknown", note="solver timed out" if out.timed_out else "solver said unknown")


def _decl_for(d: DefineFun) -> SynthFunDecl:
    return SynthFunDecl(d.name, d.params, d.rsort)


def _check_all(vcs, jobs: int, **kwargs) -> list:
    if jobs <= 1 or len(vcs) <= 1:
        return [check_vc(vc, **kwargs) for vc in vcs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda vc: check_vc(vc, **kwargs), vcs))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def read_model(path: str | Path) -> TypedModel:
    path = Path(path)
    return load_model(path.read_text(encoding="utf-8"), str(path))


def verify(model: TypedModel, *, oracle: bool = False, config: SolverConfig | None = None,
           bounds: DomainBounds | None = None, jobs: int = 1) -> RunReport:
    bounds = bounds or DomainBounds()
    timings = {}
    t0 = time.perf_counter()
    if not model.proof_commands:
        raise UsageError(f"model {model.name} has no bmc, induction or kinduction command")
    vcs = generate_vcs(model)
    timings["vcgen"] = time.perf_counter() - t0
    log.info("%s: %d verification conditions", model.name, len(vcs))

    results: dict = {}
    checkable = []
    for vc in vcs:
        if vc.uses_synth:
            if not model.wants_synthesis:
                raise UsageError(
                    f"{vc.label} uses synthesis function(s) {', '.join(sorted(vc.uses_synth))} "
                    "but the control block has no 'synthesize' command")
            results[vc.label] = VCResult(vc.label, vc.kind, "unknown",
                                         note="depends on a function to synthesize; run 'minisynth synth'")
        else:
            checkable.append(vc)
    config = config or SolverConfig()
    t1 = time.perf_counter()
    for r in _check_all(checkable, jobs, oracle=oracle, config=config, bounds=bounds):
        results[r.label] = r
    timings["check"] = time.perf_counter() - t1
    timings["total"] = time.perf_counter() - t0
    ordered = [results[vc.label] for vc in vcs]
    return RunReport(model.name, ordered, None, timings, verdict_exit_code(ordered))


def synthesize(model: TypedModel, *, config: SolverConfig | None = None, validate: bool = False,
               oracle: bool = False, bounds: DomainBounds | None = None) -> RunReport:
    bounds = bounds or DomainBounds()
    config = config or SolverConfig()
    timings = {}
    t0 = time.perf_counter()
    if not model.synth_funs:
        raise UsageError(f"model {model.name} declares no synthesis function")
    if not model.proof_commands:
        raise UsageError(f"model {model.name} has no bmc, induction or kinduction command")
    vcs = generate_vcs(model)
    query = rewrite_to_sygus([vc_to_synthlib(vc, model.synth_funs) for vc in vcs])
    text = print_sygus(query)
    timings["vcgen"] = time.perf_counter() - t0

    log.info("%s: synthesis query over %d VCs, %d constraints", model.name, len(vcs), len(query.constraints))
    t1 = time.perf_counter()
    outcome = run_sygus(text, config, model.synth_funs)
    timings["synthesis"] = time.perf_counter() - t1
    report = RunReport(model.name, [], SynthesisReport(outcome.verdict), timings)
    if outcome.verdict != "solved":
        report.exit_code = EXIT_VIOLATED if outcome.verdict == "infeasible" else EXIT_UNKNOWN
        timings["total"] = time.perf_counter() - t0
        return report

    report.synthesis.definitions = [format_define_fun(d) for d in outcome.definitions]
    if validate:
        solutions = {d.name: d for d in outcome.definitions}
        missing = set().union(*(vc.uses_synth for vc in vcs)) - set(solutions)
        t2 = time.perf_counter()
        if missing:
            report.synthesis.validation = "unknown"
            report.exit_code = EXIT_UNKNOWN
        else:
            use_oracle = oracle or not config.smt_command
            report.vcs = [check_vc(vc, oracle=use_oracle, config=config, bounds=bounds, solutions=solutions)
                          for vc in vcs]
            code = verdict_exit_code(report.vcs)
            report.synthesis.validation = {EXIT_OK: "valid", EXIT_VIOLATED: "invalid"}.get(code, "unknown")
            report.exit_code = code
        timings["validation"] = time.perf_counter() - t2
    timings["total"] = time.perf_counter() - t0
    return report


_LABEL_RE = re.compile(r"[^A-Za-z0-9_]+")


def sanitize_label(label: str) -> str:
    return _LABEL_RE.sub("_", label).strip("_")


def emit(model: TypedModel, fmt: str, outdir: str | Path) -> list[Path]:
    """Write query files; nothing is written if any query fails to emit."""
    outdir = Path(outdir)
    if not model.proof_commands:
        raise UsageError(f"model {model.name} has no bmc, induction or kinduction command")
    vcs = generate_vcs(model)
    files: list = []
    if fmt == "smt":
        for vc in vcs:
            text = print_smtlib(vc_to_synthlib(vc, model.synth_funs))
            files.append((f"{model.name}_{sanitize_label(vc.label)}.smt2", text))
    elif fmt == "synthlib":
        for vc in vcs:
            text = print_synthlib(vc_to_synthlib(vc, model.synth_funs))
            files.append((f"{model.name}_{sanitize_label(vc.label)}.synthlib", text))
    elif fmt == "sygus":
        if not model.synth_funs:
            raise UsageError("SyGuS output needs at least one synthesis function")
        query = rewrite_to_sygus([vc_to_synthlib(vc, model.synth_funs) for vc in vcs])
        files.append((f"{model.name}_synthesis.sl", print_sygus(query)))
    else:
        raise UsageError(f"unknown format {fmt!r}; choose smt, sygus or synthlib")
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in files:
        path = outdir / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


# ---------------------------------------------------------------------------
# Corpus regression
# ---------------------------------------------------------------------------

EXPECTATIONS = ("holds", "violated", "synth-solvable")
_EXPECT_RE = re.compile(r"^\s*//\s*EXPECT:\s*(\S+)\s*$", re.MULTILINE)
_CANDIDATE_RE = re.compile(r"^\s*//\s*CANDIDATE:\s*(define\b.*)$", re.MULTILINE)


@dataclass
class CorpusEntry:
    file: str
    expected: str
    actual: str
    ok: bool
    detail: str = ""


@dataclass
class CorpusReport:
    entries: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if all(e.ok for e in self.entries) else EXIT_VIOLATED


def read_header(source: str) -> tuple[str | None, list]:
    m = _EXPECT_RE.search(source)
    return (m.group(1) if m else None), [c.strip() for c in _CANDIDATE_RE.findall(source)]


def parse_candidate(text: str, file: str = "<candidate>") -> DefineFun:
    """Read ``define f(params) : sort = expr;`` into a closed DefineFun."""
    # Typecheck the candidate as the only define of a scratch model.
    d = parse_define(text, file)
    scratch = typecheck(Model(name="candidate", defines=(d,)))
    return scratch.defines[d.name]


def check_model_file(path: Path, *, oracle: bool = True, config: SolverConfig | None = None,
                     bounds: DomainBounds | None = None) -> CorpusEntry:
    source = path.read_text(encoding="utf-8")
    expected, candidates = read_header(source)
    if expected not in EXPECTATIONS:
        return CorpusEntry(path.name, str(expected), "-", False, "missing or unknown '// EXPECT:' header")
    try:
        model = load_model(source, str(path))
        if expected in ("holds", "violated"):
            report = verify(model, oracle=oracle, config=config, bounds=bounds)
            actual = {EXIT_OK: "holds", EXIT_VIOLATED: "violated"}.get(report.exit_code, "unknown")
            return CorpusEntry(path.name, expected, actual, actual == expected)
        config = config or SolverConfig()
        if config.sygus_command and not oracle:
            report = synthesize(model, config=config, validate=True, oracle=True, bounds=bounds)
            ok = report.exit_code == EXIT_OK
            return CorpusEntry(path.name, expected, "synth-solvable" if ok else report.synthesis.verdict, ok)
        if not candidates:
            return CorpusEntry(path.name, expected, "-", False,
                               "no synthesis engine and no '// CANDIDATE:' line to validate")
        solutions = {d.name: d for d in (parse_candidate(c, str(path)) for c in candidates)}
        res = validate_solution(generate_vcs(model), solutions, bounds)
        ok = isinstance(res, Valid)
        detail = "" if ok else f"candidate rejected: {res}"
        return CorpusEntry(path.name, expected, "synth-solvable" if ok else "not-validated", ok, detail)
    except MinisynthError as e:
        return CorpusEntry(path.name, expected, "error", False, str(e))


def check_corpus(directory: str | Path, **kwargs) -> CorpusReport:
    directory = Path(directory)
    report = CorpusReport()
    files = sorted(directory.glob("*.mucl"))
    if not files:
        report.warnings.append(f"no .mucl files in {directory}")
    for f in files:
        report.entries.append(check_model_file(f, **kwargs))
    return report


__all__ = [
    "EXIT_OK", "EXIT_VIOLATED", "EXIT_UNKNOWN", "EXIT_USAGE", "EXIT_SOLVER",
    "CorpusEntry", "CorpusReport", "RunReport", "SynthesisReport", "UsageError", "VCResult",
    "check_corpus", "check_model_file", "check_vc", "emit", "parse_candidate", "read_model", "sanitize_label",
    "synthesize", "verify",
]

"""Command-line entry point: ``minisynth verify|synth|emit|corpus``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import driver
from .errors import (EmitError, LexError, MinisynthError, ParseError, ScriptError,
                     SolverError, SolverNotFound, TypeCheckError)
from .oracle import DomainBounds
from .solver import SMT_ENV, SYGUS_ENV, SolverConfig


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minisynth", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def add_domain(sp):
        sp.add_argument("--int-lo", type=int, default=-8, help="low end of the Int window for --oracle")
        sp.add_argument("--int-hi", type=int, default=8, help="high end of the Int window for --oracle")

    v = sub.add_parser("verify", help="check invariants with BMC / induction")
    v.add_argument("file")
    v.add_argument("--oracle", action="store_true", help="use the built-in brute-force checker instead of a solver")
    v.add_argument("--jobs", type=_positive_int, default=1)
    v.add_argument("--json", action="store_true")
    v.add_argument("--timeout", type=float, default=60.0, help="per-query solver timeout in seconds")
    v.add_argument("--solver", help=f"SMT command template (default: ${SMT_ENV})")
    add_domain(v)

    s = sub.add_parser("synth", help="synthesize the model's synthesis functions")
    s.add_argument("file")
    s.add_argument("--validate", action="store_true", help="re-check every VC with the returned solution")
    s.add_argument("--oracle", action="store_true", help="validate with the brute-force checker")
    s.add_argument("--json", action="store_true")
    s.add_argument("--timeout", type=float, default=60.0)
    s.add_argument("--solver", help=f"SyGuS command template (default: ${SYGUS_ENV})")
    s.add_argument("--smt-solver", help=f"SMT command template for validation (default: ${SMT_ENV})")
    add_domain(s)

    e = sub.add_parser("emit", help="write solver queries to a directory")
    e.add_argument("file")
    e.add_argument("--format", required=True, choices=("smt", "sygus", "synthlib"))
    e.add_argument("--out", required=True)

    c = sub.add_parser("corpus", help="check every .mucl file in a directory against its EXPECT header")
    c.add_argument("dir")
    c.add_argument("--solver", action="store_true",
                   help="use the configured SMT/SyGuS engines instead of the brute-force checker")
    c.add_argument("--json", action="store_true")
    add_domain(c)
    return p


def _bounds(args) -> DomainBounds:
    if args.int_lo > args.int_hi:
        raise driver.UsageError("--int-lo must not exceed --int-hi")
    return DomainBounds(int_lo=args.int_lo, int_hi=args.int_hi)


def _print_report(report: driver.RunReport, out) -> None:
    print(f"model {report.model}", file=out)
    width = max((len(r.label) for r in report.vcs), default=0)
    for r in report.vcs:
        line = f"  {r.label:<{width}}  {r.verdict}"
        if r.witness:
            line += "  " + " ".join(f"{k}={_fmt_value(v)}" for k, v in r.witness.items())
        if r.note and r.verdict != "violated":
            line += f"  ({r.note})"
        print(line, file=out)
    if report.synthesis is not None:
        syn = report.synthesis
        print(f"synthesis: {syn.verdict}", file=out)
        if syn.verdict == "infeasible":
            print("  no strengthening exists for this encoding", file=out)
        for d in syn.definitions:
            print(f"  {d}", file=out)
        if syn.validation is not None:
            print(f"validation: {syn.validation}", file=out)
    result = {0: "holds", 1: "violated", 2: "unknown"}.get(report.exit_code, "error")
    if report.synthesis is not None:
        result = {0: "solved", 1: "infeasible" if report.synthesis.verdict == "infeasible" else "invalid",
                  2: "unknown"}.get(report.exit_code, "error")
    print(f"result: {result}", file=out)


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _run(args, out, err) -> int:
    if args.command == "verify":
        model = driver.read_model(args.file)
        config = SolverConfig.from_env(smt_command=args.solver, timeout=args.timeout)
        report = driver.verify(model, oracle=args.oracle, config=config, bounds=_bounds(args), jobs=args.jobs)
        if args.json:
            print(json.dumps(report.to_json(), indent=2), file=out)
        else:
            _print_report(report, out)
        return report.exit_code

    if args.command == "synth":
        model = driver.read_model(args.file)
        config = SolverConfig.from_env(sygus_command=args.solver, smt_command=args.smt_solver,
                                       timeout=args.timeout)
        report = driver.synthesize(model, config=config, validate=args.validate, oracle=args.oracle,
                                   bounds=_bounds(args))
        if args.json:
            print(json.dumps(report.to_json(), indent=2), file=out)
        else:
            _print_report(report, out)
        return report.exit_code

    if args.command == "emit":
        model = driver.read_model(args.file)
        for path in driver.emit(model, args.format, args.out):
            print(path, file=out)
        return driver.EXIT_OK

    if args.command == "corpus":
        config = SolverConfig.from_env()
        report = driver.check_corpus(args.dir, oracle=not args.solver, config=config, bounds=_bounds(args))
        for w in report.warnings:
            print(f"warning: {w}", file=err)
        if args.json:
            print(json.dumps([e.__dict__ for e in report.entries], indent=2), file=out)
        else:
            for e in report.entries:
                status = "ok" if e.ok else "MISMATCH"
                extra = f"  {e.detail}" if e.detail else ""
                print(f"{status:<8} {e.file}: expected {e.expected}, got {e.actual}{extra}", file=out)
            bad = sum(not e.ok for e in report.entries)
            print(f"{len(report.entries) - bad}/{len(report.entries)} models as expected", file=out)
        return report.exit_code
    raise driver.UsageError(f"unknown command {args.command}")


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on bad usage; usage errors are 3 here.
        return driver.EXIT_USAGE if e.code else driver.EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=err,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args, out, err)
    except TypeCheckError as e:
        for problem in e.errors:
            print(f"error: {problem}", file=err)
        return driver.EXIT_USAGE
    except (LexError, ParseError, EmitError, ScriptError, driver.UsageError) as e:
        print(f"error: {e}", file=err)
        return driver.EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=err)
        return driver.EXIT_USAGE
    except SolverNotFound as e:
        print(f"error: {e}", file=err)
        print(f"hint: set {SMT_ENV} / {SYGUS_ENV} (for example '{SMT_ENV}=z3 {{file}}'), "
              "or pass --oracle to use the built-in finite-domain checker", file=err)
        return driver.EXIT_SOLVER
    except SolverError as e:
        print(f"error: solver failure: {e}", file=err)
        return driver.EXIT_SOLVER
    except MinisynthError as e:
        print(f"error: {e}", file=err)
        return driver.EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

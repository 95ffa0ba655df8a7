#!/usr/bin/env python3
"""Minimal SyGuS-IF command-line engine backed by the cvc5 Python bindings.

Usage: python3 tools/cvc5_sygus.py problem.sl
Set MINISYNTH_SYGUS_CMD="python3 tools/cvc5_sygus.py {file}" to use it.
"""
import sys

import cvc5


def main(path: str) -> int:
    tm = cvc5.TermManager()
    solver = cvc5.Solver(tm)
    solver.setOption("sygus", "true")
    sm = cvc5.SymbolManager(tm)
    parser = cvc5.InputParser(solver, sm)
    parser.setFileInput(cvc5.InputLanguage.SYGUS_2_1, path)
    while True:
        cmd = parser.nextCommand()
        if cmd.isNull():
            return 0
        out = cmd.invoke(solver, sm)
        if out:
            sys.stdout.write(out)
            sys.stdout.flush()


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))

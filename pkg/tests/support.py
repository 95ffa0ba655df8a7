"""Helpers shared by the test modules."""
import os
import shutil
import sys
from pathlib import Path

from minisynth.frontend import load_model

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
FIXTURES = Path(__file__).resolve().parent / "fixtures"
CVC5_WRAPPER = ROOT / "tools" / "cvc5_sygus.py"


def corpus_files():
    return sorted(CORPUS.glob("*.mucl"))


def load(path):
    path = Path(path)
    return load_model(path.read_text(), str(path))


def smt_command():
    """An SMT-LIB engine command template, or None."""
    cmd = os.environ.get("MINISYNTH_SMT_CMD")
    if cmd:
        return cmd
    if shutil.which("z3"):
        return "z3 {file}"
    if shutil.which("cvc5"):
        return "cvc5 --produce-models {file}"
    return None


def sygus_command():
    """A SyGuS-IF engine command template, or None."""
    cmd = os.environ.get("MINISYNTH_SYGUS_CMD")
    if cmd:
        return cmd
    if shutil.which("cvc5"):
        return "cvc5 --lang=sygus2 {file}"
    try:
        import cvc5  # noqa: F401
    except ImportError:
        return None
    return f"{sys.executable} {CVC5_WRAPPER} {{file}}"


# -- random SYNTH-LIB scripts ---------------------------------------------------

def random_synthlib_script(rng):
    """A well-formed script: zero-arity declares, 1..3 synth functions, 0..5 asserts."""
    from minisynth.ir import (BOOL, INT, BitVecSort, Symbol, SynthFunDecl, apply_fun, bv_const, int_const,
                              mk_term)
    from minisynth.synthlib import (Assert, CheckSat, DeclareConst, DeclareFun, SynthBlockingFun,
                                    SynthLibScript)

    bv = BitVecSort(rng.choice([2, 4, 8]))
    sorts = [BOOL, INT, bv]
    consts = [(f"v{i}", rng.choice(sorts)) for i in range(rng.randint(1, 5))]
    synths = []
    for j in range(rng.randint(1, 3)):
        params = tuple((f"p{k}", rng.choice(sorts)) for k in range(rng.randint(0, 3)))
        synths.append(SynthFunDecl(f"f{j}", params, rng.choice(sorts)))

    def leaf(sort):
        syms = [Symbol(n, s) for n, s in consts if s == sort]
        if syms and rng.random() < 0.7:
            return rng.choice(syms)
        if sort == BOOL:
            return mk_term("=", [int_const(rng.randint(-3, 3)), int_const(0)])
        if sort == INT:
            return int_const(rng.randint(-5, 5))
        return bv_const(rng.randrange(1 << sort.width), sort.width)

    def term(sort, depth):
        if depth == 0 or rng.random() < 0.3:
            return leaf(sort)
        fs = [f for f in synths if f.rsort == sort]
        if fs and rng.random() < 0.4:
            f = rng.choice(fs)
            return apply_fun(f.name, f.param_sorts, f.rsort, [term(s, depth - 1) for s in f.param_sorts], "synth")
        if sort == BOOL:
            choice = rng.randrange(4)
            if choice == 0:
                return mk_term("not", [term(BOOL, depth - 1)])
            if choice == 1:
                return mk_term(rng.choice(["and", "or"]), [term(BOOL, depth - 1), term(BOOL, depth - 1)])
            if choice == 2:
                return mk_term("<=", [term(INT, depth - 1), term(INT, depth - 1)])
            return mk_term("bvult", [term(bv, depth - 1), term(bv, depth - 1)])
        if sort == INT:
            return mk_term(rng.choice(["+", "-"]), [term(INT, depth - 1), term(INT, depth - 1)])
        return mk_term(rng.choice(["bvadd", "bvand"]), [term(sort, depth - 1), term(sort, depth - 1)])

    cmds = [SynthBlockingFun(f) for f in synths]
    for n, s in consts:
        cmds.append(DeclareConst(n, s) if rng.random() < 0.5 else DeclareFun(n, (), s))
    rng.shuffle(cmds)
    cmds += [Assert(term(BOOL, 4)) for _ in range(rng.randint(0, 5))]
    cmds.append(CheckSat())
    return SynthLibScript(tuple(cmds))

import pytest

from minisynth.emit import format_term
from minisynth.frontend import load_model
from minisynth.frontend.ast import ControlCmd
from minisynth.oracle import Sat, Unsat, brute_force_sat
from minisynth.symsim import (demangle, gen_bmc, gen_induction, gen_kinduction, generate_vcs, step_name,
                              unroll_init, unroll_trans)

from support import CORPUS, corpus_files, load


@pytest.fixture(scope="module")
def fib():
    return load(CORPUS / "fib.mucl")


def test_step_names():
    assert step_name("a", 3) == "a__3"
    assert demangle("a__3") == "a@3"
    assert demangle("plain") == "plain"


def test_unroll_init_and_trans(fib):
    assert format_term(unroll_init(fib)) == "(and (= a__0 0) (= b__0 1))"
    assert format_term(unroll_trans(fib, 0)) == "(and (= a__1 b__0) (= b__1 (+ a__0 b__0)))"
    assert format_term(unroll_trans(fib, 4)) == "(and (= a__5 b__4) (= b__5 (+ a__4 b__4)))"


def test_unassigned_variables_stutter():
    m = load(CORPUS / "stutter.mucl")
    assert format_term(unroll_trans(m, 2)) == "(= a__3 a__2)"


def test_defines_are_inlined():
    m = load(CORPUS / "fib_strengthened.mucl")
    step = [vc for vc in gen_induction(m) if vc.label == "induction_step[a_le_b]"][0]
    assert "h" not in format_term(step.assertion)
    assert "(>= a__0 0)" in format_term(step.assertion)


def test_induction_vcs(fib):
    base, step = gen_induction(fib)
    assert base.label == "induction_base[a_le_b]"
    assert format_term(base.assertion) == "(and (= a__0 0) (= b__0 1) (not (<= a__0 b__0)))"
    assert step.label == "induction_step[a_le_b]"
    assert format_term(step.assertion) == (
        "(and (<= a__0 b__0) (= a__1 b__0) (= b__1 (+ a__0 b__0)) (not (<= a__1 b__1)))")
    assert [n for n, _ in step.symbols] == ["a__0", "b__0", "a__1", "b__1"]


def test_fib_step_witness(fib):
    # Smallest violating pre-state in the window [-8, 8], worked out by hand:
    # a0 = -8 forces b1 = b0 - 8, which stays in range only for b0 >= 0.
    _, step = gen_induction(fib)
    res = brute_force_sat(step.assertion, step.symbols)
    assert res == Sat({"a__0": -8, "a__1": 0, "b__0": 0, "b__1": -8})


def test_step_assumes_every_invariant(fib):
    m = load(CORPUS / "fib_strengthened.mucl")
    step = [vc for vc in gen_induction(m) if vc.label == "induction_step[a_le_b]"][0]
    assert brute_force_sat(step.assertion, step.symbols) == Unsat(within_bounds=True)


@pytest.mark.parametrize("k", [0, 1, 4])
def test_bmc_counts(fib, k):
    vcs = gen_bmc(fib, k)
    assert len(vcs) == k + 1
    assert [vc.step for vc in vcs] == list(range(k + 1))
    assert vcs[-1].label == f"bmc[{k}][a_le_b]"


def test_kinduction_counts():
    m = load_model("""module m {
      var x : integer;
      next { x' = x; }
      invariant p : x >= 0;
      invariant q : x <= 5;
    }""")
    vcs = gen_kinduction(m, 3)
    assert sum(vc.kind == "kinduction_base" for vc in vcs) == 6
    assert sum(vc.kind == "kinduction_step" for vc in vcs) == 2


def _strip(vcs):
    return [(vc.assertion, vc.symbols, vc.uses_synth) for vc in vcs]


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.name)
def test_one_induction_equals_induction(path):
    m = load(path)
    assert _strip(gen_kinduction(m, 1)) == _strip(gen_induction(m))


def test_swap2_needs_two_steps():
    m = load(CORPUS / "swap2.mucl")
    step1 = [vc for vc in gen_induction(m) if vc.kind == "induction_step"][0]
    # The only pre-state satisfying !a that leads to a: a = false, b = true.
    assert brute_force_sat(step1.assertion, step1.symbols) == Sat(
        {"a__0": False, "a__1": True, "b__0": True, "b__1": False})
    step2 = [vc for vc in gen_kinduction(m, 2) if vc.kind == "kinduction_step"][0]
    assert brute_force_sat(step2.assertion, step2.symbols) == Unsat()


def test_uses_synth_tracks_reachable_synth_calls():
    m = load(CORPUS / "fib_synth.mucl")
    uses = {vc.label: set(vc.uses_synth) for vc in generate_vcs(m)}
    assert uses == {
        "induction_base[strengthen]": {"h"},
        "induction_step[strengthen]": {"h"},
        "induction_base[a_le_b]": set(),
        "induction_step[a_le_b]": {"h"},
    }


def test_generate_vcs_dedupes_labels(fib):
    cmds = (ControlCmd("bmc", 2), ControlCmd("bmc", 3), ControlCmd("induction", None))
    labels = [vc.label for vc in generate_vcs(fib, cmds)]
    assert len(labels) == len(set(labels)) == 6


def test_bad_bounds(fib):
    with pytest.raises(ValueError):
        gen_kinduction(fib, 0)
    with pytest.raises(ValueError):
        unroll_trans(fib, -1)

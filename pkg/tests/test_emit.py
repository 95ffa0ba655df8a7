import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minisynth.emit import (CheckSynth, Constraint, DeclareVar, SynthFun, format_const, format_term,
                            infer_logic, print_smtlib, print_sygus, print_synthlib, rewrite_to_sygus,
                            vc_to_synthlib)
from minisynth.errors import EmitError
from minisynth.frontend import load_model
from minisynth.ir import (BOOL, INT, ArraySort, BitVecSort, Const, DefineFun, Grammar, Symbol,
                          SynthFunDecl, apply_fun, bv_const, int_const, mk_term)
from minisynth.symsim import generate_vcs
from minisynth.synthlib import (Assert, CheckSat, DeclareConst, DeclareFun, SetLogic, SynthBlockingFun,
                                SynthLibScript)

from support import CORPUS, load, random_synthlib_script

a = Symbol("a", INT)


def test_print_smtlib_exact():
    s = SynthLibScript((SetLogic("LIA"), DeclareConst("a", INT), Assert(mk_term("<=", [a, int_const(0)])),
                        CheckSat()))
    assert print_smtlib(s) == "(set-logic LIA)\n(declare-const a Int)\n(assert (<= a 0))\n(check-sat)\n"
    assert print_smtlib(s, get_model=True).endswith("(check-sat)\n(get-model)\n")


@pytest.mark.parametrize("const, text", [
    (bv_const(255, 8), "#xff"),
    (bv_const(5, 3), "#b101"),
    (bv_const(0, 4), "#x0"),
    (int_const(-5), "(- 5)"),
    (int_const(7), "7"),
    (Const(True, BOOL), "true"),
])
def test_format_const(const, text):
    assert format_const(const) == text


def test_format_sorts_and_indexed_ops():
    m = Symbol("m", ArraySort(INT, BOOL))
    x = Symbol("x", BitVecSort(8))
    assert format_term(mk_term("extract", [x], (3, 0))) == "((_ extract 3 0) x)"
    script = SynthLibScript((DeclareConst("m", m.sort), DeclareConst("a", INT),
                             Assert(mk_term("select", [m, a])), CheckSat()))
    assert "(declare-const m (Array Int Bool))" in print_smtlib(script)


def test_print_smtlib_refuses_synthesis():
    h = SynthFunDecl("h", (("x", INT),), BOOL)
    s = SynthLibScript((SynthBlockingFun(h), DeclareConst("a", INT),
                        Assert(apply_fun("h", (INT,), BOOL, [a], "synth")), CheckSat()))
    with pytest.raises(EmitError):
        print_smtlib(s)
    assert "(synth-blocking-fun h ((x Int)) Bool)" in print_synthlib(s)


def test_implicit_logic_is_inferred():
    s = SynthLibScript((DeclareConst("a", INT), Assert(mk_term("<=", [a, int_const(0)])), CheckSat()))
    assert print_smtlib(s).startswith("(set-logic LIA)\n")


@pytest.mark.parametrize("src, logic", [
    ("var x : integer; invariant p : x + x > 0;", "LIA"),
    ("var x, y : integer; invariant p : x * y > 0;", "NIA"),
    ("var x : integer; invariant p : 3 * x > 0;", "LIA"),
    ("var x : bv4; invariant p : x != 0bv4;", "BV"),
    ("var m : [bv4]bv4; var i : bv4; invariant p : m[i] == i;", "ABV"),
    ("var m : [integer]integer; var i : integer; invariant p : m[i] >= 0;", "ALIA"),
    ("var x : bv4; var y : integer; invariant p : x == 0bv4 || y == 0;", "ALL"),
    ("var b : boolean; invariant p : b;", "LIA"),
])
def test_infer_logic(src, logic):
    m = load_model(f"module m {{ {src} control {{ induction; }} }}")
    scripts = [vc_to_synthlib(vc, m.synth_funs) for vc in generate_vcs(m)]
    assert infer_logic(scripts) == logic


@pytest.fixture(scope="module")
def fib_scripts():
    m = load(CORPUS / "fib_synth.mucl")
    return m, [vc_to_synthlib(vc, m.synth_funs) for vc in generate_vcs(m)]


def test_vc_to_synthlib_shape(fib_scripts):
    _, scripts = fib_scripts
    text = print_synthlib(scripts[1])
    assert text == (
        "(set-logic LIA)\n"
        "(synth-blocking-fun h ((x Int) (y Int)) Bool)\n"
        "(declare-const a__0 Int)\n(declare-const b__0 Int)\n(declare-const a__1 Int)\n(declare-const b__1 Int)\n"
        "(assert (and (h a__0 b__0) (<= a__0 b__0) (= a__1 b__0) (= b__1 (+ a__0 b__0)) (not (h a__1 b__1))))\n"
        "(check-sat)\n")
    # a VC that does not mention h gets no synth-blocking-fun
    assert scripts[2].is_pure_smtlib


def test_rewrite_fib(fib_scripts):
    _, scripts = fib_scripts
    out = rewrite_to_sygus(scripts)
    assert [type(c) for c in out.commands[:2]] == [SetLogic, SynthFun]
    assert len(out.variables) == 12
    assert len(out.constraints) == 4
    assert isinstance(out.commands[-1], CheckSynth)
    text = print_sygus(out)
    assert "(declare-var q1_a__1 Int)" in text
    assert "(constraint (not (and (= q0_a__0 0) (= q0_b__0 1) (not (h q0_a__0 q0_b__0)))))" in text
    assert out.provenance == tuple(s.provenance[0] for s in scripts)


def test_rewrite_renames_apart(fib_scripts):
    _, scripts = fib_scripts
    out = rewrite_to_sygus(scripts)
    names = [n for n, _ in out.variables]
    assert len(names) == len(set(names))
    for i, script in enumerate(scripts):
        own = {n for n in names if n.startswith(f"q{i}_")}
        assert len(own) == sum(isinstance(c, DeclareConst) for c in script.commands)


def test_rewrite_errors():
    h = SynthFunDecl("h", (("x", INT),), BOOL)
    h2 = SynthFunDecl("h", (("x", BOOL),), BOOL)
    g = DeclareFun("g", (INT,), INT)
    with pytest.raises(EmitError):
        rewrite_to_sygus([SynthLibScript((SynthBlockingFun(h), g, CheckSat()))])
    with pytest.raises(EmitError):
        rewrite_to_sygus([SynthLibScript((DeclareConst("a", INT), CheckSat()))])
    with pytest.raises(EmitError):
        rewrite_to_sygus([SynthLibScript((SynthBlockingFun(h), CheckSat())),
                          SynthLibScript((SynthBlockingFun(h2), CheckSat()))])
    with pytest.raises(EmitError):
        rewrite_to_sygus([])


def test_defines_are_carried_over():
    h = SynthFunDecl("h", (("x", INT),), BOOL)
    d = DefineFun("pos", (("v", INT),), BOOL, mk_term(">", [Symbol("v", INT), int_const(0)]))
    s = SynthLibScript((d, SynthBlockingFun(h), DeclareConst("a", INT),
                        Assert(mk_term("and", [apply_fun("pos", (INT,), BOOL, [a], "defined"),
                                               apply_fun("h", (INT,), BOOL, [a], "synth")])), CheckSat()))
    text = print_sygus(rewrite_to_sygus([s, s]))
    assert text.count("(define-fun pos ((v Int)) Bool (> v 0))") == 1
    assert "(pos q1_a)" in text


def test_grammar_printing():
    start = Symbol("B", BOOL)
    e = Symbol("E", BitVecSort(4))
    x = Symbol("x", BitVecSort(4))
    g = Grammar((("B", BOOL), ("E", BitVecSort(4))),
                (("B", (mk_term("bvule", [e, e]), mk_term("not", [start]))),
                 ("E", (x, bv_const(0, 4)))))
    decl = SynthFunDecl("h", (("x", BitVecSort(4)),), BOOL, g)
    s = SynthLibScript((SynthBlockingFun(decl), DeclareConst("y", BitVecSort(4)),
                        Assert(apply_fun("h", (BitVecSort(4),), BOOL, [Symbol("y", BitVecSort(4))], "synth")),
                        CheckSat()))
    text = print_sygus(rewrite_to_sygus([s]))
    assert "(synth-fun h ((x (_ BitVec 4))) Bool\n  ((B Bool) (E (_ BitVec 4)))\n" in text
    assert "  ((B Bool ((bvule E E) (not B))) (E (_ BitVec 4) (x #x0))))\n" in text


def _shape_ok(script):
    out = rewrite_to_sygus([script])
    text = print_sygus(out)
    assert len(out.constraints) == len(script.asserts)
    assert all(c.op == "not" for c in out.constraints)
    assert sum(isinstance(c, CheckSynth) for c in out.commands) == 1
    assert "synth-blocking-fun" not in text
    assert text.count("(check-synth)") == 1
    assert all(isinstance(c, (SetLogic, SynthFun, DefineFun, DeclareVar, Constraint, CheckSynth))
               for c in out.commands)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rewrite_shape_on_random_scripts(seed):
    _shape_ok(random_synthlib_script(random.Random(seed)))

import sys
import textwrap

import pytest
from hypothesis import given
from hypothesis import strategies as st

from minisynth.emit import print_smtlib, vc_to_synthlib
from minisynth.errors import ParseFailure, SexprError, SolverNotFound
from minisynth.ir import BOOL, INT, BitVecSort, SynthFunDecl
from minisynth.sexpr import BVLit, Str, Sym, format_sexpr, parse_sexpr, parse_sexprs
from minisynth.solver import (SolverConfig, define_fun_from_sexpr, run_smt, run_sygus, sort_from_sexpr,
                              term_from_sexpr, value_from_sexpr)
from minisynth.symsim import generate_vcs

from support import CORPUS, load, smt_command


def test_parse_sexprs_atoms():
    out = parse_sexprs('(a (b 12) #x0f #b101 |q s| "s""t" :named) ; comment\nsat')
    assert out == [[Sym("a"), [Sym("b"), 12], BVLit(15, 8), BVLit(5, 3), Sym("q s"), Str('s"t'), Sym(":named")],
                   Sym("sat")]


@pytest.mark.parametrize("text, offset", [("(a (b", 5), ("a)", 1), ('("abc', 1), ("(|x)", 1)])
def test_sexpr_errors_have_offsets(text, offset):
    with pytest.raises(SexprError) as info:
        parse_sexprs(text)
    assert info.value.offset == offset


def test_parse_sexpr_requires_one():
    assert parse_sexpr(" (x) ") == [Sym("x")]
    with pytest.raises(SexprError):
        parse_sexpr("(x) (y)")


sexprs = st.recursive(
    st.one_of(st.integers(0, 1000), st.from_regex(r"[a-z][a-z0-9_\-]{0,5}", fullmatch=True).map(Sym),
              st.tuples(st.integers(0, 255), st.sampled_from([4, 8])).map(lambda t: BVLit(t[0] % (1 << t[1]), t[1])),
              st.text(alphabet='ab "', max_size=4).map(Str)),
    lambda kids: st.lists(kids, max_size=4),
    max_leaves=15,
)


@given(sexprs)
def test_format_parse_round_trip(sx):
    assert parse_sexpr(format_sexpr(sx)) == sx


def test_sorts_values_terms():
    assert sort_from_sexpr(parse_sexpr("(_ BitVec 4)")) == BitVecSort(4)
    assert str(sort_from_sexpr(parse_sexpr("(Array Int Bool)"))) == "(Array Int Bool)"
    assert value_from_sexpr(parse_sexpr("(- 3)"), INT) == -3
    assert value_from_sexpr(parse_sexpr("(_ bv5 4)"), BitVecSort(4)) == 5
    assert value_from_sexpr(Sym("false"), BOOL) is False
    with pytest.raises(ParseFailure):
        value_from_sexpr(Sym("true"), INT)
    t = term_from_sexpr(parse_sexpr("(let ((z (+ x 1))) (distinct z y))"), {"x": INT, "y": INT}, {})
    assert t.sort == BOOL and t.op == "not"


def test_define_fun_from_sexpr():
    d = define_fun_from_sexpr(parse_sexpr("(define-fun h ((x (_ BitVec 4))) Bool (bvule x #x6))"))
    assert d.name == "h" and d.param_sorts == (BitVecSort(4),) and d.rsort == BOOL
    with pytest.raises(ParseFailure):
        define_fun_from_sexpr(parse_sexpr("(define-fun h ((x Int)) Bool (+ x 1))"))


# -- subprocess behaviour, with scripted fake engines -----------------------------------

def fake(tmp_path, body, name="engine.py"):
    path = tmp_path / name
    path.write_text("import sys, time\n" + textwrap.dedent(body))
    return f"{sys.executable} {path} {{file}}"


def cfg(cmd, **kw):
    return SolverConfig(smt_command=cmd, sygus_command=cmd, **kw)


def test_smt_model_styles(tmp_path):
    cmd = fake(tmp_path, """
        print("sat")
        print("(model (define-fun a__0 () Int (- 3)) (define-fun p__1 () Bool true))")
    """)
    out = run_smt("(check-sat)", cfg(cmd))
    assert out.verdict == "sat" and out.model == {"a__0": -3, "p__1": True}
    cmd = fake(tmp_path, """
        print("sat")
        print("((define-fun x__0 () (_ BitVec 4) #x3))")
    """)
    assert run_smt("", cfg(cmd)).model == {"x__0": 3}


def test_smt_verdicts_and_errors(tmp_path):
    assert run_smt("", cfg(fake(tmp_path, 'print("unsat")'))).verdict == "unsat"
    assert run_smt("", cfg(fake(tmp_path, 'print("unknown")'))).verdict == "unknown"
    # an error after the verdict (get-model on unsat) is harmless
    out = run_smt("", cfg(fake(tmp_path, 'print("unsat")\nprint(\'(error "model is not available")\')')))
    assert out.verdict == "unsat"
    with pytest.raises(ParseFailure):
        run_smt("", cfg(fake(tmp_path, 'print(\'(error "bad")\')')))
    with pytest.raises(ParseFailure):
        run_smt("", cfg(fake(tmp_path, 'print("hello (")')))
    with pytest.raises(ParseFailure):
        run_smt("", cfg(fake(tmp_path, "pass")))


def test_script_reaches_engine(tmp_path):
    cmd = fake(tmp_path, """
        text = open(sys.argv[1]).read()
        print("sat" if "(check-sat)" in text else "unsat")
    """)
    assert run_smt("(check-sat)\n", cfg(cmd)).verdict == "sat"


def test_template_without_placeholder(tmp_path):
    path = tmp_path / "e.py"
    path.write_text("import sys\nprint('unsat' if sys.argv[1].endswith('.smt2') else 'sat')\n")
    assert run_smt("", SolverConfig(smt_command=f"{sys.executable} {path}")).verdict == "unsat"


def test_timeout(tmp_path):
    out = run_smt("", cfg(fake(tmp_path, "time.sleep(5)\nprint('sat')"), timeout=0.3))
    assert out.verdict == "unknown" and out.timed_out


def test_solver_not_found():
    with pytest.raises(SolverNotFound):
        run_smt("", SolverConfig())
    with pytest.raises(SolverNotFound):
        run_smt("", SolverConfig(smt_command="/nonexistent/solver {file}"))


def test_from_env(monkeypatch):
    monkeypatch.setenv("MINISYNTH_SMT_CMD", "z3 {file}")
    monkeypatch.delenv("MINISYNTH_SYGUS_CMD", raising=False)
    c = SolverConfig.from_env(timeout=5)
    assert (c.smt_command, c.sygus_command, c.timeout) == ("z3 {file}", None, 5)


H = {"h": SynthFunDecl("h", (("x", INT), ("y", INT)), BOOL)}


def test_sygus_outcomes(tmp_path):
    solved = fake(tmp_path, 'print("(\\n(define-fun h ((x Int) (y Int)) Bool (>= x 0))\\n)")')
    out = run_sygus("", cfg(solved), H)
    assert out.verdict == "solved" and out.definitions[0].name == "h"
    assert run_sygus("", cfg(fake(tmp_path, 'print("infeasible")'))).verdict == "infeasible"
    assert run_sygus("", cfg(fake(tmp_path, 'print("fail")'))).verdict == "infeasible"
    assert run_sygus("", cfg(fake(tmp_path, 'print("unknown")'))).verdict == "unknown"
    wrong = fake(tmp_path, 'print("(define-fun h ((x Int)) Bool (>= x 0))")')
    with pytest.raises(ParseFailure):
        run_sygus("", cfg(wrong), H)
    with pytest.raises(ParseFailure):
        run_sygus("", cfg(fake(tmp_path, "sys.exit(3)")))


@pytest.mark.skipif(smt_command() is None, reason="no SMT-LIB engine installed")
def test_real_smt_engine_on_fib():
    m = load(CORPUS / "fib.mucl")
    base, step = generate_vcs(m)
    config = SolverConfig(smt_command=smt_command(), timeout=30)
    assert run_smt(print_smtlib(vc_to_synthlib(base, {}), get_model=True), config).verdict == "unsat"
    out = run_smt(print_smtlib(vc_to_synthlib(step, {}), get_model=True), config)
    assert out.verdict == "sat"
    v = out.model
    assert v["a__0"] <= v["b__0"] and v["a__1"] == v["b__0"] and v["a__1"] > v["b__1"]

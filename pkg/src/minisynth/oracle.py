"""Finite-domain ground truth: term evaluation and exhaustive search.

Everything here is independent of the SMT/SyGuS back ends and is used to
validate their answers. Int symbols range over a small window, so an Unsat
answer for a query with Int symbols only means "unsat within the window".
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import UnboundSymbol, UnsupportedSort
from .frontend.typecheck import TypedModel
from .ir import (Apply, ArraySort, BitVecSort, BoolSort, Const, DefineFun,
                 FunApp, IntSort, Ite, Sort, Symbol, Term, free_symbols,
                 inline_functions)


@dataclass(frozen=True)
class DomainBounds:
    int_lo: int = -8
    int_hi: int = 8
    max_bv_width: int = 10
    max_total_assignments: int = 10**7

    def __post_init__(self):
        if self.int_lo > self.int_hi:
            raise ValueError("int_lo must not exceed int_hi")
        if self.max_bv_width < 1 or self.max_total_assignments < 1:
            raise ValueError("bounds must be positive")

    def domain(self, sort: Sort) -> range | tuple:
        if isinstance(sort, BoolSort):
            return (False, True)
        if isinstance(sort, IntSort):
            return range(self.int_lo, self.int_hi + 1)
        if isinstance(sort, BitVecSort):
            return range(1 << sort.width)
        raise UnsupportedSort(f"cannot enumerate values of {sort}")

    def contains(self, sort: Sort, value) -> bool:
        if isinstance(sort, IntSort):
            return self.int_lo <= value <= self.int_hi
        return True


@dataclass
class Valuation:
    values: dict = field(default_factory=dict)
    funcs: dict = field(default_factory=dict)  # name -> DefineFun


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _bv_mask(sort) -> int:
    return (1 << sort.width) - 1


def _apply(op: str, vals: list, term: Apply):
    if op == "not":
        return not vals[0]
    if op == "and":
        return all(vals)
    if op == "or":
        return any(vals)
    if op == "=>":
        return (not vals[0]) or vals[1]
    if op == "=":
        return vals[0] == vals[1]
    if op == "+":
        return sum(vals)
    if op == "-":
        return -vals[0] if len(vals) == 1 else vals[0] - vals[1]
    if op == "*":
        out = 1
        for v in vals:
            out *= v
        return out
    if op == "<=":
        return vals[0] <= vals[1]
    if op == "<":
        return vals[0] < vals[1]
    if op == ">=":
        return vals[0] >= vals[1]
    if op == ">":
        return vals[0] > vals[1]
    if op == "bvadd":
        return (vals[0] + vals[1]) & _bv_mask(term.sort)
    if op == "bvsub":
        return (vals[0] - vals[1]) & _bv_mask(term.sort)
    if op == "bvand":
        return vals[0] & vals[1]
    if op == "bvor":
        return vals[0] | vals[1]
    if op == "bvnot":
        return ~vals[0] & _bv_mask(term.sort)
    if op == "bvult":
        return vals[0] < vals[1]
    if op == "bvule":
        return vals[0] <= vals[1]
    if op == "concat":
        return (vals[0] << term.args[1].sort.width) | vals[1]
    if op == "extract":
        hi, lo = term.indices
        return (vals[0] >> lo) & ((1 << (hi - lo + 1)) - 1)
    raise UnsupportedSort(f"operator {op} is not supported by the evaluator")


def _check_sort(sort: Sort):
    if isinstance(sort, ArraySort):
        raise UnsupportedSort("arrays are not supported by the oracle")


def eval_term(term: Term, valuation: Valuation | Mapping):
    """Evaluate a term under a total valuation of its free symbols."""
    if not isinstance(valuation, Valuation):
        valuation = Valuation(dict(valuation))
    values, funcs = valuation.values, valuation.funcs

    def go(t: Term, env: Mapping):
        _check_sort(t.sort)
        if isinstance(t, Const):
            return t.value
        if isinstance(t, Symbol):
            if t.name not in env:
                raise UnboundSymbol(f"no value for {t.name}")
            return env[t.name]
        if isinstance(t, Ite):
            return go(t.then, env) if go(t.cond, env) else go(t.else_, env)
        if isinstance(t, FunApp):
            d = funcs.get(t.name)
            if d is None:
                raise UnboundSymbol(f"no definition for function {t.name}")
            args = [go(a, env) for a in t.args]
            return go(d.body, {p: v for (p, _), v in zip(d.params, args)})
        if isinstance(t, Apply):
            for a in t.args:
                _check_sort(a.sort)
            return _apply(t.op, [go(a, env) for a in t.args], t)
        raise TypeError(t)

    return go(term, values)


# ---------------------------------------------------------------------------
# Compilation to closures (used by the search)
# ---------------------------------------------------------------------------

def _compile(t: Term, funcs: Mapping):
    _check_sort(t.sort)
    if isinstance(t, Const):
        v = t.value
        return lambda env: v
    if isinstance(t, Symbol):
        name = t.name
        return lambda env: env[name]
    if isinstance(t, Ite):
        c, a, b = (_compile(x, funcs) for x in (t.cond, t.then, t.else_))
        return lambda env: a(env) if c(env) else b(env)
    if isinstance(t, FunApp):
        d = funcs.get(t.name)
        if d is None:
            raise UnboundSymbol(f"no definition for function {t.name}")
        body = _compile(d.body, funcs)
        names = [p for p, _ in d.params]
        args = [_compile(a, funcs) for a in t.args]
        return lambda env: body(dict(zip(names, [f(env) for f in args])))
    if isinstance(t, Apply):
        for a in t.args:
            _check_sort(a.sort)
        fs = [_compile(a, funcs) for a in t.args]
        op = t.op
        if op == "and":
            return lambda env: all(f(env) for f in fs)
        if op == "or":
            return lambda env: any(f(env) for f in fs)
        if op == "not":
            f0 = fs[0]
            return lambda env: not f0(env)
        if op == "=":
            f0, f1 = fs
            return lambda env: f0(env) == f1(env)
        if op == "=>":
            f0, f1 = fs
            return lambda env: (not f0(env)) or f1(env)
        return lambda env: _apply(op, [f(env) for f in fs], t)
    raise TypeError(t)


# ---------------------------------------------------------------------------
# Exhaustive search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sat:
    witness: dict


@dataclass(frozen=True)
class Unsat:
    # True when Int symbols were enumerated, so "unsat" holds only inside the window.
    within_bounds: bool = False


@dataclass(frozen=True)
class Bounded:
    reason: str = "assignment cap reached"


class _CapReached(Exception):
    pass


def _conjuncts(t: Term) -> list:
    if isinstance(t, Apply) and t.op == "and":
        return [c for a in t.args for c in _conjuncts(a)]
    if (isinstance(t, Apply) and t.op == "not" and isinstance(t.args[0], Apply)
            and t.args[0].op == "not"):
        return _conjuncts(t.args[0].args[0])
    return [t]


def _definition(c: Term):
    """``(sym, rhs)`` if conjunct ``c`` is ``sym = rhs`` with sym not in rhs."""
    if isinstance(c, Apply) and c.op == "=":
        lhs, rhs = c.args
        for s, e in ((lhs, rhs), (rhs, lhs)):
            if isinstance(s, Symbol) and (s.name, s.sort) not in free_symbols(e):
                return s, e
    return None


class _Search:
    """Backtracking search over a conjunction.

    Conjuncts of the form ``v = e`` compute ``v`` from already-assigned
    symbols instead of enumerating it; the computed value must still lie in
    the domain, so the set of solutions equals that of naive enumeration.
    """

    def __init__(self, assertion: Term, symbols, bounds: DomainBounds, funcs: Mapping):
        self.bounds = bounds
        self.sorts = dict(symbols)
        for name, sort in free_symbols(assertion):
            self.sorts.setdefault(name, sort)
        self.conj = []
        for c in _conjuncts(assertion):
            syms = {n for n, _ in free_symbols(c)}
            self.conj.append((c, syms, _compile(c, funcs)))
        self.defs = []
        for i, (c, _, _) in enumerate(self.conj):
            d = _definition(c)
            if d is not None:
                sym, rhs = d
                self.defs.append((i, sym.name, {n for n, _ in free_symbols(rhs)}, _compile(rhs, funcs)))
        self.count = 0

    def _plan(self, fixed: Mapping):
        assigned = set(fixed)
        attached = set()
        steps = []
        def_targets = {name for _, name, _, _ in self.defs}
        used_defs = set()

        def attach():
            checks = []
            for i, (_, syms, fn) in enumerate(self.conj):
                if i not in attached and syms <= assigned:
                    attached.add(i)
                    checks.append(fn)
            return checks

        steps.append(("checks", None, None, attach()))
        pending = sorted(n for n in self.sorts if n not in assigned)
        while pending:
            step = None
            for i, name, deps, fn in self.defs:
                if i not in used_defs and name not in assigned and deps <= assigned:
                    used_defs.add(i)
                    attached.add(i)
                    step = ("define", name, fn)
                    break
            if step is None:
                # Prefer symbols that no remaining definition could compute.
                free = [n for n in pending if n not in def_targets] or pending
                step = ("enum", free[0], None)
            name = step[1]
            assigned.add(name)
            pending.remove(name)
            steps.append(step + (attach(),))
        return steps

    def run(self, fixed: Mapping | None = None):
        """First solution found (search order), or None. Raises _CapReached."""
        fixed = dict(fixed or {})
        for name, value in fixed.items():
            if not self.bounds.contains(self.sorts[name], value):
                return None
        steps = self._plan(fixed)
        env = dict(fixed)
        cap = self.bounds.max_total_assignments
        domains = {s[1]: self.bounds.domain(self.sorts[s[1]]) for s in steps if s[0] == "enum"}

        def go(k: int) -> bool:
            if k == len(steps):
                return True
            kind, name, fn, checks = steps[k]
            if kind == "checks":
                return all(c(env) for c in checks) and go(k + 1)
            if kind == "define":
                value = fn(env)
                if not self.bounds.contains(self.sorts[name], value):
                    return False
                env[name] = value
                if all(c(env) for c in checks) and go(k + 1):
                    return True
                del env[name]
                return False
            for value in domains[name]:
                self.count += 1
                if self.count > cap:
                    raise _CapReached
                env[name] = value
                if all(c(env) for c in checks) and go(k + 1):
                    return True
            del env[name]
            return False

        return dict(env) if go(0) else None


def brute_force_sat(assertion: Term, symbols: Iterable, bounds: DomainBounds | None = None,
                    funcs: Mapping[str, DefineFun] | None = None):
    """Decide a Bool term by exhaustive enumeration over finite domains.

    Returns ``Sat(witness)`` with the witness that comes first in
    lexicographic order (symbols sorted by name, values ascending),
    ``Unsat`` or ``Bounded``.
    """
    bounds = bounds or DomainBounds()
    symbols = list(symbols)
    for _, sort in symbols:
        _check_sort(sort)
        if isinstance(sort, BitVecSort) and sort.width > bounds.max_bv_width:
            return Bounded(f"bit-vector width {sort.width} exceeds {bounds.max_bv_width}")
    search = _Search(assertion, symbols, bounds, funcs or {})
    ints = any(isinstance(s, IntSort) for s in search.sorts.values())
    try:
        found = search.run()
        if found is None:
            return Unsat(within_bounds=ints)
        # Refine to the lexicographically smallest witness, one symbol at a time.
        fixed: dict = {}
        for name in sorted(search.sorts):
            dom = bounds.domain(search.sorts[name])
            for value in dom:
                if value == found[name]:
                    fixed[name] = value
                    break
                trial = search.run({**fixed, name: value})
                if trial is not None:
                    fixed[name] = value
                    found = trial
                    break
        return Sat(fixed)
    except _CapReached:
        return Bounded()


# ---------------------------------------------------------------------------
# Solution validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Valid:
    within_bounds: bool = False


@dataclass(frozen=True)
class Invalid:
    label: str
    witness: dict


def validate_solution(vcs, solution_defs: Mapping[str, DefineFun] | Iterable[DefineFun],
                      bounds: DomainBounds | None = None):
    """Check that every VC becomes unsatisfiable once the solutions are inlined."""
    if not isinstance(solution_defs, Mapping):
        solution_defs = {d.name: d for d in solution_defs}
    within = False
    bounded = None
    for vc in vcs:
        missing = vc.uses_synth - set(solution_defs)
        if missing:
            raise UnboundSymbol(f"no solution given for {sorted(missing)}")
        assertion = inline_functions(vc.assertion, solution_defs)
        res = brute_force_sat(assertion, vc.symbols, bounds)
        if isinstance(res, Sat):
            return Invalid(vc.label, res.witness)
        if isinstance(res, Bounded):
            bounded = bounded or res
        elif res.within_bounds:
            within = True
    if bounded is not None:
        return bounded
    return Valid(within_bounds=within)


# ---------------------------------------------------------------------------
# Explicit-state reachability
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Reachability:
    var_names: tuple
    input_names: tuple
    layers: tuple  # layers[t]: frozenset of states reachable in exactly t steps

    @property
    def states(self) -> frozenset:
        return frozenset().union(*self.layers)

    def as_dict(self, state: tuple) -> dict:
        return dict(zip(self.var_names, state))


def explicit_reach(model: TypedModel, bounds: DomainBounds | None = None, horizon: int = 10) -> Reachability:
    """Breadth-first exploration of concrete states, ``horizon`` steps deep.

    States leaving the Int window are dropped, matching the symbolic side
    where every step symbol ranges over the same window.
    """
    bounds = bounds or DomainBounds()
    defs = model.defines
    var_names = tuple(n for n, _ in model.state_vars)
    var_sorts = [s for _, s in model.state_vars]
    in_names = tuple(n for n, _ in model.inputs)
    in_sorts = [s for _, s in model.inputs]
    for s in var_sorts + in_sorts:
        _check_sort(s)
    init = [(v, _compile(inline_functions(e, defs), {})) for v, e in model.init]
    nxt = {v: _compile(inline_functions(e, defs), {}) for v, e in model.next}
    input_space = list(itertools.product(*(bounds.domain(s) for s in in_sorts)))

    first = set()
    for state in itertools.product(*(bounds.domain(s) for s in var_sorts)):
        env = dict(zip(var_names, state))
        for ins in input_space:
            env.update(zip(in_names, ins))
            if all(fn(env) == env[v] for v, fn in init):
                first.add(state)
                break
    layers = [frozenset(first)]
    for _ in range(horizon):
        succ = set()
        for state in layers[-1]:
            env = dict(zip(var_names, state))
            for ins in input_space:
                env.update(zip(in_names, ins))
                new = tuple(nxt[v](env) if v in nxt else env[v] for v in var_names)
                if all(bounds.contains(s, x) for s, x in zip(var_sorts, new)):
                    succ.add(new)
        layers.append(frozenset(succ))
    return Reachability(var_names, in_names, tuple(layers))

"""Unroll a typed model into verification conditions.

Each VerificationCondition carries the *negation* of one proof obligation:
a satisfying assignment of ``assertion`` is a counterexample.
"""
from __future__ import annotations

from dataclasses import dataclass

from .frontend.typecheck import TypedModel
from .ir import (Symbol, Term, conjoin, free_symbols, fun_names,
                 inline_functions, mk_term, substitute)

VC_KINDS = ("bmc_step", "induction_base", "induction_step", "kinduction_base", "kinduction_step")


def step_name(var: str, t: int) -> str:
    return f"{var}__{t}"


def demangle(name: str) -> str:
    """``a__3`` -> ``a@3``; names of other shapes are returned unchanged."""
    base, sep, step = name.rpartition("__")
    if sep and step.isdigit():
        return f"{base}@{step}"
    return name


class StepSymbolTable:
    """Fresh per-step copies of state variables and inputs.

    User identifiers cannot contain ``__``, so ``v__t`` never collides with them.
    """

    def __init__(self, model: TypedModel):
        self.state_sorts = dict(model.state_vars)
        self.input_sorts = dict(model.inputs)
        self._order = {n: i for i, (n, _) in enumerate(model.state_vars + model.inputs)}

    def state(self, var: str, t: int) -> Symbol:
        return Symbol(step_name(var, t), self.state_sorts[var])

    def input(self, var: str, t: int) -> Symbol:
        return Symbol(step_name(var, t), self.input_sorts[var])

    def at(self, t: int) -> dict:
        """Binding from surface names to their step-``t`` symbols."""
        binding = {v: self.state(v, t) for v in self.state_sorts}
        binding.update({v: self.input(v, t) for v in self.input_sorts})
        return binding

    def sort_key(self, name: str):
        base, _, step = name.rpartition("__")
        return (int(step), self._order.get(base, len(self._order)), base)


@dataclass(frozen=True)
class VerificationCondition:
    label: str
    kind: str
    assertion: Term
    symbols: tuple  # ((name, Sort), ...)
    uses_synth: frozenset
    invariant: str = ""
    step: int | None = None


class _Unroller:
    def __init__(self, model: TypedModel):
        self.model = model
        self.table = StepSymbolTable(model)
        defs = model.defines
        self.init = tuple((v, inline_functions(e, defs)) for v, e in model.init)
        self.next = dict((v, inline_functions(e, defs)) for v, e in model.next)
        self.invariants = tuple((lbl, inline_functions(e, defs)) for lbl, e in model.invariants)

    def init_term(self) -> Term:
        b = self.table.at(0)
        return conjoin(mk_term("=", [self.table.state(v, 0), substitute(e, b)]) for v, e in self.init)

    def trans_term(self, t: int) -> Term:
        b = self.table.at(t)
        eqs = []
        for v, _ in self.model.state_vars:
            rhs = substitute(self.next[v], b) if v in self.next else self.table.state(v, t)
            eqs.append(mk_term("=", [self.table.state(v, t + 1), rhs]))
        return conjoin(eqs)

    def inv_at(self, j: int, t: int) -> Term:
        return substitute(self.invariants[j][1], self.table.at(t))

    def all_invs_at(self, t: int) -> Term:
        return conjoin(self.inv_at(j, t) for j in range(len(self.invariants)))

    def path(self, t: int) -> list:
        return [self.init_term()] + [self.trans_term(u) for u in range(t)]

    def vc(self, label, kind, parts, j, step=None) -> VerificationCondition:
        assertion = conjoin(parts)
        syms = sorted(free_symbols(assertion), key=lambda s: self.table.sort_key(s[0]))
        return VerificationCondition(
            label=label,
            kind=kind,
            assertion=assertion,
            symbols=tuple(syms),
            uses_synth=frozenset(fun_names(assertion, "synth")),
            invariant=self.invariants[j][0],
            step=step,
        )

    def negated_inv(self, j: int, t: int) -> Term:
        return mk_term("not", [self.inv_at(j, t)])


def unroll_init(model: TypedModel) -> Term:
    return _Unroller(model).init_term()


def unroll_trans(model: TypedModel, t: int) -> Term:
    if t < 0:
        raise ValueError("step index must be non-negative")
    return _Unroller(model).trans_term(t)


def gen_bmc(model: TypedModel, k: int) -> list[VerificationCondition]:
    """One VC per (step 0..k, invariant): a path of length t that violates it at t."""
    if k < 0:
        raise ValueError("bound must be non-negative")
    u = _Unroller(model)
    out = []
    for t in range(k + 1):
        path = u.path(t)
        for j, (label, _) in enumerate(u.invariants):
            out.append(u.vc(f"bmc[{t}][{label}]", "bmc_step", path + [u.negated_inv(j, t)], j, t))
    return out


def _induction(model: TypedModel, k: int, base_kind: str, step_kind: str, labels) -> list:
    u = _Unroller(model)
    if not u.invariants:
        raise ValueError("induction needs at least one invariant")
    out = []
    for j, (inv_label, _) in enumerate(u.invariants):
        for t in range(k):
            out.append(u.vc(labels(base_kind, t, inv_label), base_kind,
                            u.path(t) + [u.negated_inv(j, t)], j, t))
        # Start from an arbitrary state: step-0 symbols with no init constraint.
        hyp = []
        for t in range(k):
            hyp += [u.all_invs_at(t), u.trans_term(t)]
        out.append(u.vc(labels(step_kind, None, inv_label), step_kind,
                        hyp + [u.negated_inv(j, k)], j, k))
    return out


def gen_induction(model: TypedModel) -> list[VerificationCondition]:
    """Base and step VC per invariant. The step assumes every invariant in the pre-state."""
    return _induction(model, 1, "induction_base", "induction_step",
                      lambda kind, t, inv: f"{kind}[{inv}]")


def gen_kinduction(model: TypedModel, k: int) -> list[VerificationCondition]:
    if k < 1:
        raise ValueError("k-induction needs k >= 1")
    return _induction(model, k, "kinduction_base", "kinduction_step",
                      lambda kind, t, inv: f"{kind}[{t}][{inv}]" if t is not None else f"{kind}[{inv}]")


def generate_vcs(model: TypedModel, commands=None) -> list[VerificationCondition]:
    """VCs for every proof command of the control block (or ``commands``).

    Repeated labels (e.g. from ``bmc(2); bmc(3);``) denote identical
    obligations and are kept once.
    """
    commands = model.proof_commands if commands is None else commands
    out, seen = [], set()
    for c in commands:
        if c.kind == "bmc":
            vcs = gen_bmc(model, c.k)
        elif c.kind == "induction":
            vcs = gen_induction(model)
        elif c.kind == "kinduction":
            vcs = gen_kinduction(model, c.k)
        else:
            continue
        for vc in vcs:
            if vc.label not in seen:
                seen.add(vc.label)
                out.append(vc)
    return out

"""Independent replay of positive verdicts.

Only the witness terms from a report are used; every check goes through the
entailment engine, term evaluation and the Leibniz congruence, never through
the relations or filter structures the classifier derived them from.
"""
from __future__ import annotations

import numpy as np

from .algebra import MatrixFamily, enumerate_subuniverses, eval_term_array, submatrix
from .entailment import entails_all
from .errors import WitnessRejected
from .filters import enumerate_unary_filters
from .free import generate_free_algebra, term_function
from .leibniz import TranslationSystem, leibniz_congruence
from .terms import App, Term, Var, format_term, substitute


def _rejected(check: str, res, formulas: list[Term] | None = None) -> WitnessRejected:
    member, assignment = res.counterexample
    detail = {"assignment": list(assignment)}
    if formulas is not None and res.conclusion_index is not None:
        detail["formula"] = format_term(formulas[res.conclusion_index])
    return WitnessRejected(check, member, detail)


def check_delta_reflexive(family: MatrixFamily, delta: list[Term]) -> None:
    diag = [substitute(d, {1: Var(0)}) for d in delta]
    res = entails_all(family, [], diag, variables=1)
    if not res.holds:
        raise _rejected("|- Delta(x,x)", res, diag)


def check_delta_detachment(family: MatrixFamily, delta: list[Term]) -> None:
    res = entails_all(family, [Var(0), *delta], [Var(1)], variables=2)
    if not res.holds:
        raise _rejected("x, Delta(x,y) |- y", res)


def check_congruence_rules(family: MatrixFamily, delta: list[Term]) -> None:
    for name, k in family.signature:
        if k == 0:
            continue
        premises = [
            substitute(d, {0: Var(2 * j), 1: Var(2 * j + 1)}) for j in range(k) for d in delta
        ]
        left = App(name, tuple(Var(2 * j) for j in range(k)))
        right = App(name, tuple(Var(2 * j + 1) for j in range(k)))
        conclusions = [substitute(d, {0: left, 1: right}) for d in delta]
        res = entails_all(family, premises, conclusions, variables=2 * k)
        if not res.holds:
            raise _rejected(f"congruence rule for {name}", res, conclusions)


def check_tau_submatrices(family: MatrixFamily, tau: list[tuple[Term, Term]]) -> None:
    for i, m in enumerate(family.members):
        for B in enumerate_subuniverses(m.algebra):
            theta = leibniz_congruence(submatrix(m, B)).partition.array()
            pos = np.full(m.size, -1, dtype=np.int64)
            pos[list(B)] = np.arange(len(B))
            col = [np.asarray(B, dtype=np.int64)]
            solved = np.ones(len(B), dtype=bool)
            for e, d in tau:
                ve = np.broadcast_to(eval_term_array(m.algebra, e, col), (len(B),))
                vd = np.broadcast_to(eval_term_array(m.algebra, d, col), (len(B),))
                solved &= theta[pos[ve]] == theta[pos[vd]]
            inside = m.mask[list(B)]
            bad = np.flatnonzero(solved != inside)
            if len(bad):
                b = int(B[int(bad[0])])
                raise WitnessRejected(
                    "tau defines truth on submatrices",
                    i,
                    {"subuniverse": list(B), "element": b, "designated": bool(inside[bad[0]])},
                )


def check_tau_filters(family: MatrixFamily, tau: list[tuple[Term, Term]], free_budget: int | None = None) -> None:
    """Every filter on Tm(x) must be the τ-solution set modulo its Leibniz congruence."""
    free1 = generate_free_algebra(family, 1, free_budget)
    S = len(free1)
    G = free1.global_values
    offsets = free1.space.offsets
    system = TranslationSystem(S, [t for t in free1.op_tables() if t.ndim > 0])
    composed = []
    for e, d in tau:
        idx = []
        for t in (e, d):
            tf = term_function(family, t, 1)
            glob = np.concatenate([np.asarray(tab) + offsets[i] for i, tab in enumerate(tf.tables)])
            idx.append(free1.lookup_global(glob[G]))
        composed.append(idx)
    for Gamma in enumerate_unary_filters(free1, budget=None):
        gamma = np.zeros(S, dtype=bool)
        gamma[list(Gamma)] = True
        L, _ = system.refine(gamma.astype(np.int64))
        solved = np.ones(S, dtype=bool)
        for ie, idd in composed:
            solved &= L[ie] == L[idd]
        bad = np.flatnonzero(solved != gamma)
        if len(bad):
            raise WitnessRejected(
                "tau defines every filter of Tm(x)",
                None,
                {
                    "filter": [format_term(free1.representative(j)) for j in Gamma],
                    "formula": format_term(free1.representative(int(bad[0]))),
                },
            )


def verify_witness(family: MatrixFamily, report) -> bool:
    """Replay every positive verdict of ``report`` over the reduced ``family``."""
    v = report.verdicts
    if v["protoalgebraic"].holds:
        delta = v["protoalgebraic"].witness["delta"]
        check_delta_reflexive(family, delta)
        check_delta_detachment(family, delta)
    if v["equivalential"].holds:
        delta = v["equivalential"].witness["delta"]
        check_delta_reflexive(family, delta)
        check_delta_detachment(family, delta)
        check_congruence_rules(family, delta)
    for name in ("weakly_algebraizable", "algebraizable"):
        if v[name].holds:
            w = v[name].witness
            check_delta_reflexive(family, w["delta"])
            check_delta_detachment(family, w["delta"])
            if name == "algebraizable":
                check_congruence_rules(family, w["delta"])
            check_tau_submatrices(family, w["tau"])
    te = v["truth_equational"]
    if te.holds:
        if te.witness.get("method") == "filters":
            check_tau_filters(family, te.witness["tau"])
        else:
            if not v["protoalgebraic"].holds:
                raise WitnessRejected("truth-equationality via submatrices needs protoalgebraicity")
            check_tau_submatrices(family, te.witness["tau"])
    return True

"""Placement of the logic of a matrix family in the Leibniz hierarchy.

All decisions use the maximal candidates: Δ(x,y) is every binary term whose
diagonal is designated in every member, τ(x) every pair of unary terms that
agree on all designated elements.  Membership questions about the relations
``R_i`` and about τ-separation are answered by the witness searches in
:mod:`search`; the explicit candidates built from the free algebras are kept
for small inputs, for reporting sizes and as test oracles.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import Matrix, MatrixFamily, enumerate_subuniverses, submatrix
from .errors import BudgetExceeded, ValidationError
from .filters import (
    DEFAULT_FILTER_BUDGET,
    FilterTest,
    check_filters,
    enumerate_unary_filters,
    tau_groups,
)
from .free import FreeAlgebra, TermFunction, generate_free_algebra
from .leibniz import is_reduced, leibniz_congruence, reduce_matrix
from .search import DeltaSearch, TauSearch
from .space import FamilySpace
from .terms import Term, format_term, term_size

CLASSES = (
    "protoalgebraic",
    "equivalential",
    "weakly_algebraizable",
    "algebraizable",
    "truth_equational",
)


@dataclass
class ClassifyConfig:
    free_budget: int = 1_000
    pair_budget: int = 2_000
    pair_gate: int = 16
    closure_budget: int = 200_000
    subuniverse_budget: int = 10_000
    filter_budget: int = DEFAULT_FILTER_BUDGET
    table_cap: int = 4_000_000
    naive_filters: bool = False
    audit: bool = True
    audit_cap: int = 5_000_000
    fast_paths: bool = False
    verify: bool = True
    witness_cap: int = 8


@dataclass
class Verdict:
    holds: bool | None
    witness: dict | None = None
    counterexample: dict | None = None
    note: str | None = None

    @property
    def unknown(self) -> bool:
        return self.holds is None


@dataclass
class ClassificationReport:
    family: MatrixFamily
    verdicts: dict[str, Verdict]
    sizes: dict[str, int | None] = field(default_factory=dict)
    timings_ms: dict[str, float] = field(default_factory=dict)
    input_family: MatrixFamily | None = None

    def __getitem__(self, name: str) -> Verdict:
        return self.verdicts[name]

    def vector(self) -> tuple[bool | None, ...]:
        return tuple(self.verdicts[c].holds for c in CLASSES)

    @property
    def any_unknown(self) -> bool:
        return any(v.holds is None for v in self.verdicts.values())


def _and(*vals: bool | None) -> bool | None:
    if any(v is False for v in vals):
        return False
    if any(v is None for v in vals):
        return None
    return True


def _sorted_terms(terms) -> list[Term]:
    uniq = {format_term(t): t for t in terms}
    return [uniq[k] for k in sorted(uniq)]


def _sorted_pairs(pairs) -> list[tuple[Term, Term]]:
    uniq = {}
    for e, d in pairs:
        a, b = format_term(e), format_term(d)
        if (term_size(e), a) > (term_size(d), b):
            a, b, e, d = b, a, d, e
        uniq[(a, b)] = (e, d)
    return [uniq[k] for k in sorted(uniq)]


def ensure_reduced(family: MatrixFamily) -> None:
    for i, m in enumerate(family.members):
        if not is_reduced(m):
            raise ValidationError(f"member {i} is not reduced")


class Analysis:
    """Lazily computed facts about one pre-reduced family, shared across predicates."""

    def __init__(self, family: MatrixFamily, config: ClassifyConfig | None = None):
        self.family = family
        self.config = config or ClassifyConfig()
        self.space = FamilySpace(family)
        self.delta = DeltaSearch(family, self.space, self.config.closure_budget)
        self.tau = TauSearch(family, self.space, self.config.closure_budget)
        self._cache: dict[str, object] = {}
        self.timings: dict[str, float] = {}

    def _memo(self, key: str, fn: Callable):
        if key not in self._cache:
            t0 = time.perf_counter()
            try:
                self._cache[key] = fn()
            except BudgetExceeded as exc:
                self._cache[key] = exc
            self.timings[key] = (time.perf_counter() - t0) * 1000
        val = self._cache[key]
        if isinstance(val, BudgetExceeded):
            raise val
        return val

    def _verdict(self, key: str, fn: Callable[[], Verdict]) -> Verdict:
        try:
            return self._memo(key, fn)
        except BudgetExceeded as exc:
            return Verdict(None, note=f"budget: {exc}")

    # free algebras ------------------------------------------------------

    def free1(self) -> FreeAlgebra:
        return self._memo("free1", lambda: generate_free_algebra(self.family, 1, self.config.free_budget))

    def free2(self) -> FreeAlgebra:
        def build():
            f1 = self.free1()
            if len(f1) > self.config.pair_gate:
                raise BudgetExceeded(
                    f"|Tm(x)| = {len(f1)} above the gate {self.config.pair_gate} for Tm(x,y)"
                )
            return generate_free_algebra(self.family, 2, self.config.pair_budget)

        return self._memo("free2", build)

    # protoalgebraicity and equivalentiality ------------------------------

    def protoalgebraic(self) -> Verdict:
        return self._verdict("protoalgebraic", self._protoalgebraic)

    def _protoalgebraic(self) -> Verdict:
        for i, m in enumerate(self.family.members):
            F = sorted(m.designated)
            for a in F:
                for b in range(m.size):
                    if b in m.designated:
                        continue
                    if self.delta.in_relation(i, a, b):
                        return Verdict(
                            False,
                            counterexample={
                                "check": "x, Delta(x,y) |- y",
                                "member": i,
                                "a": a,
                                "b": b,
                            },
                        )
        return Verdict(True, witness={"delta": _sorted_terms(self.delta.pool)})

    def relations(self) -> list[np.ndarray]:
        def build():
            out = []
            for i, m in enumerate(self.family.members):
                R = np.eye(m.size, dtype=bool)
                for a in range(m.size):
                    for b in range(m.size):
                        if a != b:
                            R[a, b] = self.delta.in_relation(i, a, b)
                out.append(R)
            return out

        return self._memo("relations", build)

    def equivalential(self) -> Verdict:
        return self._verdict("equivalential", self._equivalential)

    def _equivalential(self) -> Verdict:
        p = self.protoalgebraic()
        if p.holds is False:
            return Verdict(False, counterexample={"check": "requires protoalgebraic"})
        if p.holds is None:
            return Verdict(None, note=p.note)
        for i, (m, R) in enumerate(zip(self.family.members, self.relations())):
            bad = relation_closure_failure(m, R)
            if bad is not None:
                name, pairs, image = bad
                return Verdict(
                    False,
                    counterexample={
                        "check": "congruence rule",
                        "member": i,
                        "operation": name,
                        "pairs": [list(p) for p in pairs],
                        "image": list(image),
                    },
                )
        return Verdict(True, witness={"delta": _sorted_terms(self.delta.pool)})

    # tau on submatrices ---------------------------------------------------

    def tau_submatrices(self) -> Verdict:
        return self._verdict("tau_submatrices", self._tau_submatrices)

    def subuniverses(self) -> list[list[tuple[int, ...]]]:
        return self._memo(
            "subuniverses",
            lambda: [
                enumerate_subuniverses(m.algebra, self.config.subuniverse_budget)
                for m in self.family.members
            ],
        )

    def _tau_submatrices(self) -> Verdict:
        sp = self.space
        for i, (m, subs) in enumerate(zip(self.family.members, self.subuniverses())):
            for B in subs:
                sub = submatrix(m, B)
                theta = leibniz_congruence(sub).partition.class_of
                glob = np.full(sp.N, -1, dtype=np.int64)
                glob[sp.offsets[i] + np.asarray(B)] = theta
                for b in B:
                    if b in m.designated:
                        continue
                    if self.tau.separating_pair(sp.glob(i, b), glob) is None:
                        return Verdict(
                            False,
                            counterexample={
                                "check": "tau on submatrices",
                                "member": i,
                                "subuniverse": list(B),
                                "element": b,
                            },
                        )
        return Verdict(True, witness={"tau": _sorted_pairs(self.tau.pool)})

    def weakly_algebraizable(self) -> Verdict:
        return self._combine("weakly_algebraizable", self.protoalgebraic, "requires protoalgebraic")

    def algebraizable(self) -> Verdict:
        return self._combine("algebraizable", self.equivalential, "requires equivalential")

    def _combine(self, key: str, base: Callable[[], Verdict], why: str) -> Verdict:
        def run():
            b = base()
            if b.holds is False:
                return Verdict(False, counterexample={"check": why})
            t = self.tau_submatrices()
            if t.holds is False:
                return Verdict(False, counterexample=t.counterexample)
            if b.holds is None or t.holds is None:
                return Verdict(None, note=b.note or t.note)
            return Verdict(True, witness={"delta": b.witness["delta"], "tau": t.witness["tau"]})

        return self._verdict(key, run)

    # truth-equationality --------------------------------------------------

    def filters(self) -> list[tuple[int, ...]]:
        return self._memo(
            "filters",
            lambda: enumerate_unary_filters(
                self.free1(), naive=self.config.naive_filters, budget=self.config.filter_budget
            ),
        )

    def truth_equational_filters(self) -> Verdict:
        return self._verdict("truth_equational_filters", self._te_filters)

    def _te_filters(self) -> Verdict:
        f1 = self.free1()
        filters = self.filters()
        res = check_filters(f1, filters, self.config.table_cap)
        if not res.holds:
            fail = res.failure
            return Verdict(
                False,
                counterexample={
                    "check": "filter",
                    "filter": [format_term(f1.representative(e)) for e in fail["filter"]],
                    "formula": format_term(f1.representative(fail["formula"])),
                    "formula_in_filter": fail["formula_in_filter"],
                },
            )
        pairs = [(f1.representative(a), f1.representative(b)) for a, b in res.tau_pairs]
        return Verdict(True, witness={"tau": _sorted_pairs(pairs), "method": "filters"})

    def filter_check_cheap(self) -> bool:
        try:
            f1 = self.free1()
        except BudgetExceeded:
            return False
        S = len(f1)
        work = sum(S ** max(k, 1) for k in self.space.arities) + S * S
        try:
            nf = len(self.filters())
        except BudgetExceeded:
            return False
        return work * max(nf, 1) <= self.config.audit_cap

    def truth_equational(self) -> Verdict:
        return self._verdict("truth_equational", self._truth_equational)

    def _truth_equational(self) -> Verdict:
        p = self.protoalgebraic()
        if p.holds is True:
            t = self.tau_submatrices()
            if t.holds is not None:
                if self.config.audit and self.filter_check_cheap():
                    audit = self.truth_equational_filters()
                    if audit.holds is not None and audit.holds != t.holds:
                        raise AssertionError(
                            "filter-based and submatrix-based truth-equationality disagree"
                        )
                if t.holds:
                    return Verdict(True, witness={"tau": t.witness["tau"], "method": "submatrices"})
                return Verdict(False, counterexample=t.counterexample)
        return self.truth_equational_filters()

    # fast paths and sizes ----------------------------------------------------

    def trivial_case(self) -> dict[str, bool] | None:
        return trivial_case_verdicts(self.family)

    def sizes(self) -> dict[str, int | None]:
        out: dict[str, int | None] = {
            "tm_x": None,
            "tm_xy": None,
            "delta": None,
            "tau": None,
            "filters": None,
            "subuniverses": None,
        }
        for key, fn in (
            ("tm_x", lambda: len(self.free1())),
            ("tm_xy", lambda: len(self.free2())),
            ("delta", lambda: len(candidate_delta_from(self.family, self.free2()).elements)),
            ("tau", lambda: candidate_tau_from(self.free1()).count),
            ("filters", lambda: len(self.filters()) if "filters" in self._cache else None),
            ("subuniverses", lambda: sum(len(s) for s in self.subuniverses()) if "subuniverses" in self._cache else None),
        ):
            try:
                out[key] = fn()
            except BudgetExceeded:
                out[key] = None
        return out


def relation_closure_failure(m: Matrix, R: np.ndarray):
    """First operation and tuple of R-related pairs whose image leaves R."""
    pairs = np.argwhere(R)
    for op, arr in zip(m.algebra.operations, m.algebra.arrays):
        k = op.arity
        if k == 0:
            continue
        count = len(pairs) ** k
        step = max(1, (1 << 20) // k)
        for s in range(0, count, step):
            idx = np.arange(s, min(count, s + step))
            digits = [idx // len(pairs) ** (k - 1 - j) % len(pairs) for j in range(k)]
            left = arr[tuple(pairs[d, 0] for d in digits)]
            right = arr[tuple(pairs[d, 1] for d in digits)]
            bad = ~R[left, right]
            if bad.any():
                r = int(np.argmax(bad))
                chosen = [tuple(int(v) for v in pairs[d[r]]) for d in digits]
                return op.name, chosen, (int(left[r]), int(right[r]))
    return None


def trivial_case_verdicts(family: MatrixFamily) -> dict[str, bool] | None:
    """Closed-form answers for one reduced matrix that is trivial or has only constants."""
    if len(family.members) != 1:
        return None
    m = family.members[0]
    if m.size == 1:
        full = len(m.designated) == 1
        return {"weakly_algebraizable": full, "truth_equational": full}
    if all(op.arity == 0 for op in m.algebra.operations):
        inside = any(int(arr) in m.designated for arr in m.algebra.arrays)
        return {"weakly_algebraizable": False, "truth_equational": inside}
    return None


# explicit maximal candidates ------------------------------------------------------


@dataclass
class CandidateDelta:
    free2: FreeAlgebra
    indices: list[int]
    relations: list[np.ndarray]

    @property
    def elements(self) -> list[TermFunction]:
        return [self.free2.element(i) for i in self.indices]


@dataclass
class CandidateTau:
    free1: FreeAlgebra
    groups: list[list[int]]

    @property
    def count(self) -> int:
        """Number of unordered pairs, reflexive ones included."""
        return sum(len(g) * (len(g) + 1) // 2 for g in self.groups)

    def pairs(self):
        for g in self.groups:
            for x in range(len(g)):
                for y in range(x, len(g)):
                    yield g[x], g[y]

    def term_pairs(self):
        return [
            (self.free1.representative(a), self.free1.representative(b)) for a, b in self.pairs()
        ]


def candidate_delta_from(family: MatrixFamily, free2: FreeAlgebra) -> CandidateDelta:
    sp = free2.space
    G = free2.global_values
    desig = sp.mask[G]
    diag_cols = []
    cols = sp.points(2)
    for q in range(len(cols[0])):
        if cols[0][q] == cols[1][q]:
            diag_cols.append(q)
    ok = desig[:, diag_cols].all(axis=1)
    idx = [int(i) for i in np.flatnonzero(ok)]
    rels = []
    start = 0
    for m in family.members:
        n = m.size
        block = desig[idx, start : start + n * n] if idx else np.ones((0, n * n), dtype=bool)
        rels.append(block.all(axis=0).reshape(n, n))
        start += n * n
    return CandidateDelta(free2, idx, rels)


def candidate_delta(family: MatrixFamily, budget: int | None = 1_000_000) -> CandidateDelta:
    ensure_reduced(family)
    return candidate_delta_from(family, generate_free_algebra(family, 2, budget))


def candidate_tau_from(free1: FreeAlgebra) -> CandidateTau:
    group = tau_groups(free1)
    groups: dict[int, list[int]] = {}
    for e, g in enumerate(group.tolist()):
        groups.setdefault(g, []).append(e)
    return CandidateTau(free1, sorted(groups.values()))


def candidate_tau(family: MatrixFamily, budget: int | None = 1_000_000) -> CandidateTau:
    ensure_reduced(family)
    return candidate_tau_from(generate_free_algebra(family, 1, budget))


def explicit_verdicts(family: MatrixFamily, budget: int | None = 1_000_000) -> dict[str, bool]:
    """Protoalgebraicity, equivalentiality and the τ-submatrix test computed
    directly from the explicit candidates (small inputs only)."""
    ensure_reduced(family)
    cd = candidate_delta(family, budget)
    proto = all(
        not (R[a, b] and a in m.designated and b not in m.designated)
        for m, R in zip(family.members, cd.relations)
        for a in range(m.size)
        for b in range(m.size)
    )
    equiv = proto and all(
        relation_closure_failure(m, R) is None for m, R in zip(family.members, cd.relations)
    )
    ct = candidate_tau(family, budget)
    f1 = ct.free1
    tau_ok = True
    for i, m in enumerate(family.members):
        vals = f1.member_values(i)
        for B in enumerate_subuniverses(m.algebra):
            theta = leibniz_congruence(submatrix(m, B)).partition.class_of
            pos = {e: j for j, e in enumerate(B)}
            for b in B:
                agree = all(
                    theta[pos[int(vals[x, b])]] == theta[pos[int(vals[y, b])]]
                    for g in ct.groups
                    for x in g
                    for y in g
                )
                if agree != (b in m.designated):
                    tau_ok = False
    return {"protoalgebraic": proto, "equivalential": equiv, "tau_submatrices": tau_ok}


# public predicates ----------------------------------------------------------


def is_protoalgebraic(family: MatrixFamily, config: ClassifyConfig | None = None) -> Verdict:
    ensure_reduced(family)
    return Analysis(family, config).protoalgebraic()


def is_equivalential(family: MatrixFamily, config: ClassifyConfig | None = None) -> Verdict:
    ensure_reduced(family)
    return Analysis(family, config).equivalential()


def tau_defines_truth_on_submatrices(family: MatrixFamily, config: ClassifyConfig | None = None) -> Verdict:
    ensure_reduced(family)
    return Analysis(family, config).tau_submatrices()


def is_weakly_algebraizable(family: MatrixFamily, config: ClassifyConfig | None = None) -> Verdict:
    ensure_reduced(family)
    return Analysis(family, config).weakly_algebraizable()


def is_algebraizable(family: MatrixFamily, config: ClassifyConfig | None = None) -> Verdict:
    ensure_reduced(family)
    return Analysis(family, config).algebraizable()


def is_truth_equational(family: MatrixFamily, config: ClassifyConfig | None = None) -> Verdict:
    ensure_reduced(family)
    return Analysis(family, config).truth_equational()


def reduce_family(family: MatrixFamily) -> MatrixFamily:
    return MatrixFamily(tuple(reduce_matrix(m) for m in family.members))


def classify(family: MatrixFamily, config: ClassifyConfig | None = None) -> ClassificationReport:
    """Reduce every member, decide the five classes, and verify every positive verdict."""
    from .verify import verify_witness

    config = config or ClassifyConfig()
    t0 = time.perf_counter()
    reduced = reduce_family(family)
    an = Analysis(reduced, config)
    verdicts = {
        "protoalgebraic": an.protoalgebraic(),
        "equivalential": an.equivalential(),
        "weakly_algebraizable": an.weakly_algebraizable(),
        "algebraizable": an.algebraizable(),
        "truth_equational": an.truth_equational(),
    }
    if config.fast_paths:
        fast = an.trivial_case()
        if fast is not None:
            for name, value in fast.items():
                v = verdicts[name]
                if v.holds is not None and v.holds != value:
                    raise AssertionError(f"closed-form answer for {name} disagrees with the search")
    report = ClassificationReport(reduced, verdicts, an.sizes(), {}, family)
    if config.verify:
        t1 = time.perf_counter()
        verify_witness(reduced, report)
        an.timings["verify"] = (time.perf_counter() - t1) * 1000
    an.timings["total"] = (time.perf_counter() - t0) * 1000
    report.timings_ms = {k: round(v, 3) for k, v in an.timings.items()}
    return report

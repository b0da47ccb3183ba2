"""Deductive filters on Tm(x) and the filter-based truth-equationality test.

For an evaluation point ``q = (member i, element a)`` let ``S_q`` be the set
of unary term functions designated at ``q``.  A subset of Tm(x) is closed
under one-variable consequence exactly when it is an intersection of some of
the ``S_q`` (the empty intersection being Tm(x) itself).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import MatrixFamily
from .errors import FilterBudgetExceeded
from .free import FreeAlgebra, generate_free_algebra
from .leibniz import TranslationSystem

NAIVE_CAP = 20
DEFAULT_FILTER_BUDGET = 100_000


def designation_matrix(free1: FreeAlgebra) -> np.ndarray:
    """``D[t, q]``: is unary term function ``t`` designated at point ``q``?"""
    return free1.space.mask[free1.global_values]


def _canonical(masks: list[np.ndarray]) -> list[tuple[int, ...]]:
    out = [tuple(int(i) for i in np.flatnonzero(m)) for m in masks]
    return sorted(set(out), key=lambda s: (len(s), s))


def fast_filters(D: np.ndarray, budget: int | None = DEFAULT_FILTER_BUDGET) -> list[tuple[int, ...]]:
    S, P = D.shape
    full = np.ones(S, dtype=bool)
    seen = {np.packbits(full).tobytes(): full}
    queue = [full]
    cols = [D[:, q] for q in range(P)]
    while queue:
        cur = queue.pop()
        for col in cols:
            nxt = cur & col
            key = np.packbits(nxt).tobytes()
            if key not in seen:
                seen[key] = nxt
                if budget is not None and len(seen) > budget:
                    raise FilterBudgetExceeded(f"more than {budget} filters", reached=len(seen))
                queue.append(nxt)
    return _canonical(list(seen.values()))


def naive_filters(D: np.ndarray, cap: int = NAIVE_CAP) -> list[tuple[int, ...]]:
    """Test every subset of Tm(x) for closure under one-variable consequence.

    ``Gamma |- phi`` holds when every point designating all of ``Gamma`` also
    designates ``phi``; the test is run on all subsets at once in chunks.
    """
    S, P = D.shape
    if S > cap:
        raise FilterBudgetExceeded(f"naive enumeration needs |Tm(x)| <= {cap}, got {S}", reached=S)
    notD = (~D).astype(np.int32)
    out: list[np.ndarray] = []
    total = 1 << S
    step = 1 << 14
    bits = np.arange(S)
    for start in range(0, total, step):
        codes = np.arange(start, min(total, start + step))
        subsets = ((codes[:, None] >> bits[None, :]) & 1).astype(np.int32)
        # points where every member of the subset is designated
        sat = (subsets @ notD) == 0
        # formulas designated at all such points
        cons = (sat.astype(np.int32) @ notD.T) == 0
        closed = (cons == subsets.astype(bool)).all(axis=1)
        out.extend(subsets[closed].astype(bool))
    return _canonical(out)


def enumerate_unary_filters(
    source: MatrixFamily | FreeAlgebra,
    *,
    naive: bool = False,
    budget: int | None = DEFAULT_FILTER_BUDGET,
    free_budget: int | None = None,
) -> list[tuple[int, ...]]:
    """Filters on Tm(x), each as a sorted tuple of element indices, canonically ordered."""
    if isinstance(source, FreeAlgebra):
        free1 = source
    else:
        free1 = generate_free_algebra(source, 1, **({} if free_budget is None else {"budget": free_budget}))
    D = designation_matrix(free1)
    return naive_filters(D) if naive else fast_filters(D, budget)


def composition_table(free1: FreeAlgebra) -> np.ndarray:
    """``comp[e, phi]`` is the index of ``e`` composed after ``phi``."""
    G = free1.global_values
    S = len(free1)
    comp = np.empty((S, S), dtype=np.int64)
    step = max(1, (1 << 21) // max(1, S * G.shape[1]))
    for s in range(0, S, step):
        e = min(S, s + step)
        rows = G[:, G[s:e]]  # shape (S, e-s, P)
        comp[:, s:e] = free1.lookup_global(rows.reshape(-1, G.shape[1])).reshape(S, e - s)
    return comp


def tau_groups(free1: FreeAlgebra) -> np.ndarray:
    """Group id per element: equal ids mean equal values on every designated point."""
    G = free1.global_values
    fp = np.flatnonzero(free1.space.mask)
    if len(fp) == 0:
        return np.zeros(len(free1), dtype=np.int64)
    _, inv = np.unique(G[:, fp], axis=0, return_inverse=True)
    return inv.reshape(-1)


@dataclass
class FilterCheck:
    holds: bool
    filters: int
    failure: dict | None = None
    tau_pairs: list[tuple[int, int]] = field(default_factory=list)


class FilterTest:
    """Shared state for checking many filters on one Tm(x)."""

    def __init__(self, free1: FreeAlgebra, table_cap: int | None = 20_000_000):
        self.free1 = free1
        self.S = len(free1)
        self.system = TranslationSystem(self.S, [t for t in free1.op_tables(table_cap) if t.ndim > 0])
        self.comp = composition_table(free1)
        group = tau_groups(free1)
        # first (smallest-index) element of each group
        first = np.full(group.max() + 1 if len(group) else 0, -1, dtype=np.int64)
        for e in range(len(group) - 1, -1, -1):
            first[group[e]] = e
        self.rep = first[group]

    def omega(self, gamma: np.ndarray) -> np.ndarray:
        labels, _ = self.system.refine(gamma.astype(np.int64))
        return labels

    def check(self, gamma: np.ndarray):
        """``None`` when the filter passes, else ``(phi, phi_in_filter)``; also returns
        the separating pairs found for formulas outside the filter."""
        L = self.omega(gamma)
        C = L[self.comp]
        dif = C != C[self.rep]
        sat = ~dif.any(axis=0)
        pairs = []
        outside = np.flatnonzero(~sat)
        if len(outside):
            e = np.argmax(dif[:, outside], axis=0)
            pairs = list(zip(self.rep[e].tolist(), e.tolist()))
        bad = np.flatnonzero(sat != gamma)
        if len(bad):
            phi = int(bad[0])
            return (phi, bool(gamma[phi])), pairs
        return None, pairs


def check_filters(
    free1: FreeAlgebra,
    filters: list[tuple[int, ...]],
    table_cap: int | None = 20_000_000,
) -> FilterCheck:
    test = FilterTest(free1, table_cap)
    pairs: set[tuple[int, int]] = set()
    for Gamma in filters:
        gamma = np.zeros(test.S, dtype=bool)
        gamma[list(Gamma)] = True
        bad, found = test.check(gamma)
        if bad is not None:
            phi, inside = bad
            return FilterCheck(
                False,
                len(filters),
                {"filter": Gamma, "formula": phi, "formula_in_filter": inside},
            )
        pairs.update(found)
    return FilterCheck(True, len(filters), None, sorted(pairs))

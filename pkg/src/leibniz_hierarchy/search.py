"""Witness search over the free algebras without materialising them.

Both searches answer questions of the form "is there a term with property X
at a target point, given that it must behave in a prescribed way on a set of
control points".  The closure is computed on the target plus a *sample* of
the control points only; every element is additionally evaluated on all
control points (shadow coordinates), so genuine witnesses are recognised as
soon as they appear.  When the sampled closure is exhausted without a
genuine witness, either no candidate is left (a sound negative answer, since
the sampled closure is a homomorphic image of the full one) or the control
point that rules out the most spurious candidates joins the sample.  The
sample only grows, so the loop ends after at most as many rounds as there
are control points.

Witnesses found along the way are pooled and tried first on later queries.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import MatrixFamily
from .closure import SubpowerClosure
from .space import FamilySpace
from .terms import Term, Var

DEFAULT_CLOSURE_BUDGET = 200_000
DEFAULT_TUPLE_BUDGET = 4_000_000


@dataclass
class SearchStats:
    closures: int = 0
    largest: int = 0
    queries: int = 0
    pool_hits: int = 0

    def record(self, closure: SubpowerClosure) -> None:
        self.closures += 1
        self.largest = max(self.largest, len(closure))


class DeltaSearch:
    """Decides ``(a, b) in R_i``: does every diagonal-designated binary term
    keep ``(a, b)`` designated?  A refuting term is a Δ-witness for the pair."""

    def __init__(
        self,
        family: MatrixFamily,
        space: FamilySpace | None = None,
        closure_budget: int | None = DEFAULT_CLOSURE_BUDGET,
        tuple_budget: int | None = DEFAULT_TUPLE_BUDGET,
    ):
        self.family = family
        self.space = space or FamilySpace(family)
        sp = self.space
        self.closure_budget = closure_budget
        self.tuple_budget = tuple_budget
        px, py = [], []
        for i, n in enumerate(sp.sizes):
            o = int(sp.offsets[i])
            for a in range(n):
                for b in range(n):
                    if a != b:
                        px.append(o + a)
                        py.append(o + b)
        self.PX = np.asarray(px, dtype=np.int64)
        self.PY = np.asarray(py, dtype=np.int64)
        self.pair_pos = {(int(a), int(b)): k for k, (a, b) in enumerate(zip(px, py))}
        self.separated = np.zeros(len(px), dtype=bool)
        self.pool: list[Term] = []
        self._pool_vals: list[np.ndarray] = []
        self.stats = SearchStats()
        diag = np.arange(sp.N, dtype=np.int64)
        self._shadow = np.stack(
            [np.concatenate([diag, self.PX]), np.concatenate([diag, self.PY])]
        )
        self._shadow_members = sp.member_of[np.concatenate([diag, self.PX])]

    def witness(self, ga: int, gb: int) -> Term | None:
        """A diagonal-designated term refuting the global pair, or ``None`` if none exists."""
        self.stats.queries += 1
        k = self.pair_pos[(ga, gb)]
        if self.separated[k]:
            self.stats.pool_hits += 1
            for t, vals in zip(self.pool, self._pool_vals):
                if not self.space.mask[vals[k]]:
                    return t
        sp = self.space
        mask = sp.mask
        N = sp.N
        sample: list[int] = []
        while True:
            nS = len(sample)
            gens = np.array([sample + [ga], sample + [gb]], dtype=np.int64)
            coord_members = sp.member_of[np.array(sample + [ga], dtype=np.int64)]

            def stop(cl: SubpowerClosure, lo: int, hi: int):
                sh = cl.shadow[lo:hi]
                ok = mask[sh[:, :N]].all(axis=1) & ~mask[cl.rows[lo:hi, nS]]
                if not ok.any():
                    return None
                cand = np.flatnonzero(ok)
                gain = (~mask[sh[cand, N:]] & ~self.separated[None, :]).sum(axis=1)
                return lo + int(cand[int(np.argmax(gain))])

            cl = SubpowerClosure(
                N,
                sp.tables,
                gens,
                shadow=self._shadow,
                constants=sp.constants(coord_members, self._shadow_members),
                budget=self.closure_budget,
                tuple_budget=self.tuple_budget,
                stop=stop,
            ).run()
            self.stats.record(cl)
            if cl.found is not None:
                t = cl.term(cl.found, sp.names, [Var(0), Var(1)])
                vals = cl.shadow[cl.found, N:].astype(np.int64)
                self.pool.append(t)
                self._pool_vals.append(vals)
                self.separated |= ~mask[vals]
                return t
            rows = cl.rows
            cand = mask[rows[:, :nS]].all(axis=1) & ~mask[rows[:, nS]]
            if not cand.any():
                return None
            bad = ~mask[cl.shadow[cand][:, :N]]
            bad[:, sample] = False
            score = bad.sum(axis=0)
            c = int(np.argmax(score))
            if score[c] == 0:
                raise AssertionError("a diagonal-designated candidate escaped the witness check")
            sample.append(c)

    def in_relation(self, member: int, a: int, b: int) -> bool:
        if a == b:
            return True
        sp = self.space
        return self.witness(sp.glob(member, a), sp.glob(member, b)) is None


class TauSearch:
    """Finds pairs of unary terms that agree on every designated element yet
    separate a given element modulo a partition."""

    def __init__(
        self,
        family: MatrixFamily,
        space: FamilySpace | None = None,
        closure_budget: int | None = DEFAULT_CLOSURE_BUDGET,
        tuple_budget: int | None = DEFAULT_TUPLE_BUDGET,
    ):
        self.family = family
        self.space = space or FamilySpace(family)
        self.closure_budget = closure_budget
        self.tuple_budget = tuple_budget
        self.control = np.flatnonzero(self.space.mask)
        self.pool: list[tuple[Term, Term]] = []
        self._pool_e = np.zeros((0, self.space.N), dtype=np.int64)
        self._pool_d = np.zeros((0, self.space.N), dtype=np.int64)
        self.stats = SearchStats()

    def _from_pool(self, gb: int, theta: np.ndarray):
        if not len(self.pool):
            return None
        diff = theta[self._pool_e[:, gb]] != theta[self._pool_d[:, gb]]
        if diff.any():
            self.stats.pool_hits += 1
            return self.pool[int(np.argmax(diff))]
        return None

    def separating_pair(self, gb: int, theta: np.ndarray) -> tuple[Term, Term] | None:
        """``theta`` gives class ids on the subuniverse containing global element ``gb``."""
        self.stats.queries += 1
        hit = self._from_pool(gb, theta)
        if hit is not None:
            return hit
        sp = self.space
        N = sp.N
        control = self.control
        sample: list[int] = []
        shadow = np.arange(N, dtype=np.int64)[None, :]
        shadow_members = sp.member_of
        while True:
            nS = len(sample)
            gens = np.array([sample + [gb]], dtype=np.int64)
            coord_members = sp.member_of[gens[0]]
            seen: dict[bytes, tuple[int, int]] = {}

            def stop(cl: SubpowerClosure, lo: int, hi: int):
                sig = np.ascontiguousarray(cl.shadow[lo:hi][:, control])
                cls = theta[cl.rows[lo:hi, nS]]
                for r in range(hi - lo):
                    key = sig[r].tobytes()
                    prev = seen.get(key)
                    if prev is None:
                        seen[key] = (int(cls[r]), lo + r)
                    elif prev[0] != cls[r]:
                        return prev[1], lo + r
                return None

            cl = SubpowerClosure(
                N,
                sp.tables,
                gens,
                shadow=shadow,
                constants=sp.constants(coord_members, shadow_members),
                budget=self.closure_budget,
                tuple_budget=self.tuple_budget,
                stop=stop,
            ).run()
            self.stats.record(cl)
            if cl.found is not None:
                i, j = cl.found
                pair = (cl.term(i, sp.names, [Var(0)]), cl.term(j, sp.names, [Var(0)]))
                self.pool.append(pair)
                self._pool_e = np.vstack([self._pool_e, cl.shadow[i][None, :]])
                self._pool_d = np.vstack([self._pool_d, cl.shadow[j][None, :]])
                return pair
            rows = cl.rows
            cls = theta[rows[:, nS]]
            if nS:
                _, group = np.unique(rows[:, :nS], axis=0, return_inverse=True)
                group = group.reshape(-1)
            else:
                group = np.zeros(len(rows), dtype=np.int64)
            # groups whose members fall into more than one class at the target
            lo_cls = np.full(group.max() + 1, np.iinfo(np.int64).max)
            hi_cls = np.full(group.max() + 1, np.iinfo(np.int64).min)
            np.minimum.at(lo_cls, group, cls)
            np.maximum.at(hi_cls, group, cls)
            live = lo_cls != hi_cls
            if not live.any():
                return None
            members = live[group]
            sub = cl.shadow[members][:, control]
            g = group[members]
            vmin = np.full((group.max() + 1, len(control)), np.iinfo(np.int64).max)
            vmax = np.full((group.max() + 1, len(control)), np.iinfo(np.int64).min)
            np.minimum.at(vmin, g, sub)
            np.maximum.at(vmax, g, sub)
            score = (vmin[live] != vmax[live]).sum(axis=0)
            in_sample = np.isin(control, sample)
            score[in_sample] = 0
            c = int(np.argmax(score))
            if score[c] == 0:
                raise AssertionError("a separating pair escaped the witness check")
            sample.append(int(control[c]))

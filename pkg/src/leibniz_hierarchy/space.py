"""A matrix family viewed as one block-diagonal algebra on the disjoint union.

Closure computations evaluate many coordinates at once; giving every
element of every member a global id lets a single table lookup serve all of
them.  Cells that mix members are never read and hold 0.
"""
from __future__ import annotations

import itertools
from functools import cached_property

import numpy as np

from .algebra import MatrixFamily


class FamilySpace:
    def __init__(self, family: MatrixFamily):
        self.family = family
        self.sizes = family.sizes
        self.offsets = np.concatenate([[0], np.cumsum(self.sizes)[:-1]]).astype(np.int64)
        self.N = int(sum(self.sizes))
        self.member_of = np.repeat(np.arange(len(self.sizes)), self.sizes)
        self.local = np.arange(self.N) - self.offsets[self.member_of]
        self.names = [name for name, _ in family.signature]
        self.arities = [k for _, k in family.signature]
        mask = np.zeros(self.N, dtype=bool)
        for i, m in enumerate(family.members):
            mask[self.offsets[i] + m.mask.nonzero()[0]] = True
        self.mask = mask

    def glob(self, member: int, element: int) -> int:
        return int(self.offsets[member] + element)

    @cached_property
    def tables(self) -> list[tuple[int, np.ndarray]]:
        out = []
        N = self.N
        for oi, k in enumerate(self.arities):
            if k == 0:
                out.append((0, np.zeros(1, dtype=np.int64)))
                continue
            T = np.zeros((N,) * k, dtype=np.int64)
            for i, m in enumerate(self.family.members):
                o, n = int(self.offsets[i]), m.size
                block = tuple(slice(o, o + n) for _ in range(k))
                T[block] = m.algebra.arrays[oi] + o
            out.append((k, T.reshape(-1)))
        return out

    def constant_values(self, oi: int) -> np.ndarray:
        """Global id of nullary operation ``oi`` in each member."""
        return np.array(
            [self.offsets[i] + int(m.algebra.arrays[oi]) for i, m in enumerate(self.family.members)],
            dtype=np.int64,
        )

    def constants(self, coord_members: np.ndarray, shadow_members: np.ndarray | None = None) -> dict:
        out = {}
        for oi, k in enumerate(self.arities):
            if k == 0:
                vals = self.constant_values(oi)
                out[oi] = (
                    vals[coord_members],
                    None if shadow_members is None else vals[shadow_members],
                )
        return out

    def points(self, k: int) -> list[np.ndarray]:
        """Columns ``x_0..x_{k-1}`` of global ids listing every member's k-tuples in table order."""
        cols: list[list[int]] = [[] for _ in range(k)]
        for i, n in enumerate(self.sizes):
            o = int(self.offsets[i])
            for tup in itertools.product(range(n), repeat=k):
                for j, v in enumerate(tup):
                    cols[j].append(o + v)
        return [np.asarray(c, dtype=np.int64) for c in cols]

    def point_members(self, k: int) -> np.ndarray:
        return np.repeat(np.arange(len(self.sizes)), [n**k for n in self.sizes])

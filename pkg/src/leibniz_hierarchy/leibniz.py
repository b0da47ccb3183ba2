"""Leibniz congruence by partition refinement, reduction, and a brute-force oracle."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    Matrix,
    Partition,
    is_compatible,
    is_congruence,
    quotient_matrix,
)
from .errors import CapExceeded

_MULT = np.uint64(0x9E3779B97F4A7C15)


@dataclass(frozen=True)
class LeibnizResult:
    partition: Partition
    translations_used: int


def _normalise(keys: np.ndarray) -> np.ndarray:
    """Relabel so that class ids appear in order of first occurrence."""
    _, first, inv = np.unique(keys, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    return rank[inv.reshape(-1)]


class TranslationSystem:
    """One-step translations of a finite algebra, prepared once and reused.

    For operation ``f`` and position ``j`` the array ``T[e, s]`` is the value
    of ``f`` with ``e`` at position ``j`` and side arguments ``s``.
    """

    def __init__(self, n: int, tables: Sequence[np.ndarray]):
        self.n = n
        self.blocks: list[np.ndarray] = []
        self.weights: list[np.ndarray] = []
        rng = np.random.default_rng(0x5EED)
        dtype = np.int32 if n < 2**31 else np.int64
        for arr in tables:
            arr = np.asarray(arr)
            for j in range(arr.ndim):
                T = np.moveaxis(arr, j, 0).reshape(n, -1).astype(dtype, copy=False)
                # distinct translations only; repeated maps split nothing new
                T = np.ascontiguousarray(np.unique(T, axis=1))
                self.blocks.append(T)
                self.weights.append(
                    rng.integers(1, 2**63, size=T.shape[1], dtype=np.uint64) | np.uint64(1)
                )

    @property
    def per_pass(self) -> int:
        return sum(T.shape[1] for T in self.blocks)

    def refine(self, labels: np.ndarray) -> tuple[np.ndarray, int]:
        """Coarsest refinement of ``labels`` stable under every translation.

        Hashed passes can only merge classes, never split a true class, so
        every intermediate partition is coarser than the answer.  A hashed
        fixpoint that is stable and refines ``labels`` is therefore exact;
        otherwise the exact refinement is rerun from the start.
        """
        L0 = _normalise(np.asarray(labels, dtype=np.int64))
        L = L0
        passes = 0
        while True:
            passes += 1
            h = L.astype(np.uint64) * _MULT
            for T, w in zip(self.blocks, self.weights):
                h = h * _MULT + (L[T].astype(np.uint64) * w).sum(axis=1, dtype=np.uint64)
            new = _normalise(h)
            if new.max(initial=-1) == L.max(initial=-1):
                break
            L = new
        if self._stable(new, L0):
            return new, passes * self.per_pass
        L = L0
        while True:
            passes += 1
            new = self._exact(L)
            if new.max(initial=-1) == L.max(initial=-1):
                return new, passes * self.per_pass
            L = new

    def _stable(self, P: np.ndarray, L0: np.ndarray) -> bool:
        _, rep = np.unique(P, return_index=True)
        r = rep[P]
        if not np.array_equal(L0, L0[r]):
            return False
        return all(np.array_equal(P[T], P[T[r]]) for T in self.blocks)

    def _exact(self, L: np.ndarray) -> np.ndarray:
        keys = L.copy()
        for T in self.blocks:
            sig = np.concatenate([keys[:, None], L[T]], axis=1)
            _, inv = np.unique(sig, axis=0, return_inverse=True)
            keys = inv.reshape(-1)
        return _normalise(keys)


def leibniz_labels(n: int, tables: Sequence[np.ndarray], designated: np.ndarray) -> tuple[np.ndarray, int]:
    system = TranslationSystem(n, tables)
    return system.refine(np.asarray(designated, dtype=np.int64))


def leibniz_congruence(matrix: Matrix) -> LeibnizResult:
    labels, used = leibniz_labels(matrix.size, matrix.algebra.arrays, matrix.mask)
    part = Partition(labels.tolist())
    if not is_compatible(part, matrix.designated):
        raise AssertionError("refinement produced a partition incompatible with F")
    return LeibnizResult(part, used)


def _set_partitions(n: int):
    """Restricted growth strings of length n, in lexicographic order."""
    if n == 0:
        yield ()
        return
    labels = [0] * n

    def go(i: int, top: int):
        if i == n:
            yield tuple(labels)
            return
        for c in range(top + 2):
            labels[i] = c
            yield from go(i + 1, max(top, c))

    labels[0] = 0
    yield from go(1, 0)


def leibniz_bruteforce(matrix: Matrix, cap: int = 6) -> Partition:
    """Largest congruence compatible with F, found by trying every partition."""
    n = matrix.size
    if n > cap:
        raise CapExceeded(f"universe size {n} exceeds the brute-force cap {cap}")
    good = [
        p
        for p in map(Partition, _set_partitions(n))
        if is_compatible(p, matrix.designated) and is_congruence(matrix.algebra, p)
    ]
    best = min(good, key=lambda p: p.num_classes)
    for p in good:
        if not p.refines(best):
            raise AssertionError("compatible congruences have no largest element")
    return best


def reduce_matrix(matrix: Matrix) -> Matrix:
    return quotient_matrix(matrix, leibniz_congruence(matrix).partition)


def is_reduced(matrix: Matrix) -> bool:
    return leibniz_congruence(matrix).partition.is_identity()


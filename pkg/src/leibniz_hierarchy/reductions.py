"""Matrices built from a unary clone-membership instance, and a brute-force oracle.

Copy layouts are fixed so that generated files are reproducible:

* eight-copy matrix: element ``a`` of copy ``m`` (1..8) sits at ``(m-1)*n + a``;
* two-copy matrix: copy ``j`` (1, 2) at ``(j-1)*n + a``, then ``0`` at ``2n`` and ``1`` at ``2n+1``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .algebra import FiniteAlgebra, Matrix, MatrixFamily, Operation, validate_algebra
from .errors import (
    ArityOutOfRange,
    BadMap,
    HasConstants,
    IdentityH,
    TrivialAlgebra,
    ValidationError,
)
from .free import generate_free_algebra

HEART = "heart"
BOX = "box"
PLUS = "plus"
ONE = "one"
_LOW = (1, 3, 4)


@dataclass(frozen=True)
class GenCloInstance:
    algebra: FiniteAlgebra
    h: tuple[int, ...]

    @property
    def size(self) -> int:
        return self.algebra.size

    @property
    def h_is_identity(self) -> bool:
        return self.h == tuple(range(self.size))


def validate_genclo_instance(raw, *, natural: bool = False) -> GenCloInstance:
    """Check a (algebra, h) pair; ``natural`` additionally rejects the identity map."""
    if isinstance(raw, GenCloInstance):
        alg, h = raw.algebra, raw.h
    elif isinstance(raw, dict):
        alg, h = raw.get("algebra"), raw.get("h")
    else:
        alg, h = raw
    if not isinstance(alg, FiniteAlgebra):
        alg = validate_algebra(alg)
    n = alg.size
    if n < 2:
        raise TrivialAlgebra("the algebra must have at least two elements")
    for op in alg.operations:
        if op.arity == 0:
            raise HasConstants(f"operation {op.name!r} is a constant")
        if op.arity > 3:
            raise ArityOutOfRange(f"operation {op.name!r} has arity {op.arity}, allowed 1..3")
    try:
        h = tuple(int(v) for v in h)
    except (TypeError, ValueError):
        raise BadMap("h must be a sequence of integers") from None
    if len(h) != n or any(not 0 <= v < n for v in h):
        raise BadMap(f"h must map {{0..{n - 1}}} into itself")
    inst = GenCloInstance(alg, h)
    if natural and inst.h_is_identity:
        raise IdentityH("h must differ from the identity")
    for name in (HEART, BOX, PLUS, ONE):
        if name in alg.op_index:
            raise ValidationError(f"operation name {name!r} is reserved")
    if any(name.startswith(BOX) for name in alg.op_index):
        raise ValidationError(f"operation names starting with {BOX!r} are reserved")
    return inst


@dataclass(frozen=True)
class NaturalMatrix:
    matrix: Matrix
    n: int

    def index(self, a: int, copy: int) -> int:
        return (copy - 1) * self.n + a

    def element(self, i: int) -> tuple[int, int]:
        return i % self.n, i // self.n + 1


@dataclass(frozen=True)
class FlatMatrix:
    matrix: Matrix
    n: int

    def index(self, a, copy: int | None = None) -> int:
        """``index(a, 1|2)`` for copies; ``index(0)``/``index(1)`` for the fresh elements."""
        if copy is None:
            if a not in (0, 1):
                raise ValueError("fresh elements are 0 and 1")
            return 2 * self.n + a
        return (copy - 1) * self.n + a

    def element(self, i: int):
        if i >= 2 * self.n:
            return i - 2 * self.n
        return i % self.n, i // self.n + 1


def _lift(n: int, N: int, k: int, rule) -> tuple[int, ...]:
    return tuple(rule(args) for args in itertools.product(range(N), repeat=k))


def build_natural(inst: GenCloInstance) -> NaturalMatrix:
    inst = validate_genclo_instance(inst, natural=True)
    n, h = inst.size, inst.h
    N = 8 * n
    base = [e % n for e in range(N)]
    copy = [e // n + 1 for e in range(N)]
    idx = lambda a, m: (m - 1) * n + a  # noqa: E731
    ops = []
    for op in inst.algebra.operations:
        tab = op.table

        def lifted(args, tab=tab):
            cell = 0
            for e in args:
                cell = cell * n + base[e]
            return idx(tab[cell], 5)

        ops.append(Operation(op.name, op.arity, _lift(n, N, op.arity, lifted)))

    def heart(args):
        u, v, w = args
        a, m, k = base[u], copy[u], copy[w]
        if u == w and v == idx(h[a], 5):
            return idx(a, 1 if m in _LOW else 2)
        if m in _LOW and k in _LOW:
            return idx(a, 4)
        return idx(a, 7)

    def box(args):
        (e,) = args
        a, m = base[e], copy[e]
        if m in (1, 2):
            return e
        return idx(a, m - 1 if m % 2 == 0 else m + 1)

    ops.append(Operation(HEART, 3, _lift(n, N, 3, heart)))
    ops.append(Operation(BOX, 1, _lift(n, N, 1, box)))
    designated = frozenset(range(2 * n))
    return NaturalMatrix(Matrix(FiniteAlgebra(N, tuple(ops)), designated), n)


def build_flat(inst: GenCloInstance) -> FlatMatrix:
    inst = validate_genclo_instance(inst)
    n, h = inst.size, inst.h
    N = 2 * n + 2
    zero, one = 2 * n, 2 * n + 1
    ops = []
    for op in inst.algebra.operations:
        tab = op.table

        def lifted(args, tab=tab):
            if all(e < 2 * n for e in args):
                cell = 0
                for e in args:
                    cell = cell * n + e % n
                return n + tab[cell]
            if all(e == one for e in args):
                return one
            return zero

        ops.append(Operation(op.name, op.arity, _lift(n, N, op.arity, lifted)))

    def plus(args):
        a, b = args
        if a == one and b == one:
            return one
        if a < n and b == n + h[a]:
            return one
        return zero

    ops.append(Operation(PLUS, 2, _lift(n, N, 2, plus)))
    for c in range(n):

        def swap(args, c=c):
            (b,) = args
            if b == c:
                return n + c
            if b == n + c:
                return c
            return b if b < 2 * n else zero

        ops.append(Operation(f"{BOX}{c}", 1, _lift(n, N, 1, swap)))
    ops.append(Operation(ONE, 0, (one,)))
    designated = frozenset(range(n)) | {one}
    return FlatMatrix(Matrix(FiniteAlgebra(N, tuple(ops)), designated), n)


def clone_member(inst: GenCloInstance, budget: int | None = 1_000_000) -> bool:
    """Is ``h`` a unary term operation of the algebra?"""
    inst = validate_genclo_instance(inst)
    family = MatrixFamily((Matrix(inst.algebra, frozenset()),))
    free1 = generate_free_algebra(family, 1, budget)
    return bool((free1.values == np.asarray(inst.h)[None, :]).all(axis=1).any())


def random_instance(
    seed: int,
    *,
    min_size: int = 2,
    max_size: int = 3,
    max_ops: int = 2,
    max_arity: int = 2,
    natural: bool = True,
) -> GenCloInstance:
    """Deterministic pseudo-random instance; ``h`` avoids the identity when ``natural``."""
    if not (2 <= min_size <= max_size) or not (1 <= max_arity <= 3) or max_ops < 1:
        raise ValueError("bounds outside the supported range")
    rng = np.random.default_rng(seed)
    n = int(rng.integers(min_size, max_size + 1))
    count = int(rng.integers(1, max_ops + 1))
    ops = []
    for j in range(count):
        k = int(rng.integers(1, max_arity + 1))
        ops.append(Operation(f"f{j}", k, tuple(int(v) for v in rng.integers(0, n, n**k))))
    ident = tuple(range(n))
    maps = [m for m in itertools.product(range(n), repeat=n) if not (natural and m == ident)]
    h = maps[int(rng.integers(len(maps)))]
    return GenCloInstance(FiniteAlgebra(n, tuple(ops)), tuple(int(v) for v in h))

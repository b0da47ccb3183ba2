import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from leibniz_hierarchy import FiniteAlgebra, Matrix, MatrixFamily, Operation  # noqa: E402

NEG = ("neg", 1, (1, 0))
AND = ("and", 2, (0, 0, 0, 1))
OR = ("or", 2, (0, 1, 1, 1))
IMP = ("imp", 2, (1, 1, 0, 1))


def algebra(n, ops):
    return FiniteAlgebra(n, tuple(Operation(name, k, tuple(t)) for name, k, t in ops))


def matrix(n, ops, designated):
    return Matrix(algebra(n, ops), frozenset(designated))


def family(*members):
    return MatrixFamily(tuple(members))


def single(n, ops, designated):
    return family(matrix(n, ops, designated))


def as_plain(m: Matrix):
    """Oracle form ``(n, [(name, arity, list)], set)`` of a package matrix."""
    return (
        m.size,
        [(op.name, op.arity, list(op.table)) for op in m.algebra.operations],
        set(m.designated),
    )


def random_matrix(rng: random.Random, max_size=3, max_arity=2, max_ops=2, constants=True):
    n = rng.randint(1, max_size)
    ops = []
    for j in range(rng.randint(0, max_ops)):
        k = rng.randint(0 if constants else 1, max_arity)
        ops.append((f"o{j}", k, tuple(rng.randrange(n) for _ in range(n**k))))
    designated = {a for a in range(n) if rng.random() < 0.5}
    return matrix(n, ops, designated)


@pytest.fixture
def cpc():
    return single(2, [NEG, AND, OR, IMP], {1})


@pytest.fixture
def implicative():
    return single(2, [IMP], {1})


@pytest.fixture
def lattice():
    return single(2, [AND, OR], {1})


@pytest.fixture
def meet():
    return single(2, [AND], {1})

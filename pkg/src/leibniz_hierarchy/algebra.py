"""Finite algebras, logical matrices, partitions, term evaluation, subuniverses.

Operation tables are flat sequences indexed with the first argument most
significant: arguments ``(i1, ..., ik)`` live at ``i1*n**(k-1) + ... + ik``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BadArity,
    BadTableLength,
    DuplicateOpName,
    EmptyUniverse,
    EntryOutOfRange,
    NotACongruence,
    NotCompatible,
    SignatureMismatch,
    SubuniverseBudgetExceeded,
    UnboundVariable,
    UnknownOperation,
    ValidationError,
)
from .terms import App, Term, Var, var_index, var_name


def encode_args(n: int, args: Sequence[int]) -> int:
    idx = 0
    for a in args:
        idx = idx * n + a
    return idx


def decode_index(n: int, arity: int, idx: int) -> tuple[int, ...]:
    out = [0] * arity
    for j in range(arity - 1, -1, -1):
        idx, out[j] = divmod(idx, n)
    return tuple(out)


@dataclass(frozen=True)
class Operation:
    name: str
    arity: int
    table: tuple[int, ...]


@dataclass(frozen=True)
class FiniteAlgebra:
    size: int
    operations: tuple[Operation, ...] = ()

    def __post_init__(self):
        ops = tuple(
            op if isinstance(op, Operation) else Operation(op[0], op[1], tuple(op[2]))
            for op in self.operations
        )
        object.__setattr__(self, "operations", ops)
        _check_algebra(self.size, ops)

    @cached_property
    def arrays(self) -> tuple[np.ndarray, ...]:
        """Operation tables as numpy arrays of shape ``(n,) * arity``."""
        return tuple(
            np.asarray(op.table, dtype=np.int64).reshape((self.size,) * op.arity)
            for op in self.operations
        )

    @cached_property
    def op_index(self) -> dict[str, int]:
        return {op.name: i for i, op in enumerate(self.operations)}

    @property
    def signature(self) -> tuple[tuple[str, int], ...]:
        return tuple((op.name, op.arity) for op in self.operations)

    def operation(self, name: str) -> Operation:
        try:
            return self.operations[self.op_index[name]]
        except KeyError:
            raise UnknownOperation(f"unknown operation {name!r}") from None

    def apply(self, name: str, *args: int) -> int:
        op = self.operation(name)
        if len(args) != op.arity:
            raise ValueError(f"{name} expects {op.arity} arguments, got {len(args)}")
        return op.table[encode_args(self.size, args)]


def _check_algebra(n, ops: Sequence[Operation]) -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise EmptyUniverse(f"universe size must be a positive integer, got {n!r}")
    seen: set[str] = set()
    for op in ops:
        if not isinstance(op.name, str) or not op.name:
            raise ValidationError(f"operation name must be a non-empty string, got {op.name!r}")
        if op.name in seen:
            raise DuplicateOpName(f"duplicate operation name {op.name!r}")
        seen.add(op.name)
        if not isinstance(op.arity, (int, np.integer)) or op.arity < 0:
            raise BadArity(f"operation {op.name!r} has invalid arity {op.arity!r}")
        expected = n**op.arity
        if len(op.table) != expected:
            raise BadTableLength(
                f"operation {op.name!r}: expected table length {expected}, got {len(op.table)}"
            )
        for pos, v in enumerate(op.table):
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or not 0 <= v < n:
                raise EntryOutOfRange(
                    f"operation {op.name!r}: entry {v!r} at position {pos} is outside [0, {n})"
                )


def validate_algebra(raw) -> FiniteAlgebra:
    """Build a :class:`FiniteAlgebra` from a loosely typed description.

    ``raw`` may be a mapping with ``size``/``n`` and ``operations``/``ops``
    keys, whose operations are mappings with ``name``, ``arity``, ``table``
    or ``(name, arity, table)`` triples.
    """
    if isinstance(raw, FiniteAlgebra):
        return raw
    if not isinstance(raw, Mapping):
        raise ValidationError("algebra description must be a mapping")
    n = raw.get("size", raw.get("n"))
    if n is None:
        raise EmptyUniverse("missing universe size")
    ops_raw = raw.get("operations", raw.get("ops", []))
    ops = []
    for entry in ops_raw:
        if isinstance(entry, Mapping):
            try:
                name, arity, table = entry["name"], entry["arity"], entry["table"]
            except KeyError as exc:
                raise ValidationError(f"operation entry lacks key {exc.args[0]!r}") from None
        else:
            try:
                name, arity, table = entry
            except (TypeError, ValueError):
                raise ValidationError(f"malformed operation entry {entry!r}") from None
        if not isinstance(table, (list, tuple)):
            raise ValidationError(f"operation {name!r}: table must be a list")
        ops.append(Operation(name, arity, tuple(table)))
    return FiniteAlgebra(n, tuple(ops))


@dataclass(frozen=True)
class Matrix:
    algebra: FiniteAlgebra
    designated: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        des = frozenset(int(d) for d in self.designated)
        bad = [d for d in des if not 0 <= d < self.algebra.size]
        if bad:
            raise ValidationError(f"designated element {min(bad)} outside the universe")
        object.__setattr__(self, "designated", des)

    @property
    def size(self) -> int:
        return self.algebra.size

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.algebra.size, dtype=bool)
        m[sorted(self.designated)] = True
        return m


@dataclass(frozen=True)
class MatrixFamily:
    members: tuple[Matrix, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValidationError("a matrix family needs at least one member")
        sig = members[0].algebra.signature
        for i, m in enumerate(members[1:], start=1):
            if m.algebra.signature != sig:
                raise SignatureMismatch(f"member {i} has a different signature from member 0")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, *members: Matrix) -> "MatrixFamily":
        return cls(tuple(members))

    @property
    def signature(self) -> tuple[tuple[str, int], ...]:
        return self.members[0].algebra.signature

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(m.size for m in self.members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]


class Partition:
    """Equivalence relation stored as normalised class labels."""

    __slots__ = ("class_of",)

    def __init__(self, labels: Iterable[int]):
        remap: dict[int, int] = {}
        out = []
        for lab in labels:
            lab = int(lab)
            if lab not in remap:
                remap[lab] = len(remap)
            out.append(remap[lab])
        self.class_of = tuple(out)

    @classmethod
    def identity(cls, n: int) -> "Partition":
        return cls(range(n))

    @classmethod
    def total(cls, n: int) -> "Partition":
        return cls([0] * n)

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        labels = [-1] * n
        for b, block in enumerate(blocks):
            for e in block:
                labels[e] = b
        if -1 in labels:
            raise ValidationError("blocks do not cover the universe")
        return cls(labels)

    @property
    def size(self) -> int:
        return len(self.class_of)

    @property
    def num_classes(self) -> int:
        return max(self.class_of) + 1 if self.class_of else 0

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_classes)]
        for e, c in enumerate(self.class_of):
            out[c].append(e)
        return out

    def representatives(self) -> list[int]:
        return [b[0] for b in self.blocks()]

    def is_identity(self) -> bool:
        return self.num_classes == self.size

    def related(self, a: int, b: int) -> bool:
        return self.class_of[a] == self.class_of[b]

    def refines(self, other: "Partition") -> bool:
        """True when every block of ``self`` sits inside a block of ``other``."""
        img: dict[int, int] = {}
        for c, d in zip(self.class_of, other.class_of):
            if img.setdefault(c, d) != d:
                return False
        return True

    def array(self) -> np.ndarray:
        return np.asarray(self.class_of, dtype=np.int64)

    def __eq__(self, other):
        return isinstance(other, Partition) and self.class_of == other.class_of

    def __hash__(self):
        return hash(self.class_of)

    def __repr__(self):
        return f"Partition({self.blocks()})"


def _assignment_value(assignment, index: int) -> int:
    if isinstance(assignment, Mapping):
        if index in assignment:
            return assignment[index]
        name = var_name(index)
        if name in assignment:
            return assignment[name]
        raise UnboundVariable(f"variable {name} is not assigned")
    if index < len(assignment):
        return assignment[index]
    raise UnboundVariable(f"variable {var_name(index)} is not assigned")


def eval_term(algebra: FiniteAlgebra, t: Term, assignment) -> int:
    """Evaluate ``t`` bottom-up; ``assignment`` maps variable indices or names to elements."""
    memo: dict[int, int] = {}
    n = algebra.size

    def go(s: Term) -> int:
        key = id(s)
        if key in memo:
            return memo[key]
        if isinstance(s, Var):
            v = _assignment_value(assignment, s.index)
            if not 0 <= v < n:
                raise ValidationError(f"assigned value {v} outside the universe")
        else:
            op = algebra.operation(s.op)
            if len(s.args) != op.arity:
                raise UnknownOperation(
                    f"operation {s.op!r} has arity {op.arity}, term gives {len(s.args)} arguments"
                )
            v = op.table[encode_args(n, [go(a) for a in s.args])]
        memo[key] = v
        return v

    return go(t)


def eval_term_array(algebra: FiniteAlgebra, t: Term, columns: Sequence[np.ndarray]) -> np.ndarray:
    """Vectorised evaluation: ``columns[j]`` holds the values of variable ``j``."""
    memo: dict[int, np.ndarray] = {}
    n = algebra.size
    length = len(columns[0]) if columns else 1

    def go(s: Term) -> np.ndarray:
        key = id(s)
        if key in memo:
            return memo[key]
        if isinstance(s, Var):
            if s.index >= len(columns):
                raise UnboundVariable(f"variable {var_name(s.index)} is not assigned")
            v = np.asarray(columns[s.index], dtype=np.int64)
        else:
            i = algebra.op_index.get(s.op)
            if i is None:
                raise UnknownOperation(f"unknown operation {s.op!r}")
            op = algebra.operations[i]
            if len(s.args) != op.arity:
                raise UnknownOperation(
                    f"operation {s.op!r} has arity {op.arity}, term gives {len(s.args)} arguments"
                )
            flat = np.zeros(length, dtype=np.int64)
            for a in s.args:
                flat = flat * n + go(a)
            v = np.asarray(op.table, dtype=np.int64)[flat]
        memo[key] = v
        return v

    return go(t)


def check_term(algebra: FiniteAlgebra, t: Term) -> None:
    """Raise when ``t`` uses an unknown operation or a wrong argument count."""
    seen: set[int] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if id(s) in seen or isinstance(s, Var):
            continue
        seen.add(id(s))
        op = algebra.operation(s.op)
        if op.arity != len(s.args):
            raise UnknownOperation(
                f"operation {s.op!r} has arity {op.arity}, term gives {len(s.args)} arguments"
            )
        stack.extend(s.args)


def generate_subuniverse(algebra: FiniteAlgebra, seed: Iterable[int]) -> tuple[int, ...]:
    """Smallest subset containing ``seed`` (and all constants) closed under the operations."""
    n = algebra.size
    inside = np.zeros(n, dtype=bool)
    seed = list(seed)
    if not seed:
        raise ValidationError("seed must be nonempty")
    for s in seed:
        if not 0 <= s < n:
            raise ValidationError(f"seed element {s} outside the universe")
        inside[s] = True
    return tuple(int(i) for i in np.flatnonzero(_close(algebra, inside)))


def _close(algebra: FiniteAlgebra, inside: np.ndarray) -> np.ndarray:
    inside = inside.copy()
    arrays = algebra.arrays
    while True:
        members = np.flatnonzero(inside)
        grown = inside.copy()
        for arr in arrays:
            if arr.ndim == 0:
                grown[int(arr)] = True
            else:
                grown[arr[np.ix_(*([members] * arr.ndim))].ravel()] = True
        if grown.sum() == inside.sum():
            return inside
        inside = grown


def enumerate_subuniverses(algebra: FiniteAlgebra, cap: int | None = None) -> list[tuple[int, ...]]:
    """All nonempty subuniverses, sorted by size and then lexicographically.

    Every subuniverse is generated by a finite set, so closing known
    subuniverses with one extra element at a time reaches all of them without
    visiting the 2^n seeds one by one.
    """
    n = algebra.size
    found: set[tuple[int, ...]] = set()
    queue: list[np.ndarray] = []

    def add(mask: np.ndarray) -> None:
        key = tuple(int(i) for i in np.flatnonzero(mask))
        if key not in found:
            found.add(key)
            if cap is not None and len(found) > cap:
                raise SubuniverseBudgetExceeded(
                    f"more than {cap} subuniverses", reached=len(found)
                )
            queue.append(mask)

    for a in range(n):
        m = np.zeros(n, dtype=bool)
        m[a] = True
        add(_close(algebra, m))
    while queue:
        mask = queue.pop()
        for a in np.flatnonzero(~mask):
            m = mask.copy()
            m[a] = True
            add(_close(algebra, m))
    return sorted(found, key=lambda s: (len(s), s))


def subalgebra(algebra: FiniteAlgebra, universe: Sequence[int]) -> FiniteAlgebra:
    """The subalgebra on a subuniverse, relabelled ``universe[i] -> i``."""
    universe = list(universe)
    pos = {e: i for i, e in enumerate(universe)}
    ops = []
    for op, arr in zip(algebra.operations, algebra.arrays):
        if op.arity == 0:
            vals = [int(arr)]
        else:
            sub = arr[np.ix_(*([universe] * op.arity))].ravel()
            vals = [int(v) for v in sub]
        try:
            table = tuple(pos[v] for v in vals)
        except KeyError:
            raise ValidationError(f"{universe} is not closed under {op.name!r}") from None
        ops.append(Operation(op.name, op.arity, table))
    return FiniteAlgebra(len(universe), tuple(ops))


def submatrix(matrix: Matrix, universe: Sequence[int]) -> Matrix:
    pos = {e: i for i, e in enumerate(universe)}
    return Matrix(
        subalgebra(matrix.algebra, universe),
        frozenset(pos[d] for d in matrix.designated if d in pos),
    )


def congruence_violation(algebra: FiniteAlgebra, theta: Partition):
    """First (operation, position, argument tuple) breaking compatibility, or ``None``.

    Changing one argument at a time to its class representative covers every
    pair of related tuples by transitivity.
    """
    if theta.size != algebra.size:
        raise ValidationError("partition size differs from the universe size")
    cls = theta.array()
    rep = np.asarray(theta.representatives(), dtype=np.int64)[cls]
    for op, arr in zip(algebra.operations, algebra.arrays):
        k = op.arity
        for j in range(k):
            moved = np.take(arr, rep, axis=j)
            bad = cls[moved] != cls[arr]
            if bad.any():
                idx = tuple(int(v) for v in np.argwhere(bad)[0])
                return op.name, j, idx
    return None


def is_congruence(algebra: FiniteAlgebra, theta: Partition) -> bool:
    return congruence_violation(algebra, theta) is None


def is_compatible(theta: Partition, designated: Iterable[int]) -> bool:
    des = set(designated)
    return all(
        len({e in des for e in block}) == 1 for block in theta.blocks()
    )


def quotient_matrix(matrix: Matrix, theta: Partition) -> Matrix:
    algebra = matrix.algebra
    bad = congruence_violation(algebra, theta)
    if bad is not None:
        name, j, idx = bad
        raise NotACongruence(
            f"operation {name!r} breaks the partition at argument {j} of {idx}"
        )
    if not is_compatible(theta, matrix.designated):
        raise NotCompatible("designated set is not a union of classes")
    reps = theta.representatives()
    cls = theta.class_of
    k_classes = len(reps)
    ops = []
    for op in algebra.operations:
        table = tuple(
            cls[op.table[encode_args(algebra.size, [reps[c] for c in args])]]
            for args in itertools.product(range(k_classes), repeat=op.arity)
        )
        ops.append(Operation(op.name, op.arity, table))
    designated = frozenset(cls[d] for d in matrix.designated)
    return Matrix(FiniteAlgebra(k_classes, tuple(ops)), designated)


__all__ = [
    "App",
    "FiniteAlgebra",
    "Matrix",
    "MatrixFamily",
    "Operation",
    "Partition",
    "Term",
    "Var",
    "check_term",
    "congruence_violation",
    "decode_index",
    "encode_args",
    "enumerate_subuniverses",
    "eval_term",
    "eval_term_array",
    "generate_subuniverse",
    "is_compatible",
    "is_congruence",
    "quotient_matrix",
    "subalgebra",
    "submatrix",
    "validate_algebra",
    "var_index",
]

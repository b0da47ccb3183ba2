"""Free algebras Tm(x), Tm(x,y), ... of the variety generated by a matrix family.

An element is a k-ary term function, i.e. the tuple of operations it induces
on every member, together with a shortest-depth representative term found by
breadth-first generation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .algebra import MatrixFamily, eval_term_array
from .closure import ClosureBudgetExceeded, SubpowerClosure
from .errors import BudgetExceeded, FamilyMismatch, FreeAlgebraBudgetExceeded
from .space import FamilySpace
from .terms import Term, Var, substitute

DEFAULT_BUDGET = 1_000_000


@dataclass(frozen=True)
class TermFunction:
    arity: int
    tables: tuple[tuple[int, ...], ...]
    representative: Term | None = field(default=None, compare=False, hash=False)

    def value(self, member: int, *args: int) -> int:
        n = round(len(self.tables[member]) ** (1 / self.arity)) if self.arity else 1
        idx = 0
        for a in args:
            idx = idx * n + a
        return self.tables[member][idx]


def term_function(family: MatrixFamily, t: Term, arity: int | None = None) -> TermFunction:
    """The term function of ``t`` over ``family`` in ``arity`` variables."""
    need = t.arity_needed()
    arity = need if arity is None else arity
    if arity < need:
        raise ValueError(f"term uses {need} variables but arity {arity} was requested")
    tables = []
    for m in family.members:
        n = m.size
        cols = [np.arange(n**arity) // n ** (arity - 1 - j) % n for j in range(arity)]
        vals = eval_term_array(m.algebra, t, cols) if arity else eval_term_array(m.algebra, t, [])
        vals = np.broadcast_to(vals, (n**arity,))
        tables.append(tuple(int(v) for v in vals))
    return TermFunction(arity, tuple(tables), t)


class FreeAlgebra:
    """The k-generated free algebra, as a closure of projection tuples."""

    def __init__(self, family: MatrixFamily, arity: int, closure: SubpowerClosure, space: FamilySpace):
        self.family = family
        self.arity = arity
        self.space = space
        self._closure = closure
        pm = space.point_members(arity)
        self._offsets = space.offsets[pm]
        self._bounds = np.concatenate([[0], np.cumsum([n**arity for n in space.sizes])])
        self.generator_indices = tuple(
            closure.find(col) for col in space.points(arity)
        )

    def __len__(self) -> int:
        return len(self._closure)

    @property
    def size(self) -> int:
        return len(self)

    @property
    def names(self) -> list[str]:
        return self.space.names

    @cached_property
    def values(self) -> np.ndarray:
        """Local values, one row per element, one column per evaluation point."""
        return self._closure.rows.astype(np.int64) - self._offsets[None, :]

    @cached_property
    def global_values(self) -> np.ndarray:
        return self._closure.rows.astype(np.int64)

    def member_values(self, member: int) -> np.ndarray:
        lo, hi = self._bounds[member], self._bounds[member + 1]
        return self.values[:, lo:hi]

    def representative(self, i: int) -> Term:
        return self._closure.term(i, self.names, [Var(j) for j in range(self.arity)])

    def element(self, i: int) -> TermFunction:
        row = self.values[i]
        tables = tuple(
            tuple(int(v) for v in row[self._bounds[m] : self._bounds[m + 1]])
            for m in range(len(self.family.members))
        )
        return TermFunction(self.arity, tables, self.representative(i))

    @cached_property
    def elements(self) -> list[TermFunction]:
        return [self.element(i) for i in range(len(self))]

    def index_of(self, f: TermFunction) -> int | None:
        row = np.concatenate([np.asarray(t, dtype=np.int64) for t in f.tables])
        if len(row) != self.values.shape[1]:
            raise FamilyMismatch("term function does not match this free algebra")
        return self._closure.find(row + self._offsets)

    def lookup_global(self, rows: np.ndarray) -> np.ndarray:
        return self._closure.lookup(rows)

    def op_apply(self, op, *args: int) -> int:
        oi = op if isinstance(op, int) else self.names.index(op)
        k, table = self.space.tables[oi]
        if len(args) != k:
            raise ValueError(f"operation expects {k} arguments")
        if k == 0:
            vals = self.space.constant_values(oi)[self.space.point_members(self.arity)]
            return int(self._closure.lookup(vals[None, :])[0])
        G = self.global_values
        flat = np.zeros(G.shape[1], dtype=np.int64)
        for a in args:
            flat = flat * self.space.N + G[a]
        return int(self._closure.lookup(table[flat][None, :])[0])

    def op_table(self, oi: int, cap: int | None = 20_000_000) -> np.ndarray:
        """Full induced table of operation ``oi`` on element indices, shape ``(S,)*k``."""
        cache = self.__dict__.setdefault("_op_tables", {})
        if oi in cache:
            return cache[oi]
        k, table = self.space.tables[oi]
        S = len(self)
        if k == 0:
            out = np.array(self.op_apply(oi), dtype=np.int64)
            cache[oi] = out
            return out
        if cap is not None and S**k > cap:
            raise BudgetExceeded(f"induced table of size {S}^{k} exceeds {cap}", reached=S**k)
        G = self.global_values
        out = np.empty(S**k, dtype=np.int64)
        step = max(1, (1 << 20) // max(1, G.shape[1]))
        for s in range(0, S**k, step):
            idx = np.arange(s, min(S**k, s + step))
            flat = np.zeros((len(idx), G.shape[1]), dtype=np.int64)
            for j in range(k):
                flat = flat * self.space.N + G[idx // S ** (k - 1 - j) % S]
            out[s : s + len(idx)] = self._closure.lookup(table[flat])
        out = out.reshape((S,) * k)
        cache[oi] = out
        return out

    def op_tables(self, cap: int | None = 20_000_000) -> list[np.ndarray]:
        return [self.op_table(oi, cap) for oi in range(len(self.names))]


def generate_free_algebra(
    family: MatrixFamily,
    k: int,
    budget: int | None = DEFAULT_BUDGET,
    tuple_budget: int | None = None,
) -> FreeAlgebra:
    """Breadth-first closure of the k projections; elements in discovery order."""
    if k < 1:
        raise ValueError("arity must be at least 1")
    space = FamilySpace(family)
    cols = space.points(k)
    gens = np.stack(cols, axis=0)
    pm = space.point_members(k)
    if tuple_budget is None and budget is not None:
        tuple_budget = 8 * budget
    closure = SubpowerClosure(
        space.N,
        space.tables,
        gens,
        constants=space.constants(pm),
        budget=budget,
        tuple_budget=tuple_budget,
    )
    try:
        closure.run()
    except ClosureBudgetExceeded as exc:
        raise FreeAlgebraBudgetExceeded(
            f"free algebra on {k} generators exceeds the budget of {budget} elements",
            reached=exc.reached,
        ) from None
    return FreeAlgebra(family, k, closure, space)


def compose_unary(f: TermFunction, g: TermFunction) -> TermFunction:
    """``f`` after ``g``: the term ``f`` with ``g`` substituted for its variable."""
    if f.arity != 1 or g.arity != 1:
        raise FamilyMismatch("compose_unary needs unary term functions")
    if len(f.tables) != len(g.tables) or any(
        len(a) != len(b) for a, b in zip(f.tables, g.tables)
    ):
        raise FamilyMismatch("term functions come from different families")
    tables = tuple(tuple(ft[v] for v in gt) for ft, gt in zip(f.tables, g.tables))
    rep = None
    if f.representative is not None and g.representative is not None:
        rep = substitute(f.representative, {0: g.representative})
    return TermFunction(1, tables, rep)

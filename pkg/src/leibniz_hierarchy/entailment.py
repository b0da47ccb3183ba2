"""Semantic consequence over a matrix family by exhaustive assignment.

Assignments are enumerated variable by variable in lexicographic order.  A
premise is checked as soon as all of its variables are bound and failing
partial assignments are dropped, so the rows that survive are exactly the
premise-satisfying assignments, still in canonical order.  The first row
refuting the conclusion is therefore the canonically smallest counterexample.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .algebra import Matrix, MatrixFamily, check_term, eval_term_array
from .errors import AssignmentBudgetExceeded, ValidationError
from .free import TermFunction
from .terms import Term

DEFAULT_BUDGET = 20_000_000

Formula = Term | TermFunction


@dataclass(frozen=True)
class EntailmentResult:
    holds: bool
    counterexample: tuple[int, tuple[int, ...]] | None = None
    conclusion_index: int | None = None

    def __bool__(self) -> bool:
        return self.holds


def _level(f: Formula) -> int:
    if isinstance(f, TermFunction):
        return f.arity - 1
    return f.arity_needed() - 1


def _evaluate(matrix: Matrix, member: int, f: Formula, cols: list[np.ndarray], length: int) -> np.ndarray:
    if isinstance(f, TermFunction):
        n = matrix.size
        flat = np.zeros(length, dtype=np.int64)
        for j in range(f.arity):
            flat = flat * n + cols[j]
        table = np.asarray(f.tables[member], dtype=np.int64)
        if len(table) != n**f.arity:
            raise ValidationError("term function table does not fit the member")
        return table[flat]
    vals = eval_term_array(matrix.algebra, f, cols)
    return np.broadcast_to(vals, (length,))


def _check_formulas(family: MatrixFamily, formulas: Iterable[Formula]) -> None:
    alg = family.members[0].algebra
    for f in formulas:
        if isinstance(f, TermFunction):
            if len(f.tables) != len(family.members):
                raise ValidationError("term function belongs to a different family")
        else:
            check_term(alg, f)


def entails_all(
    family: MatrixFamily,
    premises: Sequence[Formula],
    conclusions: Sequence[Formula],
    *,
    variables: int | None = None,
    budget: int | None = DEFAULT_BUDGET,
) -> EntailmentResult:
    """Does every conclusion follow from the premises?  Reports the first failure."""
    premises = list(premises)
    conclusions = list(conclusions)
    _check_formulas(family, premises + conclusions)
    v = max([_level(f) + 1 for f in premises + conclusions] + [0])
    if variables is not None:
        if variables < v:
            raise ValidationError(f"formulas need {v} variables, only {variables} given")
        v = variables
    by_level: dict[int, list[Formula]] = {}
    for p in premises:
        by_level.setdefault(_level(p), []).append(p)
    for i, m in enumerate(family.members):
        n = m.size
        F = m.mask
        length = 1
        cols: list[np.ndarray] = []
        alive = np.ones(1, dtype=bool)
        for p in by_level.get(-1, []):
            alive &= F[_evaluate(m, i, p, cols, 1)]
        if not alive.all():
            continue
        for j in range(v):
            length = length * n
            if budget is not None and length > budget:
                raise AssignmentBudgetExceeded(
                    f"{length} partial assignments exceed the budget of {budget}", reached=length
                )
            cols = [np.repeat(c, n) for c in cols] + [np.tile(np.arange(n), length // n)]
            keep = np.ones(length, dtype=bool)
            for p in by_level.get(j, []):
                keep &= F[_evaluate(m, i, p, cols, length)]
            if not keep.all():
                cols = [c[keep] for c in cols]
                length = int(keep.sum())
            if length == 0:
                break
        if length == 0:
            continue
        for ci, c in enumerate(conclusions):
            bad = ~F[_evaluate(m, i, c, cols, length)]
            if bad.any():
                r = int(np.argmax(bad))
                return EntailmentResult(False, (i, tuple(int(col[r]) for col in cols)), ci)
    return EntailmentResult(True)


def entails(
    family: MatrixFamily,
    premises: Sequence[Formula],
    conclusion: Formula,
    *,
    variables: int | None = None,
    budget: int | None = DEFAULT_BUDGET,
) -> EntailmentResult:
    """Decide ``premises |- conclusion``; a refutation names the member and assignment."""
    res = entails_all(family, premises, [conclusion], variables=variables, budget=budget)
    return EntailmentResult(res.holds, res.counterexample)


def is_theorem(family: MatrixFamily, t: Formula, *, budget: int | None = DEFAULT_BUDGET) -> EntailmentResult:
    return entails(family, [], t, budget=budget)

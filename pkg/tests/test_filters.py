import random

import numpy as np
import pytest
from conftest import as_plain, family, matrix, random_matrix

import oracles
from leibniz_hierarchy import enumerate_unary_filters, generate_free_algebra
from leibniz_hierarchy.errors import FilterBudgetExceeded
from leibniz_hierarchy.filters import (
    check_filters,
    composition_table,
    designation_matrix,
    fast_filters,
    naive_filters,
    tau_groups,
)
from leibniz_hierarchy.free import compose_unary


def named(fam, filters):
    free1 = generate_free_algebra(fam, 1)
    return {frozenset(free1.element(e).tables[0] for e in g) for g in filters}


X, NX, TOP, BOT = (0, 1), (1, 0), (1, 1), (0, 0)


class TestExamples:
    def test_meet(self, meet):
        assert named(meet, enumerate_unary_filters(meet)) == {frozenset(), frozenset({X})}

    def test_classical(self, cpc):
        got = named(cpc, enumerate_unary_filters(cpc))
        assert got == {
            frozenset({X, NX, TOP, BOT}),
            frozenset({NX, TOP}),
            frozenset({X, TOP}),
            frozenset({TOP}),
        }

    def test_one_element_empty(self):
        fam = family(matrix(1, [], set()))
        assert enumerate_unary_filters(fam) == [(), (0,)]

    def test_naive_agrees_on_examples(self, cpc, meet, lattice):
        for fam in (cpc, meet, lattice):
            assert enumerate_unary_filters(fam, naive=True) == enumerate_unary_filters(fam)

    def test_canonical_order(self, cpc):
        fs = enumerate_unary_filters(cpc)
        assert fs == sorted(fs, key=lambda g: (len(g), g))
        assert fs[-1] == tuple(range(4))


class TestBudgets:
    def test_naive_cap(self):
        D = np.ones((21, 2), dtype=bool)
        with pytest.raises(FilterBudgetExceeded):
            naive_filters(D)

    def test_fast_budget(self):
        D = np.eye(10, dtype=bool)
        assert len(fast_filters(D)) == 12
        with pytest.raises(FilterBudgetExceeded):
            fast_filters(D, budget=5)


class TestOracles:
    def test_fast_equals_naive(self):
        rng = random.Random(41)
        done = 0
        while done < 80:
            m = random_matrix(rng, max_size=3, max_arity=2)
            free1 = generate_free_algebra(family(m), 1)
            if len(free1) > 12:
                continue
            D = designation_matrix(free1)
            assert fast_filters(D) == naive_filters(D)
            done += 1

    def test_against_literal_enumeration(self):
        rng = random.Random(42)
        done = 0
        while done < 50:
            m = random_matrix(rng, max_size=3, max_arity=2)
            plain = as_plain(m)
            T1 = oracles.free([plain], 1, cap=12)
            if T1 is None or len(T1) > 12:
                continue
            done += 1
            free1 = generate_free_algebra(family(m), 1)
            ours = {frozenset(free1.element(e).tables for e in g) for g in enumerate_unary_filters(family(m))}
            theirs = {frozenset(T1[e] for e in g) for g in oracles.one_variable_filters(T1, [plain])}
            assert ours == theirs

    def test_composition_table(self):
        rng = random.Random(43)
        for _ in range(20):
            m = random_matrix(rng, max_size=3, max_arity=2)
            free1 = generate_free_algebra(family(m), 1)
            comp = composition_table(free1)
            for e in range(len(free1)):
                for phi in range(len(free1)):
                    expect = compose_unary(free1.element(e), free1.element(phi))
                    assert free1.element(int(comp[e, phi])) == expect

    def test_tau_groups(self, cpc):
        free1 = generate_free_algebra(cpc, 1)
        g = tau_groups(free1)
        by_table = {free1.element(i).tables[0]: int(g[i]) for i in range(len(free1))}
        assert by_table[X] == by_table[TOP]
        assert by_table[NX] == by_table[BOT]
        assert by_table[X] != by_table[NX]


class TestFilterCheck:
    def test_meet_fails_at_empty_filter(self, meet):
        free1 = generate_free_algebra(meet, 1)
        res = check_filters(free1, enumerate_unary_filters(free1))
        assert not res.holds
        assert res.failure == {"filter": (), "formula": 0, "formula_in_filter": False}

    def test_classical_passes(self, cpc):
        free1 = generate_free_algebra(cpc, 1)
        res = check_filters(free1, enumerate_unary_filters(free1))
        assert res.holds and res.filters == 4
        assert res.tau_pairs

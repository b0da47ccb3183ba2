import itertools
import random

import pytest
from conftest import AND, IMP, NEG, OR, as_plain, family, matrix, random_matrix

import oracles
from leibniz_hierarchy import MatrixFamily, compose_unary, eval_term, generate_free_algebra
from leibniz_hierarchy.errors import FamilyMismatch, FreeAlgebraBudgetExceeded
from leibniz_hierarchy.free import term_function
from leibniz_hierarchy.terms import parse_term


def tables(free):
    return {free.element(i).tables for i in range(len(free))}


class TestExamples:
    def test_negation(self):
        f = generate_free_algebra(family(matrix(2, [NEG], {1})), 1)
        assert len(f) == 2
        assert tables(f) == {((0, 1),), ((1, 0),)}

    def test_lattice_unary(self):
        assert len(generate_free_algebra(family(matrix(2, [AND, OR], {1})), 1)) == 1

    def test_lattice_binary(self):
        f = generate_free_algebra(family(matrix(2, [AND, OR], {1})), 2)
        assert tables(f) == {((0, 0, 1, 1),), ((0, 1, 0, 1),), ((0, 0, 0, 1),), ((0, 1, 1, 1),)}

    @pytest.mark.parametrize("ops,size", [([NEG], 2), ([AND], 1), ([IMP], 2), ([NEG, AND, OR, IMP], 4)])
    def test_boolean_unary_counts(self, ops, size):
        assert len(generate_free_algebra(family(matrix(2, ops, {1})), 1)) == size

    def test_generators_first(self):
        f = generate_free_algebra(family(matrix(2, [IMP], {1})), 2)
        assert [str(f.representative(i)) for i in f.generator_indices] == ["x", "y"]

    def test_budget(self):
        with pytest.raises(FreeAlgebraBudgetExceeded) as info:
            generate_free_algebra(family(matrix(2, [NEG, AND], {1})), 2, budget=5)
        assert info.value.reached is not None

    def test_bad_arity(self):
        with pytest.raises(ValueError):
            generate_free_algebra(family(matrix(2, [NEG], {1})), 0)


class TestCompose:
    def test_negation_twice(self):
        f = generate_free_algebra(family(matrix(2, [NEG], {1})), 1)
        neg = next(f.element(i) for i in range(len(f)) if f.element(i).tables == ((1, 0),))
        assert compose_unary(neg, neg).tables == ((0, 1),)

    def test_identity_left(self):
        fam = family(matrix(3, [("s", 1, (1, 2, 0))], {0}))
        f = generate_free_algebra(fam, 1)
        x = f.element(f.generator_indices[0])
        for i in range(len(f)):
            assert compose_unary(x, f.element(i)) == f.element(i)

    def test_successor_squared(self):
        fam = family(matrix(3, [("s", 1, (1, 2, 0))], {0}))
        s = term_function(fam, parse_term("(s x)"))
        sq = compose_unary(s, s)
        assert sq.tables == ((2, 0, 1),)
        assert str(sq.representative) == "(s (s x))"

    def test_mismatch(self):
        a = term_function(family(matrix(2, [NEG], {1})), parse_term("(neg x)"))
        b = term_function(family(matrix(3, [("neg", 1, (1, 2, 0))], {1})), parse_term("(neg x)"))
        with pytest.raises(FamilyMismatch):
            compose_unary(a, b)

    def test_agrees_with_substitution(self):
        rng = random.Random(21)
        fam = family(matrix(3, [("f", 2, tuple(rng.randrange(3) for _ in range(9)))], {2}))
        free = generate_free_algebra(fam, 1)
        for _ in range(100):
            f = free.element(rng.randrange(len(free)))
            g = free.element(rng.randrange(len(free)))
            h = compose_unary(f, g)
            assert free.index_of(h) is not None
            assert term_function(fam, h.representative, 1) == h


class TestInvariants:
    def test_representatives_and_closure(self):
        rng = random.Random(22)
        checked = 0
        while checked < 40:
            m1 = random_matrix(rng, max_size=3, max_arity=2)
            ops = [(o.name, o.arity, tuple(rng.randrange(2) for _ in range(2**o.arity))) for o in m1.algebra.operations]
            fam = MatrixFamily((m1, matrix(2, ops, {1})))
            for k in (1, 2):
                try:
                    free = generate_free_algebra(fam, k, budget=200)
                except FreeAlgebraBudgetExceeded:
                    continue
                checked += 1
                for i in range(len(free)):
                    tf = free.element(i)
                    for mi, m in enumerate(fam.members):
                        for idx, pt in enumerate(itertools.product(range(m.size), repeat=k)):
                            assert eval_term(m.algebra, tf.representative, list(pt)) == tf.tables[mi][idx]
                for oi, op in enumerate(fam.members[0].algebra.operations):
                    for args in itertools.product(range(len(free)), repeat=op.arity):
                        res = free.op_apply(oi, *args)
                        assert 0 <= res < len(free)

    def test_matches_oracle(self):
        rng = random.Random(23)
        for _ in range(60):
            m = random_matrix(rng, max_size=3, max_arity=2)
            plain = as_plain(m)
            for k in (1, 2):
                expect = oracles.free([plain], k, cap=300)
                if expect is None:
                    continue
                free = generate_free_algebra(family(m), k)
                assert tables(free) == set(expect)

    def test_unary_size_bound(self):
        rng = random.Random(24)
        for _ in range(40):
            m = random_matrix(rng, max_size=3, max_arity=2)
            assert len(generate_free_algebra(family(m), 1)) <= m.size**m.size

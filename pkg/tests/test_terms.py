import pytest
from hypothesis import given
from hypothesis import strategies as st

from leibniz_hierarchy.errors import ParseError
from leibniz_hierarchy.terms import (
    App,
    Var,
    format_term,
    parse_term,
    parse_term_groups,
    substitute,
    term_depth,
    term_size,
    var_index,
    var_name,
)


def terms(max_leaves=12):
    leaves = st.one_of(st.integers(0, 4).map(Var), st.sampled_from(["c", "one"]).map(lambda n: App(n, ())))
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.builds(lambda a: App("neg", (a,)), sub),
            st.builds(lambda a, b: App("imp", (a, b)), sub, sub),
            st.builds(lambda a, b, c: App("heart", (a, b, c)), sub, sub, sub),
        ),
        max_leaves=max_leaves,
    )


class TestNames:
    def test_first_names(self):
        assert [var_name(i) for i in range(4)] == ["x", "y", "x3", "x4"]

    def test_inverse(self):
        for i in range(30):
            assert var_index(var_name(i)) == i

    @pytest.mark.parametrize("name", ["x1", "x2", "z", "x0", "imp", "x03"])
    def test_non_variables(self, name):
        assert var_index(name) is None


class TestParse:
    def test_application(self):
        assert parse_term("(imp x y)") == App("imp", (Var(0), Var(1)))

    def test_bare_variable(self):
        assert parse_term("x3") == Var(2)

    def test_constant(self):
        assert parse_term("one") == App("one", ())

    def test_groups(self):
        assert parse_term_groups("(x) ((imp x y))") == [Var(0), App("imp", (Var(0), Var(1)))]
        assert parse_term_groups("(x y)") == [Var(0), Var(1)]

    @pytest.mark.parametrize("text", ["(imp x", "imp x)", "()", "x y", "((imp) x)"])
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            parse_term(text)

    def test_bare_atom_group(self):
        with pytest.raises(ParseError):
            parse_term_groups("x")

    @given(terms())
    def test_round_trip(self, t):
        assert parse_term(format_term(t)) == t


class TestStructure:
    def test_metrics(self):
        t = parse_term("(imp (neg x) y)")
        assert term_depth(t) == 2
        assert term_size(t) == 4
        assert t.variables() == {0, 1}
        assert t.arity_needed() == 2

    def test_substitute(self):
        t = parse_term("(imp x y)")
        s = substitute(t, {0: parse_term("(neg y)")})
        assert format_term(s) == "(imp (neg y) y)"

    @given(terms(), terms())
    def test_substitution_size(self, t, u):
        tokens = format_term(t).replace("(", " ").replace(")", " ").split()
        hits = tokens.count("x")
        s = substitute(t, {0: u})
        assert term_size(s) == term_size(t) + hits * (term_size(u) - 1)
        if not hits:
            assert s == t

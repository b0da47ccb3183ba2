import io
import json
import random

import pytest
from conftest import matrix, random_matrix

from leibniz_hierarchy import (
    ClassifyConfig,
    GenCloInstance,
    MatrixFamily,
    build_natural,
    classify,
    clone_member,
    dump_instance,
    emit_report,
    parse_input,
    random_instance,
)
from leibniz_hierarchy.errors import BadTableLength, ParseError, ValidationError
from leibniz_hierarchy.fileformat import dumps, parse_document, report_doc


def parse_text(text):
    return parse_input(io.StringIO(text))


class TestParse:
    def test_implicative(self):
        fam = parse_text('{"matrices":[{"size":2,"operations":[{"name":"imp","arity":2,"table":[1,1,0,1]}],"designated":[1]}]}')
        assert fam == MatrixFamily((matrix(2, [("imp", 2, (1, 1, 0, 1))], {1}),))

    def test_instance(self):
        inst = parse_text('{"algebra":{"size":3,"operations":[{"name":"s","arity":1,"table":[1,2,0]}]},"h":[2,0,1]}')
        assert isinstance(inst, GenCloInstance)
        assert inst.h == (2, 0, 1)

    def test_designated_not_increasing(self):
        with pytest.raises(ValidationError, match=r"\$\.matrices\[0\]\.designated\[1\]"):
            parse_text('{"matrices":[{"size":2,"operations":[],"designated":[1,1]}]}')

    @pytest.mark.parametrize(
        "doc,path,cls",
        [
            ({"matrices": [{"size": 2, "operations": [{"name": "f", "arity": 1, "table": [0]}], "designated": []}]}, "$.matrices[0]", BadTableLength),
            ({"matrices": [{"size": 2, "operations": [{"name": "f", "arity": 1, "table": [0, "a"]}], "designated": []}]}, "$.matrices[0].operations[0].table[1]", ParseError),
            ({"matrices": [{"size": 2, "operations": [], "designated": [2]}]}, "$.matrices[0].designated[0]", ValidationError),
            ({"matrices": [{"size": 2, "operations": []}]}, "$.matrices[0]", ParseError),
            ({"matrices": []}, "$.matrices", ValidationError),
            ({"algebra": {"size": 2, "operations": []}, "h": [0, True]}, "$.h[1]", ParseError),
            ({"something": 1}, "$", ParseError),
            ([], "$", ParseError),
        ],
    )
    def test_diagnostics_name_the_location(self, doc, path, cls):
        with pytest.raises(cls) as info:
            parse_document(doc)
        assert str(info.value).startswith(path + ":")

    def test_signature_mismatch(self):
        doc = {
            "matrices": [
                {"size": 2, "operations": [{"name": "f", "arity": 1, "table": [0, 1]}], "designated": []},
                {"size": 2, "operations": [{"name": "g", "arity": 1, "table": [0, 1]}], "designated": []},
            ]
        }
        with pytest.raises(ValidationError, match=r"^\$\.matrices:"):
            parse_document(doc)

    def test_bad_json(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_text("{")

    def test_not_utf8(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_bytes(b"\xff\xfe{")
        with pytest.raises(ParseError):
            parse_input(p)

    def test_path_and_stdin(self, tmp_path, monkeypatch):
        text = '{"matrices":[{"size":1,"operations":[],"designated":[]}]}'
        p = tmp_path / "m.json"
        p.write_text(text)
        assert parse_input(p) == parse_input(str(p))
        monkeypatch.setattr("sys.stdin", io.StringIO(text))
        assert parse_input("-") == parse_input(p)


class TestRoundTrip:
    def test_random_families(self):
        rng = random.Random(81)
        for _ in range(100):
            first = random_matrix(rng, max_size=4, max_arity=3)
            ms = [first]
            if rng.random() < 0.4:
                n = rng.randint(1, 3)
                ops = [(o.name, o.arity, tuple(rng.randrange(n) for _ in range(n**o.arity))) for o in first.algebra.operations]
                ms.append(matrix(n, ops, {a for a in range(n) if rng.random() < 0.5}))
            fam = MatrixFamily(tuple(ms))
            text = dump_instance(fam)
            assert parse_text(text) == fam
            assert dump_instance(parse_text(text)) == text

    def test_instances(self):
        for s in range(20):
            inst = random_instance(s)
            assert parse_text(dump_instance(inst)) == inst

    def test_integer_arrays_on_one_line(self):
        assert dumps({"t": [1, 2, 3], "e": []}) == '{\n  "t": [1, 2, 3],\n  "e": []\n}\n'


class TestReports:
    def test_json_schema(self, cpc):
        doc = json.loads(emit_report(classify(cpc)))
        assert set(doc) == {
            "tool_version",
            "protoalgebraic",
            "equivalential",
            "weakly_algebraizable",
            "algebraizable",
            "truth_equational",
            "sizes",
            "timings_ms",
            "reduced_input",
        }
        assert doc["timings_ms"] is None
        for name in ("protoalgebraic", "algebraizable"):
            assert doc[name]["holds"] is True and doc[name]["counterexample"] is None
        assert doc["algebraizable"]["witness"]["tau"]["equations"] == [["x", "(imp x x)"]]
        assert parse_document(doc["reduced_input"]) == cpc

    def test_byte_identical(self, cpc, lattice):
        for fam in (cpc, lattice):
            for mode in ("json", "text"):
                assert emit_report(classify(fam), mode) == emit_report(classify(fam), mode)

    def test_timings_optional(self, cpc):
        doc = report_doc(classify(cpc), timings=True)
        assert doc["timings_ms"]["total"] > 0

    def test_classical_text(self, cpc):
        text = emit_report(classify(cpc), "text").decode()
        assert text.count("  YES\n") == 5
        assert "Delta sample: (imp x y)" in text
        assert "tau sample: x ≈ (imp x x)" in text

    def test_lattice_text(self, lattice):
        text = emit_report(classify(lattice), "text").decode()
        assert text.count("  NO\n") == 5
        assert "(a,b)=(1,0), member 0" in text

    def test_unknown_row(self):
        inst = next(random_instance(s) for s in range(60) if not clone_member(random_instance(s)))
        r = classify(MatrixFamily((build_natural(inst).matrix,)), ClassifyConfig(free_budget=50))
        assert r.any_unknown
        assert "UNKNOWN (budget)" in emit_report(r, "text").decode()
        assert json.loads(emit_report(r))["truth_equational"]["holds"] == "unknown"

    def test_truncation(self, cpc):
        doc = json.loads(emit_report(classify(cpc), witness_cap=1))
        d = doc["algebraizable"]["witness"]["delta"]
        assert d == {"count": 2, "terms": ["(imp x y)"], "truncated": True}

    def test_bad_mode(self, cpc):
        with pytest.raises(ValueError):
            emit_report(classify(cpc), "yaml")

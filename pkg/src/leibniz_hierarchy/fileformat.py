"""JSON instance files and classification reports.

Instance files hold either ``{"matrices": [...]}`` or ``{"algebra": ..., "h": [...]}``.
Reports are emitted with sorted keys and integer arrays kept on one line, so
equal inputs give equal bytes.
"""
from __future__ import annotations

import json
import re
from pathlib import Path
from typing import IO

from . import __version__
from .algebra import FiniteAlgebra, Matrix, MatrixFamily, Operation, validate_algebra
from .errors import ParseError, ValidationError
from .reductions import GenCloInstance, validate_genclo_instance
from .terms import Term, format_term

CLASS_ORDER = (
    "protoalgebraic",
    "equivalential",
    "weakly_algebraizable",
    "algebraizable",
    "truth_equational",
)


def _fail(path: str, msg: str, cls=ParseError):
    raise cls(f"{path}: {msg}")


def _int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {type(value).__name__}")
    return value


def _list(value, path: str) -> list:
    if not isinstance(value, list):
        _fail(path, f"expected an array, got {type(value).__name__}")
    return value


def _obj(value, path: str, keys: tuple[str, ...]) -> dict:
    if not isinstance(value, dict):
        _fail(path, f"expected an object, got {type(value).__name__}")
    for k in keys:
        if k not in value:
            _fail(path, f"missing key {k!r}")
    return value


def parse_algebra_doc(doc, path: str = "$") -> FiniteAlgebra:
    doc = _obj(doc, path, ("size", "operations"))
    size = _int(doc["size"], f"{path}.size")
    ops = []
    for j, op in enumerate(_list(doc["operations"], f"{path}.operations")):
        p = f"{path}.operations[{j}]"
        op = _obj(op, p, ("name", "arity", "table"))
        if not isinstance(op["name"], str):
            _fail(f"{p}.name", "expected a string")
        arity = _int(op["arity"], f"{p}.arity")
        table = [_int(v, f"{p}.table[{i}]") for i, v in enumerate(_list(op["table"], f"{p}.table"))]
        ops.append({"name": op["name"], "arity": arity, "table": table})
    try:
        return validate_algebra({"size": size, "operations": ops})
    except ValidationError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def parse_matrix_doc(doc, path: str = "$") -> Matrix:
    doc = _obj(doc, path, ("size", "operations", "designated"))
    alg = parse_algebra_doc(doc, path)
    des = [_int(v, f"{path}.designated[{i}]") for i, v in enumerate(_list(doc["designated"], f"{path}.designated"))]
    for i in range(1, len(des)):
        if des[i] <= des[i - 1]:
            _fail(f"{path}.designated[{i}]", "entries must be strictly increasing", ValidationError)
    for i, v in enumerate(des):
        if not 0 <= v < alg.size:
            _fail(f"{path}.designated[{i}]", f"{v} outside the universe 0..{alg.size - 1}", ValidationError)
    return Matrix(alg, frozenset(des))


def parse_document(doc) -> MatrixFamily | GenCloInstance:
    if not isinstance(doc, dict):
        _fail("$", "expected an object")
    if "matrices" in doc:
        mats = _list(doc["matrices"], "$.matrices")
        if not mats:
            _fail("$.matrices", "at least one matrix is required", ValidationError)
        members = tuple(parse_matrix_doc(m, f"$.matrices[{i}]") for i, m in enumerate(mats))
        try:
            return MatrixFamily(members)
        except ValidationError as exc:
            raise type(exc)(f"$.matrices: {exc}") from None
    if "algebra" in doc and "h" in doc:
        alg = parse_algebra_doc(doc["algebra"], "$.algebra")
        h = [_int(v, f"$.h[{i}]") for i, v in enumerate(_list(doc["h"], "$.h"))]
        try:
            return validate_genclo_instance((alg, h))
        except ValidationError as exc:
            raise type(exc)(f"$: {exc}") from None
    _fail("$", "expected key 'matrices' or keys 'algebra' and 'h'")


def parse_input(source: str | Path | IO[str]) -> MatrixFamily | GenCloInstance:
    """Read an instance file from a path, ``"-"`` for stdin, or an open text stream."""
    import sys

    try:
        if hasattr(source, "read"):
            text = source.read()
        elif str(source) == "-":
            text = sys.stdin.read()
        else:
            text = Path(source).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"input is not UTF-8: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_document(doc)


# serialisation -----------------------------------------------------------------


def algebra_doc(alg: FiniteAlgebra) -> dict:
    return {
        "size": alg.size,
        "operations": [
            {"name": op.name, "arity": op.arity, "table": list(op.table)} for op in alg.operations
        ],
    }


def matrix_doc(m: Matrix) -> dict:
    doc = algebra_doc(m.algebra)
    doc["designated"] = sorted(m.designated)
    return doc


def instance_doc(value: MatrixFamily | Matrix | GenCloInstance) -> dict:
    if isinstance(value, Matrix):
        value = MatrixFamily((value,))
    if isinstance(value, MatrixFamily):
        return {"matrices": [matrix_doc(m) for m in value.members]}
    if isinstance(value, GenCloInstance):
        return {"algebra": algebra_doc(value.algebra), "h": list(value.h)}
    raise TypeError(f"cannot serialise {type(value).__name__}")


_INT_ARRAY = re.compile(r"\[\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*\]")


def dumps(doc, *, sort_keys: bool = False) -> str:
    text = json.dumps(doc, indent=2, sort_keys=sort_keys, ensure_ascii=False)
    text = _INT_ARRAY.sub(lambda m: "[" + ", ".join(re.split(r"\s*,\s*", m.group(1))) + "]", text)
    return text + "\n"


def dump_instance(value) -> str:
    return dumps(instance_doc(value))


# reports ---------------------------------------------------------------------------


def _term_list(terms: list[Term], cap: int | None) -> dict:
    shown = terms if cap is None else terms[:cap]
    return {
        "count": len(terms),
        "terms": [format_term(t) for t in shown],
        "truncated": len(shown) < len(terms),
    }


def _pair_list(pairs: list[tuple[Term, Term]], cap: int | None) -> dict:
    shown = pairs if cap is None else pairs[:cap]
    return {
        "count": len(pairs),
        "equations": [[format_term(e), format_term(d)] for e, d in shown],
        "truncated": len(shown) < len(pairs),
    }


def witness_doc(witness: dict | None, cap: int | None) -> dict | None:
    if witness is None:
        return None
    out = {}
    for key, val in witness.items():
        if key == "delta":
            out[key] = _term_list(val, cap)
        elif key == "tau":
            out[key] = _pair_list(val, cap)
        else:
            out[key] = val
    return out


def report_doc(report, *, witness_cap: int | None = 8, timings: bool = False) -> dict:
    doc: dict = {"tool_version": __version__}
    for name in CLASS_ORDER:
        v = report.verdicts[name]
        entry = {
            "holds": "unknown" if v.holds is None else v.holds,
            "witness": witness_doc(v.witness, witness_cap),
            "counterexample": v.counterexample,
        }
        if v.note:
            entry["note"] = v.note
        doc[name] = entry
    doc["sizes"] = dict(report.sizes)
    doc["timings_ms"] = dict(report.timings_ms) if timings else None
    doc["reduced_input"] = instance_doc(report.family)
    return doc


def _cex_text(cex: dict) -> str:
    check = cex.get("check", "")
    if "a" in cex and "b" in cex:
        return f"{check}: (a,b)=({cex['a']},{cex['b']}), member {cex['member']}"
    if check == "congruence rule":
        pairs = ", ".join(f"({a},{b})" for a, b in cex["pairs"])
        img = cex["image"]
        return f"{check} for {cex['operation']}: pairs {pairs} map to ({img[0]},{img[1]}), member {cex['member']}"
    if check == "tau on submatrices":
        sub = ",".join(str(x) for x in cex["subuniverse"])
        return f"{check}: element {cex['element']} of subuniverse {{{sub}}}, member {cex['member']}"
    if check == "filter":
        filt = ", ".join(cex["filter"])
        where = "inside" if cex["formula_in_filter"] else "outside"
        return f"filter {{{filt}}} mis-defined at {cex['formula']} ({where} the filter)"
    return check


def report_text(report, *, witness_cap: int | None = 8, timings: bool = False) -> str:
    lines = [f"leibniz-hierarchy {__version__}"]
    fam = report.family
    src = report.input_family or fam
    lines.append(
        "input: {} matri{}, sizes {} -> reduced {}".format(
            len(fam.members),
            "x" if len(fam.members) == 1 else "ces",
            ",".join(str(m.size) for m in src.members),
            ",".join(str(m.size) for m in fam.members),
        )
    )
    lines.append("")
    width = max(len(n) for n in CLASS_ORDER) + 2
    for name in CLASS_ORDER:
        v = report.verdicts[name]
        word = "UNKNOWN (budget)" if v.holds is None else ("YES" if v.holds else "NO")
        lines.append(f"{name:<{width}}{word}")
    lines.append("")
    for name in CLASS_ORDER:
        v = report.verdicts[name]
        if v.holds and v.witness:
            parts = []
            if "delta" in v.witness:
                d = v.witness["delta"]
                shown = d if witness_cap is None else d[:witness_cap]
                sample = "; ".join(format_term(t) for t in shown) or "(empty)"
                parts.append(f"Delta sample: {sample} [{len(d)} term{'s' * (len(d) != 1)}]")
            if "tau" in v.witness:
                t = v.witness["tau"]
                shown = t if witness_cap is None else t[:witness_cap]
                sample = "; ".join(f"{format_term(e)} ≈ {format_term(d)}" for e, d in shown) or "(empty)"
                parts.append(f"tau sample: {sample} [{len(t)} equation{'s' * (len(t) != 1)}]")
            lines.append(f"{name}: " + " | ".join(parts))
        elif v.holds is False and v.counterexample:
            lines.append(f"{name}: counterexample {_cex_text(v.counterexample)}")
        elif v.holds is None:
            lines.append(f"{name}: {v.note or 'budget exceeded'}")
    sizes = ", ".join(f"{k}={'-' if val is None else val}" for k, val in report.sizes.items())
    lines.append(f"sizes: {sizes}")
    if timings:
        lines.append("timings_ms: " + ", ".join(f"{k}={v}" for k, v in report.timings_ms.items()))
    return "\n".join(lines) + "\n"


def emit_report(report, mode: str = "json", *, witness_cap: int | None = 8, timings: bool = False) -> bytes:
    if mode == "json":
        return dumps(report_doc(report, witness_cap=witness_cap, timings=timings), sort_keys=True).encode()
    if mode == "text":
        return report_text(report, witness_cap=witness_cap, timings=timings).encode()
    raise ValueError(f"unknown report mode {mode!r}")

"""JSON interchange for algebra presentations and twisted complexes.

One document family.  Algebra files carry ``field_characteristic``,
``vertices``, ``basis`` (name/src/dst/deg records) and ``mult`` (left,
right, result-combination records; omitted products are zero).  Complex
files carry ``summands`` (vertex/shift records) and ``differential``
(row/col/element/coeff records) and refer to an ambient algebra.

Saving is canonical: keys sorted, multiplication entries ordered by
(left, right), coefficients emitted as integers when integral and as
"numerator/denominator" strings otherwise, so load -> save -> load is the
identity and save output is byte-stable.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .algebra_core import BasisElement, GradedAlgebra
from .exactlin import ScalarField
from .perfcx import TwistedComplex


class FormatError(ValueError):
    """Malformed or inconsistent input document."""


def _coeff_to_json(c):
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return int(c)
        return f"{c.numerator}/{c.denominator}"
    return int(c)


def _coeff_from_json(v):
    if isinstance(v, str):
        num, _, den = v.partition("/")
        try:
            return Fraction(int(num), int(den or "1"))
        except ValueError as exc:
            raise FormatError(f"bad coefficient {v!r}") from exc
    if isinstance(v, (int, float)):
        if isinstance(v, float) and not v.is_integer():
            raise FormatError(f"non-integer float coefficient {v!r}")
        return int(v)
    raise FormatError(f"bad coefficient {v!r}")


def algebra_to_dict(A: GradedAlgebra) -> dict:
    mult = []
    for (i, j) in sorted(A.mult):
        combo = A.mult[(i, j)]
        mult.append({
            "left": A.basis[i].name,
            "right": A.basis[j].name,
            "result": [{"coeff": _coeff_to_json(c), "name": A.basis[k].name}
                       for k, c in sorted(combo.items())],
        })
    return {
        "field_characteristic": A.field.characteristic,
        "vertices": list(A.vertices),
        "basis": [{"name": b.name, "src": b.src, "dst": b.dst, "deg": b.deg}
                  for b in A.basis],
        "mult": mult,
    }


def algebra_from_dict(doc: dict) -> GradedAlgebra:
    try:
        p = int(doc["field_characteristic"])
        vertices = [str(v) for v in doc["vertices"]]
        basis_doc = doc["basis"]
        mult_doc = doc.get("mult", [])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"missing or malformed field: {exc}") from exc
    try:
        field = ScalarField(p)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    basis = []
    for rec in basis_doc:
        try:
            basis.append(BasisElement(str(rec["name"]), str(rec["src"]),
                                      str(rec["dst"]), int(rec["deg"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad basis record {rec!r}") from exc
    index = {b.name: k for k, b in enumerate(basis)}
    if len(index) != len(basis):
        raise FormatError("duplicate basis names")
    mult = {}
    for rec in mult_doc:
        try:
            i = index[rec["left"]]
            j = index[rec["right"]]
            combo = {index[term["name"]]: _coeff_from_json(term["coeff"])
                     for term in rec["result"]}
        except (KeyError, TypeError) as exc:
            raise FormatError(f"bad multiplication record {rec!r}") from exc
        if (i, j) in mult:
            raise FormatError(
                f"duplicate multiplication record for ({rec['left']}, {rec['right']})")
        mult[(i, j)] = combo
    return GradedAlgebra(field, vertices, basis, mult)


def dump_algebra(A: GradedAlgebra) -> str:
    return json.dumps(algebra_to_dict(A), indent=2, sort_keys=True) + "\n"


def load_algebra(path: str) -> GradedAlgebra:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("top-level document must be an object")
    return algebra_from_dict(doc)


def save_algebra(A: GradedAlgebra, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_algebra(A))


# ---------------------------------------------------------------------------
# complexes


def complex_to_dict(X: TwistedComplex) -> dict:
    A = X.algebra
    diff = []
    for (b, a) in sorted(X.diff):
        for k, c in sorted(X.diff[(b, a)].items()):
            diff.append({"row": b, "col": a,
                         "element": A.basis[k].name,
                         "coeff": _coeff_to_json(c)})
    return {
        "summands": [{"vertex": A.vertices[v], "shift": s} for v, s in X.summands],
        "differential": diff,
    }


def complex_from_dict(A: GradedAlgebra, doc: dict) -> TwistedComplex:
    try:
        summands = [(A.vertex_index(str(rec["vertex"])), int(rec["shift"]))
                    for rec in doc["summands"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad summand record: {exc}") from exc
    diff: dict = {}
    for rec in doc.get("differential", []):
        try:
            b, a = int(rec["row"]), int(rec["col"])
            k = A.basis_index(str(rec["element"]))
            c = A.field.coerce(_coeff_from_json(rec["coeff"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad differential record {rec!r}") from exc
        entry = diff.setdefault((b, a), {})
        entry[k] = A.field.add(entry.get(k, A.field.zero()), c)
    try:
        return TwistedComplex(A, summands, diff)
    except ValueError as exc:
        raise FormatError(f"inconsistent complex: {exc}") from exc


def dump_complex(X: TwistedComplex) -> str:
    return json.dumps(complex_to_dict(X), indent=2, sort_keys=True) + "\n"


def load_complex(A: GradedAlgebra, path: str) -> TwistedComplex:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from exc
    return complex_from_dict(A, doc)

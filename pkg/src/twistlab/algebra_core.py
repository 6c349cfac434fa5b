"""Finite-dimensional graded algebras presented by basis and structure constants.

An algebra here is a finite homogeneous basis with source/target vertices
(orthogonal idempotents give the vertex structure), a multiplication table,
and an integer grading.  The internal grading is the cohomological grading:
every algebra is a dg algebra with zero differential, and all differentials
live one level up, on twisted complexes.

Composition convention, fixed globally: ``x * y`` means "y then x", so a
product is nonzero only when ``src(x) == dst(y)`` and the result runs
``src(y) -> dst(x)``.  Elements therefore compose exactly like functions,
and matrices of elements compose by ordinary row-times-column multiplication.
Every sign convention downstream depends on this choice.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Mapping

from .exactlin import ScalarField, DEFAULT_PRIME_FIELD

# a sparse linear combination of basis elements: basis index -> field scalar
Elem = dict


@dataclass(frozen=True)
class BasisElement:
    name: str
    src: str
    dst: str
    deg: int


@dataclass(frozen=True)
class ValidationIssue:
    kind: str
    detail: str
    elements: tuple[str, ...] = ()

    def __str__(self):
        where = f" [{', '.join(self.elements)}]" if self.elements else ""
        return f"{self.kind}: {self.detail}{where}"


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.issues

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(str(i) for i in self.issues)


class GradedAlgebra:
    """A graded algebra presentation; immutable after construction.

    ``mult`` maps ordered basis-index pairs (left, right) to sparse linear
    combinations; omitted pairs are zero.  Structure constants are coerced
    into the scalar field once, at construction.
    """

    __slots__ = ("field", "vertices", "basis", "mult", "idempotent",
                 "_by_src_tgt", "_index", "_key")

    def __init__(self, field: ScalarField, vertices: Iterable[str],
                 basis: Iterable[BasisElement],
                 mult: Mapping[tuple[int, int], Mapping[int, object]]):
        self.field = field
        self.vertices = tuple(vertices)
        self.basis = tuple(basis)
        coerced: dict[tuple[int, int], Elem] = {}
        for (i, j), combo in mult.items():
            entry = {k: field.coerce(c) for k, c in combo.items() if field.coerce(c) != field.zero()}
            if entry:
                coerced[(i, j)] = entry
        self.mult = coerced
        self._index = {b.name: k for k, b in enumerate(self.basis)}
        if len(self._index) != len(self.basis):
            raise ValueError("duplicate basis names")
        # the idempotent at each vertex: the degree-0 loop that squares to itself
        idem: dict[str, int] = {}
        for k, b in enumerate(self.basis):
            if b.deg == 0 and b.src == b.dst:
                sq = self.mult.get((k, k), {})
                if sq.get(k) == field.one() and len(sq) == 1 and b.src not in idem:
                    idem[b.src] = k
        self.idempotent = idem
        by: dict[tuple[str, str], list[int]] = {}
        for k, b in enumerate(self.basis):
            by.setdefault((b.src, b.dst), []).append(k)
        self._by_src_tgt = {k: tuple(v) for k, v in by.items()}
        self._key = (
            field,
            self.vertices,
            self.basis,
            tuple(sorted((p, tuple(sorted(c.items()))) for p, c in self.mult.items())),
        )

    # queries ----------------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def top_degree(self) -> int:
        return max(b.deg for b in self.basis)

    def basis_index(self, name: str) -> int:
        return self._index[name]

    def elements_from_to(self, src: str, dst: str) -> tuple[int, ...]:
        return self._by_src_tgt.get((src, dst), ())

    def vertex_index(self, name: str) -> int:
        return self.vertices.index(name)

    def __eq__(self, other):
        if not isinstance(other, GradedAlgebra):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash((self.field, self.vertices, self.basis))

    def __repr__(self):
        return (f"GradedAlgebra({len(self.vertices)} vertices, dim {self.dim}, "
                f"{self.field.kind})")

    # element arithmetic -------------------------------------------------------

    def mul_basis(self, i: int, j: int) -> Elem:
        return self.mult.get((i, j), {})

    def mul(self, x: Elem, y: Elem) -> Elem:
        """Product x*y ("y then x") of sparse linear combinations."""
        f = self.field
        out: Elem = {}
        for i, ci in x.items():
            for j, cj in y.items():
                prod = self.mult.get((i, j))
                if not prod:
                    continue
                c = f.mul(ci, cj)
                for k, ck in prod.items():
                    v = f.add(out.get(k, f.zero()), f.mul(c, ck))
                    if v == f.zero():
                        out.pop(k, None)
                    else:
                        out[k] = v
        return out

    def add(self, x: Elem, y: Elem) -> Elem:
        f = self.field
        out = dict(x)
        for k, c in y.items():
            v = f.add(out.get(k, f.zero()), c)
            if v == f.zero():
                out.pop(k, None)
            else:
                out[k] = v
        return out

    def scale(self, c, x: Elem) -> Elem:
        f = self.field
        if c == f.zero():
            return {}
        return {k: f.mul(c, v) for k, v in x.items()}

    def neg(self, x: Elem) -> Elem:
        f = self.field
        return {k: f.neg(v) for k, v in x.items()}

    def elem(self, name: str, coeff=None) -> Elem:
        c = self.field.one() if coeff is None else self.field.coerce(coeff)
        return {self.basis_index(name): c}

    def elem_degree(self, x: Elem) -> int | None:
        """The common degree of a homogeneous element; None for 0 or mixed."""
        degs = {self.basis[k].deg for k in x}
        if len(degs) != 1:
            return None
        return degs.pop()

    def format_elem(self, x: Elem) -> str:
        if not x:
            return "0"
        return " + ".join(f"{c}*{self.basis[k].name}" for k, c in sorted(x.items()))


def validate(A: GradedAlgebra) -> ValidationReport:
    """Check every presentation invariant; violations are data, not exceptions.

    Reports: missing idempotents, orthogonality and unit failures,
    source/target bookkeeping errors, degree additivity failures, and every
    associativity failure with the offending basis triple.
    """
    issues: list[ValidationIssue] = []
    f = A.field

    for v in A.vertices:
        if v not in A.idempotent:
            issues.append(ValidationIssue(
                "missing-idempotent",
                f"no degree-0 self-squaring loop found at vertex {v!r}"))
    # orthogonality of idempotents
    for u, iu in A.idempotent.items():
        for v, iv in A.idempotent.items():
            prod = A.mul_basis(iu, iv)
            expect = {iu: f.one()} if u == v else {}
            if prod != expect:
                issues.append(ValidationIssue(
                    "idempotents-not-orthogonal",
                    f"e_{u} * e_{v} = {A.format_elem(prod)}",
                    (A.basis[iu].name, A.basis[iv].name)))
    # the sum of idempotents acts as the unit on every basis element
    for k, b in enumerate(A.basis):
        it = A.idempotent.get(b.dst)
        if it is not None and A.mul_basis(it, k) != {k: f.one()}:
            issues.append(ValidationIssue(
                "unit-fails-left", f"e_{b.dst} * {b.name} != {b.name}", (b.name,)))
        isrc = A.idempotent.get(b.src)
        if isrc is not None and A.mul_basis(k, isrc) != {k: f.one()}:
            issues.append(ValidationIssue(
                "unit-fails-right", f"{b.name} * e_{b.src} != {b.name}", (b.name,)))
        for v, iv in A.idempotent.items():
            if v != b.dst and A.mul_basis(iv, k):
                issues.append(ValidationIssue(
                    "unit-fails-orthogonal", f"e_{v} * {b.name} != 0", (b.name,)))
            if v != b.src and A.mul_basis(k, iv):
                issues.append(ValidationIssue(
                    "unit-fails-orthogonal", f"{b.name} * e_{v} != 0", (b.name,)))

    # source/target and degree bookkeeping of every declared product
    for (i, j), combo in A.mult.items():
        bi, bj = A.basis[i], A.basis[j]
        if bj.dst != bi.src:
            issues.append(ValidationIssue(
                "composition-mismatch",
                f"{bi.name} * {bj.name} declared nonzero but "
                f"dst({bj.name})={bj.dst} != src({bi.name})={bi.src}",
                (bi.name, bj.name)))
        for k in combo:
            bk = A.basis[k]
            if (bk.src, bk.dst) != (bj.src, bi.dst):
                issues.append(ValidationIssue(
                    "product-endpoints",
                    f"{bi.name} * {bj.name} contains {bk.name} with wrong endpoints",
                    (bi.name, bj.name, bk.name)))
            if bk.deg != bi.deg + bj.deg:
                issues.append(ValidationIssue(
                    "degree-not-additive",
                    f"deg({bi.name}*{bj.name}) term {bk.name}: "
                    f"{bk.deg} != {bi.deg}+{bj.deg}",
                    (bi.name, bj.name, bk.name)))

    # associativity on all basis triples (finite check)
    n = A.dim
    for i in range(n):
        for j in range(n):
            xy = A.mul_basis(i, j)
            for k in range(n):
                yz = A.mul_basis(j, k)
                left = A.mul(xy, {k: f.one()})
                right = A.mul({i: f.one()}, yz)
                if left != right:
                    issues.append(ValidationIssue(
                        "associativity",
                        f"({A.basis[i].name}*{A.basis[j].name})*{A.basis[k].name} = "
                        f"{A.format_elem(left)} but "
                        f"{A.basis[i].name}*({A.basis[j].name}*{A.basis[k].name}) = "
                        f"{A.format_elem(right)}",
                        (A.basis[i].name, A.basis[j].name, A.basis[k].name)))

    return ValidationReport(tuple(issues))


def hom_space(A: GradedAlgebra, i: str, j: str) -> dict[int, int]:
    """Graded dimensions of the elements running from vertex i to vertex j.

    These are the graded Hom spaces between the projectives P_i and P_j.
    """
    for v in (i, j):
        if v not in A.vertices:
            raise KeyError(f"unknown vertex {v!r}")
    dims: dict[int, int] = {}
    for k in A.elements_from_to(i, j):
        d = A.basis[k].deg
        dims[d] = dims.get(d, 0) + 1
    return dims


def cartan_euler(A: GradedAlgebra) -> list[list[int]]:
    """The Euler pairing matrix of the projectives.

    chi[j][i] is the alternating sum over degrees of dim Hom(P_i, P_j); the
    column index is the source projective.
    """
    n = len(A.vertices)
    chi = [[0] * n for _ in range(n)]
    for ii, vi in enumerate(A.vertices):
        for jj, vj in enumerate(A.vertices):
            chi[jj][ii] = sum((-1) ** m * d for m, d in hom_space(A, vi, vj).items())
    return chi

"""Perfect complexes as one-sided twisted complexes of shifted projectives.

An object is a finite list of summands (vertex, shift) denoting shifted
projectives P_vertex[shift], together with a differential: a square matrix
of algebra elements where the entry from summand a to summand b is
homogeneous with deg(entry) + shift(a) - shift(b) = 1, and the matrix
squares to zero under algebra multiplication.

Sign conventions, fixed once and used everywhere:

* Hom differential      d(f) = delta_Y . f - (-1)^{|f|} f . delta_X
* cone differential     [[delta_Y, f], [0, -delta_X]]
* shift by n            negates the differential n times

The contracts of all higher operations are stated at the level of
Hom-cohomology dimensions against a generator; nothing here ever tests
isomorphism of complexes directly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .algebra_core import Elem, GradedAlgebra
from .exactlin import ExactMatrix, kernel_basis, column_space_pivots, rank, solve

DEFAULT_SUMMAND_CAP = 20000
_CAP_ENV = "TWISTLAB_CAP"


def summand_cap() -> int:
    """The runaway-iteration guard; override with the TWISTLAB_CAP variable."""
    raw = os.environ.get(_CAP_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_SUMMAND_CAP


class CapExceeded(RuntimeError):
    """Raised when a construction would exceed the summand cap."""


#: observers called as fn(source, target, result) on every cone construction;
#: used by the K-class additivity instrumentation in the test suites
cone_observers: list[Callable] = []


class TwistedComplex:
    """Immutable twisted complex; the constructor enforces both invariants."""

    __slots__ = ("algebra", "summands", "diff")

    def __init__(self, algebra: GradedAlgebra,
                 summands: Iterable[tuple[int, int]],
                 diff: dict[tuple[int, int], Elem],
                 *, _trusted: bool = False):
        self.algebra = algebra
        self.summands = tuple((int(v), int(s)) for v, s in summands)
        if len(self.summands) > summand_cap():
            raise CapExceeded(
                f"{len(self.summands)} summands exceed the cap {summand_cap()}")
        self.diff = {k: dict(v) for k, v in diff.items() if v}
        if not _trusted:
            self._check()

    def _check(self):
        A = self.algebra
        for (b, a), el in self.diff.items():
            va, sa = self.summands[a]
            vb, sb = self.summands[b]
            for k in el:
                be = A.basis[k]
                if (be.src, be.dst) != (A.vertices[va], A.vertices[vb]):
                    raise ValueError(
                        f"entry ({b},{a}) term {be.name} has endpoints "
                        f"{be.src}->{be.dst}, summands demand "
                        f"{A.vertices[va]}->{A.vertices[vb]}")
                if be.deg + sa - sb != 1:
                    raise ValueError(
                        f"entry ({b},{a}) term {be.name}: degree "
                        f"{be.deg}+{sa}-{sb} != 1")
        sq = _compose(A, self.diff, self.diff)
        if any(sq.values()):
            bad = next(k for k, v in sq.items() if v)
            raise ValueError(
                f"differential does not square to zero at {bad}: "
                f"{A.format_elem(sq[bad])}")

    @property
    def n_summands(self) -> int:
        return len(self.summands)

    @property
    def is_zero(self) -> bool:
        return not self.summands

    def summand_labels(self) -> list[str]:
        A = self.algebra
        return [f"P{A.vertices[v]}[{s}]" for v, s in self.summands]

    def __repr__(self):
        if self.is_zero:
            return "TwistedComplex(0)"
        return f"TwistedComplex({' + '.join(self.summand_labels())})"


def _compose(A: GradedAlgebra, f: dict, g: dict) -> dict:
    """Matrix composition (f.g)[c][a] = sum_b f[c][b] * g[b][a]."""
    out: dict[tuple[int, int], Elem] = {}
    by_src: dict[int, list[tuple[int, Elem]]] = {}
    for (b, a), el in g.items():
        by_src.setdefault(b, []).append((a, el))
    for (c, b), el_f in f.items():
        for a, el_g in by_src.get(b, ()):  # paths a -> b -> c
            prod = A.mul(el_f, el_g)
            if prod:
                key = (c, a)
                out[key] = A.add(out.get(key, {}), prod)
    return {k: v for k, v in out.items() if v}


def _scale_matrix(A: GradedAlgebra, f: dict, c) -> dict:
    return {k: A.scale(c, v) for k, v in f.items()} if c != A.field.zero() else {}


def _add_matrix(A: GradedAlgebra, f: dict, g: dict) -> dict:
    out = {k: dict(v) for k, v in f.items()}
    for k, v in g.items():
        out[k] = A.add(out.get(k, {}), v)
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True)
class ChainMap:
    """A matrix of homogeneous algebra elements between two complexes.

    The component from summand a of the source to summand b of the target
    is stored at key (b, a) and must be homogeneous with
    deg + shift_src(a) - shift_tgt(b) == degree.
    """

    source: TwistedComplex
    target: TwistedComplex
    degree: int
    components: dict

    def __post_init__(self):
        A = self.source.algebra
        if A != self.target.algebra:
            raise ValueError("chain map across different algebras")
        for (b, a), el in self.components.items():
            va, sa = self.source.summands[a]
            vb, sb = self.target.summands[b]
            for k in el:
                be = A.basis[k]
                if (be.src, be.dst) != (A.vertices[va], A.vertices[vb]):
                    raise ValueError(f"component ({b},{a}) endpoint mismatch")
                if be.deg + sa - sb != self.degree:
                    raise ValueError(
                        f"component ({b},{a}) not homogeneous of degree {self.degree}")

    def defect(self) -> dict:
        """d(f) = delta_Y . f - (-1)^{|f|} f . delta_X; zero iff closed."""
        A = self.source.algebra
        left = _compose(A, self.target.diff, self.components)
        right = _compose(A, self.components, self.source.diff)
        sign = A.field.sign(self.degree)
        return _add_matrix(A, left, _scale_matrix(A, right, A.field.neg(sign)))

    def is_closed(self) -> bool:
        return not any(self.defect().values())


# ---------------------------------------------------------------------------
# basic constructions


def zero_complex(A: GradedAlgebra) -> TwistedComplex:
    return TwistedComplex(A, (), {}, _trusted=True)


def projective(A: GradedAlgebra, vertex: str, shift_by: int = 0) -> TwistedComplex:
    return TwistedComplex(A, ((A.vertex_index(vertex), shift_by),), {}, _trusted=True)


def full_generator(A: GradedAlgebra) -> TwistedComplex:
    """The direct sum of all projectives: the split-generator used throughout."""
    return TwistedComplex(A, tuple((i, 0) for i in range(len(A.vertices))), {},
                          _trusted=True)


def shift(X: TwistedComplex, n: int) -> TwistedComplex:
    """Shift all summands by n; the differential picks up (-1)^n."""
    if n == 0:
        return X
    A = X.algebra
    sign = A.field.sign(n)
    diff = {k: A.scale(sign, v) for k, v in X.diff.items()}
    return TwistedComplex(A, tuple((v, s + n) for v, s in X.summands), diff,
                          _trusted=True)


def direct_sum(X: TwistedComplex, Y: TwistedComplex) -> TwistedComplex:
    if X.algebra != Y.algebra:
        raise ValueError("direct sum across different algebras")
    off = X.n_summands
    diff = {k: dict(v) for k, v in X.diff.items()}
    for (b, a), el in Y.diff.items():
        diff[(b + off, a + off)] = dict(el)
    return TwistedComplex(X.algebra, X.summands + Y.summands, diff, _trusted=True)


def direct_sum_many(parts: Sequence[TwistedComplex]) -> TwistedComplex:
    if not parts:
        raise ValueError("empty direct sum needs an algebra; use zero_complex")
    out = parts[0]
    for p in parts[1:]:
        out = direct_sum(out, p)
    return out


def cone(f: ChainMap) -> TwistedComplex:
    """Mapping cone of a closed degree-0 chain map.

    Summands of the target followed by the summands of the source shifted
    by one; differential [[delta_Y, f], [0, -delta_X]].
    """
    if f.degree != 0:
        raise ValueError("cone requires a degree-0 map")
    if not f.is_closed():
        raise ValueError("cone requires a closed map")
    X, Y = f.source, f.target
    A = X.algebra
    off = Y.n_summands
    summands = Y.summands + tuple((v, s + 1) for v, s in X.summands)
    diff = {k: dict(v) for k, v in Y.diff.items()}
    for (b, a), el in X.diff.items():
        diff[(b + off, a + off)] = A.neg(el)
    for (b, a), el in f.components.items():
        diff[(b, a + off)] = dict(el)
    result = TwistedComplex(A, summands, diff, _trusted=True)
    sq = _compose(A, result.diff, result.diff)
    if any(sq.values()):
        raise AssertionError("cone differential does not square to zero")
    for observer in cone_observers:
        observer(X, Y, result)
    return result


# ---------------------------------------------------------------------------
# Hom complexes


@dataclass(frozen=True)
class HomComplexResult:
    """Chain-level and cohomology data of a Hom complex.

    ``chain_dims`` are the vector-space dimensions before reduction;
    ``cohomology`` the cohomology dimensions (zeros omitted);
    ``representatives[m]`` holds component dictionaries, one per chosen
    cocycle representing a basis of the degree-m cohomology.
    """

    source: TwistedComplex
    target: TwistedComplex
    chain_dims: dict
    cohomology: dict
    representatives: dict

    @property
    def total_dim(self) -> int:
        return sum(self.cohomology.values())

    def rep_chain_maps(self, m: int) -> list[ChainMap]:
        return [ChainMap(self.source, self.target, m, comps)
                for comps in self.representatives.get(m, [])]


def _hom_chain_basis(X: TwistedComplex, Y: TwistedComplex):
    """Basis of the Hom chain spaces, grouped by total degree."""
    A = X.algebra
    basis: dict[int, list[tuple[int, int, int]]] = {}
    for a, (va, sa) in enumerate(X.summands):
        for b, (vb, sb) in enumerate(Y.summands):
            for k in A.elements_from_to(A.vertices[va], A.vertices[vb]):
                m = A.basis[k].deg + sa - sb
                basis.setdefault(m, []).append((b, a, k))
    return basis


def _hom_differential_matrix(X, Y, basis, m: int) -> ExactMatrix:
    """Matrix of d: Hom^m -> Hom^{m+1} in the chain bases."""
    A = X.algebra
    f = A.field
    dom = basis.get(m, [])
    cod = basis.get(m + 1, [])
    cod_index = {t: i for i, t in enumerate(cod)}
    sign = f.sign(m)
    if f.is_prime_field:
        mat = np.zeros((len(cod), len(dom)), dtype=np.int64)
    else:
        mat = [[f.zero()] * len(dom) for _ in range(len(cod))]

    def put(row, col, val):
        if f.is_prime_field:
            mat[row, col] = (int(mat[row, col]) + int(val)) % f.characteristic
        else:
            mat[row][col] = f.add(mat[row][col], val)

    for col, (b, a, k) in enumerate(dom):
        el = {k: f.one()}
        # delta_Y . f lands at (b', a)
        for (bp, bsrc), dl in Y.diff.items():
            if bsrc != b:
                continue
            for kk, c in A.mul(dl, el).items():
                put(cod_index[(bp, a, kk)], col, c)
        # -(-1)^m f . delta_X lands at (b, a')
        for (adst, ap), dl in X.diff.items():
            if adst != a:
                continue
            for kk, c in A.mul(el, dl).items():
                put(cod_index[(b, ap, kk)], col, f.neg(f.mul(sign, c)))
    if f.is_prime_field:
        return ExactMatrix(f, mat)
    return ExactMatrix(f, mat, rows=len(cod), cols=len(dom))


def _vector_to_components(A, basis_m, vec) -> dict:
    comps: dict[tuple[int, int], Elem] = {}
    f = A.field
    for coeff, (b, a, k) in zip(vec, basis_m):
        c = f.coerce(coeff)
        if c == f.zero():
            continue
        entry = comps.setdefault((b, a), {})
        entry[k] = f.add(entry.get(k, f.zero()), c)
    return {k: {kk: c for kk, c in v.items() if c != f.zero()}
            for k, v in comps.items() if v}


def hom_complex(X: TwistedComplex, Y: TwistedComplex) -> HomComplexResult:
    """The Hom complex with cohomology dimensions and cocycle representatives.

    Chain spaces are spanned by algebra elements between summands, graded by
    element degree plus source shift minus target shift; the differential is
    the graded commutator with the two inner differentials.  Dimensions come
    from exact ranks; the representatives in each degree are kernel vectors
    completing the image of the previous differential to a basis of the
    cocycles, so they are closed and independent modulo coboundaries.
    """
    if X.algebra != Y.algebra:
        raise ValueError("Hom across different algebras")
    A = X.algebra
    f = A.field
    basis = _hom_chain_basis(X, Y)
    chain_dims = {m: len(v) for m, v in basis.items()}
    degrees = sorted(basis)
    matrices = {m: _hom_differential_matrix(X, Y, basis, m) for m in degrees}
    cohomology: dict[int, int] = {}
    representatives: dict[int, list[dict]] = {}
    for m in degrees:
        dim_m = chain_dims[m]
        d_m = matrices[m]
        r_m = rank(d_m)
        d_prev = matrices.get(m - 1)
        r_prev = rank(d_prev) if d_prev is not None else 0
        h = dim_m - r_m - r_prev
        if h < 0:
            raise AssertionError("negative cohomology dimension")
        if h == 0:
            continue
        cohomology[m] = h
        ker = kernel_basis(d_m) if d_m.rows else [
            [f.one() if i == j else f.zero() for i in range(dim_m)]
            for j in range(dim_m)
        ]
        image_cols: list[list] = []
        if d_prev is not None and d_prev.cols:
            piv = column_space_pivots(d_prev)
            for c in piv:
                image_cols.append([d_prev.entry(i, c) for i in range(d_prev.rows)])
        stacked_cols = image_cols + ker
        M = ExactMatrix(f, np.array(stacked_cols, dtype=np.int64).T) \
            if f.is_prime_field else \
            ExactMatrix(f, [[col[i] for col in stacked_cols] for i in range(dim_m)],
                        rows=dim_m, cols=len(stacked_cols))
        piv = column_space_pivots(M)
        reps = [ker[i - len(image_cols)] for i in piv if i >= len(image_cols)]
        if len(reps) != h:
            raise AssertionError("representative selection inconsistent with rank")
        representatives[m] = [_vector_to_components(A, basis[m], v) for v in reps]
    return HomComplexResult(X, Y, chain_dims, cohomology, representatives)


def hom_dims(X: TwistedComplex, Y: TwistedComplex) -> dict:
    return hom_complex(X, Y).cohomology


def dim_profile(X: TwistedComplex) -> dict:
    """Hom cohomology of every projective into X; the equality surrogate.

    Two complexes are treated as equal precisely when these graded
    dimension tables agree.
    """
    A = X.algebra
    return {v: hom_complex(projective(A, v), X).cohomology for v in A.vertices}


# ---------------------------------------------------------------------------
# minimal models


def _reducible_entry(X: TwistedComplex):
    """An entry of the differential carrying an invertible idempotent piece.

    Such an entry joins summands of the same vertex in adjacent shifts; the
    pair is a contractible direct factor and Gaussian elimination removes it.
    Entries mixing an idempotent with other degree-0 terms never occur over
    the catalog algebras (their degree-0 part is spanned by idempotents).
    """
    A = X.algebra
    for (b, a), el in X.diff.items():
        va, _ = X.summands[a]
        vb, _ = X.summands[b]
        if va != vb:
            continue
        idem = A.idempotent.get(A.vertices[va])
        if idem is None:
            continue
        c = el.get(idem)
        if c is not None and c != A.field.zero() and len(el) == 1:
            return (b, a, c)
    return None


def minimize(X: TwistedComplex) -> TwistedComplex:
    """Quasi-isomorphic reduction removing all invertible differential pieces.

    Repeated Gaussian elimination: for an invertible entry phi from summand
    a to summand b, both summands are dropped and every remaining entry
    gains the correction  -(out of a) . phi^{-1} . (into b).  Hom cohomology
    against any test object is unchanged; the result has no degree-zero
    invertible components left, and reducing again is a no-op.
    """
    A = X.algebra
    f = A.field
    summands = list(X.summands)
    diff = {k: dict(v) for k, v in X.diff.items()}
    while True:
        probe = TwistedComplex(A, summands, diff, _trusted=True)
        hit = _reducible_entry(probe)
        if hit is None:
            break
        b, a, c = hit
        inv = f.inv(c)
        out_of_a = {(y, x): el for (y, x), el in diff.items()
                    if x == a and (y, x) != (b, a)}
        into_b = {(y, x): el for (y, x), el in diff.items()
                  if y == b and (y, x) != (b, a)}
        new_diff: dict[tuple[int, int], Elem] = {}
        for (y, x), el in diff.items():
            if x in (a, b) or y in (a, b):
                continue
            new_diff[(y, x)] = el
        for (y, _a), el_out in out_of_a.items():
            if y in (a, b):
                continue
            for (_b, x), el_in in into_b.items():
                if x in (a, b):
                    continue
                corr = A.scale(f.neg(inv), A.mul(el_out, el_in))
                if corr:
                    new_diff[(y, x)] = A.add(new_diff.get((y, x), {}), corr)
        keep = [i for i in range(len(summands)) if i not in (a, b)]
        renum = {old: new for new, old in enumerate(keep)}
        summands = [summands[i] for i in keep]
        diff = {(renum[y], renum[x]): el for (y, x), el in new_diff.items()
                if el and renum.get(y) is not None and renum.get(x) is not None}
        diff = {k: v for k, v in diff.items() if v}
    return TwistedComplex(A, summands, diff)


# ---------------------------------------------------------------------------
# random complexes (for the oracle suites)


def random_complex(A: GradedAlgebra, rng, steps: int = 3,
                   shift_range: tuple[int, int] = (-2, 2)) -> TwistedComplex:
    """A random small twisted complex built by iterated cones.

    Starting from a random shifted projective, repeatedly picks a random
    closed degree-0 map from another shifted projective and cones it; the
    result is a valid twisted complex by construction and exercises the
    same code paths as the twist functors.
    """
    v = rng.choice(A.vertices)
    X = projective(A, v, rng.randint(*shift_range))
    f = A.field
    for _ in range(steps):
        w = rng.choice(A.vertices)
        s = rng.randint(*shift_range)
        P = projective(A, w, s)
        H = hom_complex(P, X)
        reps = H.representatives.get(0, [])
        if reps and rng.random() < 0.8:
            weights = [f.coerce(rng.randint(1, 5)) for _ in reps]
            comps: dict = {}
            for wgt, rep in zip(weights, reps):
                for key, el in rep.items():
                    comps[key] = A.add(comps.get(key, {}), A.scale(wgt, el))
            comps = {k: v for k, v in comps.items() if v}
            X = cone(ChainMap(P, X, 0, comps))
        else:
            X = direct_sum(X, P)
    return X

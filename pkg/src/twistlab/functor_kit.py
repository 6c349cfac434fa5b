"""Chain-level endofunctors: shifts, spherical twists, P-twists, iteration.

The twist along a (co)homologically spherical object E sends F to the cone
of the evaluation map Hom*(E,F) (x) E -> F, built here from the chosen
cocycle representatives of the Hom cohomology: a representative f of degree
m is a closed degree-0 map E[-m] -> F, so the tensor factor is an explicit
direct sum of shifted copies of E.  The P-twist is the double cone: first
cone the map (h* (x) id - id (x) h) between two tensor blocks, where h is
the degree-2 endomorphism generator, then cone the evaluation out of that.

Because h*(f) = f.h only agrees with its chosen representative combination
up to a coboundary on a general complex F, the evaluation out of the inner
cone needs a chain-level corrector on the shifted block: for each
representative f we solve d(u_f) = f.h - sum_g c_g g and feed -u_f into the
evaluation.  The assembled map is verified closed before coning, so a wrong
sign anywhere refuses to build rather than silently corrupting dimensions.

Outputs are minimal models by default; all contracts downstream are stated
at the level of Hom-dimension profiles, matching the fact that twists are
only well defined up to quasi-isomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .algebra_core import GradedAlgebra
from .exactlin import ExactMatrix, solve
from . import perfcx
from .perfcx import (
    ChainMap,
    TwistedComplex,
    cone,
    dim_profile,
    direct_sum_many,
    hom_complex,
    minimize,
    projective,
    shift,
)

import numpy as np


class NotSpherical(ValueError):
    pass


class NotPObject(ValueError):
    pass


def spherical_shape_d(end_dims: dict) -> int | None:
    """The d with end cohomology {0: 1, d: 1}, or None if not of that shape."""
    if sorted(end_dims.values()) != [1, 1] or end_dims.get(0) != 1:
        return None
    other = [m for m in end_dims if m != 0]
    return other[0] if other else None


def p_object_shape_d(end_dims: dict) -> int | None:
    """The d with end cohomology {0,2,...,2d: one line each}, or None."""
    if not end_dims or any(v != 1 for v in end_dims.values()):
        return None
    degs = sorted(end_dims)
    d = (degs[-1]) // 2 if degs[-1] % 2 == 0 else None
    if d is None or degs != [2 * i for i in range(d + 1)] or d < 1:
        return None
    return d


@dataclass(frozen=True)
class ModelSphericalFunctor:
    """The tensor-with-E functor out of a one-vertex model source.

    For a d-spherical E the source is the derived category of the ground
    field and the cotwist is the shift [-1-d]; for a P^d-object the source
    is the derived category of the degree-2 polynomial algebra and the
    cotwist is [-2-2d].  ``source_end_dims`` records the graded self-Hom
    dimensions of the source split-generator (one line in degree 0 for the
    field; the Koszul-dual pair of lines in degrees -1 and 0 for the
    polynomial source), which is all the split-generator criterion needs.
    """

    E: TwistedComplex
    kind: str  # "spherical" | "p-object"
    d: int

    def __post_init__(self):
        if self.kind not in ("spherical", "p-object"):
            raise ValueError(f"unknown model functor kind {self.kind!r}")

    @property
    def cotwist_shift(self) -> int:
        return -1 - self.d if self.kind == "spherical" else -2 - 2 * self.d

    @property
    def source_end_dims(self) -> dict:
        return {0: 1} if self.kind == "spherical" else {-1: 1, 0: 1}

    def twist(self, F: TwistedComplex, *, check: bool = True,
              reduce: bool = True) -> TwistedComplex:
        if self.kind == "spherical":
            return spherical_twist(self.E, F, check=check, reduce=reduce)
        return p_twist(self.E, F, check=check, reduce=reduce)


def _tensor_with_reps(E: TwistedComplex, H) -> tuple[TwistedComplex, list[tuple[int, dict]]]:
    """The complex  (+)_{m, f} E[-m]  over the chosen representatives.

    Returns it together with the flat list of (degree, components) in
    summand-block order; an empty representative list yields the zero
    complex.
    """
    blocks = []
    flat: list[tuple[int, dict]] = []
    for m in sorted(H.representatives):
        for rep in H.representatives[m]:
            blocks.append(shift(E, -m))
            flat.append((m, rep))
    if not blocks:
        return perfcx.zero_complex(E.algebra), []
    return direct_sum_many(blocks), flat


def _evaluation_map(E: TwistedComplex, F: TwistedComplex, H) -> ChainMap:
    src, flat = _tensor_with_reps(E, H)
    comps: dict = {}
    block = E.n_summands
    for copy, (m, rep) in enumerate(flat):
        for (b, a), el in rep.items():
            comps[(b, copy * block + a)] = dict(el)
    return ChainMap(src, F, 0, comps)


def spherical_twist(E: TwistedComplex, F: TwistedComplex, *, check: bool = True,
                    reduce: bool = True) -> TwistedComplex:
    """Twist of F along the spherical object E: cone of evaluation.

    With the precondition check on, E must have two-line endomorphism
    cohomology {0: 1, d: 1}.  When Hom*(E,F) vanishes the twist fixes F.
    """
    if check:
        end = hom_complex(E, E).cohomology
        if spherical_shape_d(end) is None:
            raise NotSpherical(
                f"endomorphism cohomology {end} is not one line in degree 0 "
                f"plus one line in a single degree d")
    H = hom_complex(E, F)
    ev = _evaluation_map(E, F, H)
    out = cone(ev)
    return minimize(out) if reduce else out


def _express_in_representatives(E, F, H, m: int, target_components: dict):
    """Write a degree-m cocycle as sum of representatives plus a coboundary.

    Returns (coefficients over representatives[m], corrector u of degree
    m-1 with d(u) = cocycle - sum c_g g).  Exact linear solve over the
    coefficient field.
    """
    A = E.algebra
    f = A.field
    basis = perfcx._hom_chain_basis(E, F)
    basis_m = basis.get(m, [])
    index = {t: i for i, t in enumerate(basis_m)}
    vec = [f.zero()] * len(basis_m)
    for (b, a), el in target_components.items():
        for k, c in el.items():
            vec[index[(b, a, k)]] = f.add(vec[index[(b, a, k)]], c)
    reps = H.representatives.get(m, [])
    rep_cols = []
    for rep in reps:
        col = [f.zero()] * len(basis_m)
        for (b, a), el in rep.items():
            for k, c in el.items():
                col[index[(b, a, k)]] = c
        rep_cols.append(col)
    dmat = perfcx._hom_differential_matrix(E, F, basis, m - 1)
    ncols = len(rep_cols) + dmat.cols
    if f.is_prime_field:
        stack = np.zeros((len(basis_m), ncols), dtype=np.int64)
        for j, col in enumerate(rep_cols):
            stack[:, j] = col
        if dmat.cols:
            stack[:, len(rep_cols):] = dmat.array()
        system = ExactMatrix(f, stack)
    else:
        rows = []
        for i in range(len(basis_m)):
            row = [col[i] for col in rep_cols]
            row += [dmat.entry(i, j) for j in range(dmat.cols)]
            rows.append(row)
        system = ExactMatrix(f, rows, rows=len(basis_m), cols=ncols)
    sol = solve(system, vec)
    if sol is None:
        raise AssertionError("closed element not expressible: representatives "
                             "do not span the cohomology")
    coeffs = sol[:len(rep_cols)]
    u_vec = sol[len(rep_cols):]
    u_comps = perfcx._vector_to_components(A, basis.get(m - 1, []), u_vec)
    return coeffs, u_comps


def p_twist(E: TwistedComplex, F: TwistedComplex, *, check: bool = True,
            reduce: bool = True) -> TwistedComplex:
    """P-twist of F along the P-object E: the double cone construction.

    Inner cone: (h* (x) id - id (x) h) from Hom*(E,F) (x) E[-2] to
    Hom*(E,F) (x) E, with h the chosen degree-2 endomorphism representative;
    outer cone: evaluation, corrected on the shifted block so it closes at
    chain level.  When Hom*(E,F) vanishes both cones degenerate to F.
    """
    A = E.algebra
    f = A.field
    end = hom_complex(E, E)
    d = p_object_shape_d(end.cohomology)
    if check and d is None:
        raise NotPObject(
            f"endomorphism cohomology {end.cohomology} is not one line in "
            f"each even degree 0..2d")
    h_reps = end.representatives.get(2, [])
    if not h_reps:
        raise NotPObject("no degree-2 endomorphism representative available")
    h = h_reps[0]

    H = hom_complex(E, F)
    Y, flat = _tensor_with_reps(E, H)
    if not flat:
        return minimize(F) if reduce else F
    X = shift(Y, 0)  # placeholder; real X built below with extra shift
    blocks_X = []
    for m, _rep in flat:
        blocks_X.append(shift(E, -m - 2))
    X = direct_sum_many(blocks_X)
    block = E.n_summands

    rep_index: dict[tuple[int, int], int] = {}
    counter: dict[int, int] = {}
    for copy, (m, _rep) in enumerate(flat):
        k = counter.get(m, 0)
        rep_index[(m, k)] = copy
        counter[m] = k + 1

    phi: dict = {}
    correctors: list[dict] = []
    coeff_table: list[list] = []
    for copy, (m, rep) in enumerate(flat):
        # id (x) h, with the minus sign of the formula
        for (b, a), el in h.items():
            key = (copy * block + b, copy * block + a)
            phi[key] = A.add(phi.get(key, {}), A.neg(el))
        # h* (x) id: express rep.h over the degree-(m+2) representatives
        rep_h = perfcx._compose(A, rep, h)
        coeffs, u = _express_in_representatives(E, F, H, m + 2, rep_h)
        coeff_table.append(coeffs)
        correctors.append(u)
        for g_pos, c in enumerate(coeffs):
            if c == f.zero():
                continue
            tgt_copy = rep_index[(m + 2, g_pos)]
            for s, (v, _sh) in enumerate(E.summands):
                idem = A.idempotent[A.vertices[v]]
                key = (tgt_copy * block + s, copy * block + s)
                phi[key] = A.add(phi.get(key, {}), {idem: c})
    phi = {k: v for k, v in phi.items() if v}
    inner = cone(ChainMap(X, Y, 0, phi))

    # evaluation out of the inner cone: representatives on the Y block,
    # minus the correctors on the shifted X block
    comps: dict = {}
    for copy, (m, rep) in enumerate(flat):
        for (b, a), el in rep.items():
            comps[(b, copy * block + a)] = dict(el)
    offset = Y.n_summands
    for copy, u in enumerate(correctors):
        for (b, a), el in u.items():
            key = (b, offset + copy * block + a)
            comps[key] = A.add(comps.get(key, {}), A.neg(el))
    comps = {k: v for k, v in comps.items() if v}
    ev = ChainMap(inner, F, 0, comps)
    out = cone(ev)
    return minimize(out) if reduce else out


# ---------------------------------------------------------------------------
# endofunctor words and iteration

Atom = tuple  # ("shift", n) | ("stwist", E) | ("ptwist", E)


def normalize_word(word: Sequence[Atom]) -> tuple[Atom, ...]:
    out = []
    for atom in word:
        kind = atom[0]
        if kind not in ("shift", "stwist", "ptwist"):
            raise ValueError(f"unknown endofunctor generator {kind!r}")
        out.append((kind, atom[1]))
    return tuple(out)


def word_algebra(word: Sequence[Atom]) -> GradedAlgebra | None:
    for kind, arg in word:
        if kind in ("stwist", "ptwist"):
            return arg.algebra
    return None


def apply_word(word: Sequence[Atom], X: TwistedComplex, *, check: bool = True,
               reduce: bool = True) -> TwistedComplex:
    """Apply a composable word of generators, rightmost generator first."""
    for kind, arg in reversed(normalize_word(word)):
        if kind == "shift":
            X = shift(X, int(arg))
        elif kind == "stwist":
            X = spherical_twist(arg, X, check=check, reduce=reduce)
        else:
            X = p_twist(arg, X, check=check, reduce=reduce)
    return X


@dataclass(frozen=True)
class IterationStep:
    n: int
    obj: TwistedComplex
    dims: dict


@dataclass(frozen=True)
class IterationResult:
    steps: tuple[IterationStep, ...]
    complete: bool

    def dims_list(self) -> list[tuple[int, dict]]:
        return [(s.n, s.dims) for s in self.steps]


def iterate(word: Sequence[Atom], G: TwistedComplex, n_max: int,
            *, against: TwistedComplex | None = None,
            check: bool = True) -> IterationResult:
    """The orbit G, Phi G, ..., Phi^n G with per-step minimal models.

    Records the graded Hom dimensions of Hom(against, Phi^n G) for every
    step (default: against G itself).  Stops cleanly at the summand cap and
    flags the result incomplete; the partial steps remain valid.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    word = normalize_word(word)
    probe = against if against is not None else G
    steps: list[IterationStep] = []
    X = G
    complete = True
    for n in range(1, n_max + 1):
        try:
            X = apply_word(word, X, check=check and n == 1)
        except perfcx.CapExceeded:
            complete = False
            break
        dims = hom_complex(probe, X).cohomology
        steps.append(IterationStep(n, X, dims))
        if X.n_summands > perfcx.summand_cap():
            complete = False
            break
    return IterationResult(tuple(steps), complete)


def is_dim_fixed_point(word: Sequence[Atom], F: TwistedComplex) -> bool:
    """True iff F and its image have identical Hom profiles against every
    projective of the ambient algebra."""
    return dim_profile(F) == dim_profile(apply_word(word, F))


def ker_SR_witness(S: ModelSphericalFunctor,
                   candidates: Iterable[TwistedComplex]) -> Optional[TwistedComplex]:
    """First candidate annihilated by Hom*(E, -), if any.

    For the tensor-with-E model the composite of the functor with its
    adjoint sends F to Hom*(E,F) (x) E, so killing the Hom cohomology is
    exactly membership in the kernel.
    """
    for F in candidates:
        if not hom_complex(S.E, F).cohomology:
            return F
    return None

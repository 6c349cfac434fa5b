"""Exact linear algebra over the rationals and prime fields.

Every rank, kernel and solve in the engine routes through here, so the
arithmetic is exact by construction: prime-field matrices are int64 arrays
reduced mod p (eliminated by the :mod:`twistlab._modp` kernels), rational
matrices hold :class:`fractions.Fraction` entries and are eliminated in pure
Python with arbitrary-precision integers.  No floating point anywhere.

The default working field is F_32003: large enough that characteristic
accidents are vanishingly unlikely on the matrices this engine produces,
small enough that products fit comfortably in int64.  Rational mode exists
for cross-checks; :func:`crosscheck_rank` compares the two and logs any
disagreement (rank over Q of an integer matrix can only exceed the rank of
its mod-p reduction).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _modp

logger = logging.getLogger(__name__)

#: matrices with nonzero density below this fraction take the zero-pruning
#: fast path before dense elimination
SPARSE_DENSITY_THRESHOLD = 0.2


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class ScalarField:
    """The coefficient field: rationals (characteristic 0) or F_p, p an odd prime."""

    characteristic: int = 32003

    def __post_init__(self):
        p = self.characteristic
        if p == 0:
            return
        if p == 2 or not _is_prime(p):
            raise ValueError(f"characteristic must be 0 or an odd prime, got {p}")
        if p >= 2**31:
            raise ValueError("prime too large for int64 products")

    @property
    def kind(self) -> str:
        return "rationals" if self.characteristic == 0 else "prime-field"

    @property
    def is_prime_field(self) -> bool:
        return self.characteristic != 0

    # scalar arithmetic ----------------------------------------------------

    def coerce(self, x):
        if self.characteristic == 0:
            return x if isinstance(x, Fraction) else Fraction(x)
        return int(x) % self.characteristic

    def zero(self):
        return Fraction(0) if self.characteristic == 0 else 0

    def one(self):
        return Fraction(1) if self.characteristic == 0 else 1

    def add(self, a, b):
        if self.characteristic == 0:
            return a + b
        return (a + b) % self.characteristic

    def sub(self, a, b):
        if self.characteristic == 0:
            return a - b
        return (a - b) % self.characteristic

    def mul(self, a, b):
        if self.characteristic == 0:
            return a * b
        return (a * b) % self.characteristic

    def neg(self, a):
        if self.characteristic == 0:
            return -a
        return (-a) % self.characteristic

    def inv(self, a):
        if self.characteristic == 0:
            if a == 0:
                raise ZeroDivisionError("inverse of zero")
            return Fraction(1) / a
        a = int(a) % self.characteristic
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.characteristic - 2, self.characteristic)

    def sign(self, n: int):
        """(-1)**n as a field scalar."""
        return self.one() if n % 2 == 0 else self.neg(self.one())


QQ = ScalarField(0)
DEFAULT_PRIME_FIELD = ScalarField(32003)


class ExactMatrix:
    """A dense matrix with entries in a ScalarField.

    Immutable once built.  Prime-field data is a read-only int64 array with
    entries in [0, p); rational data is a tuple of tuples of Fractions.
    """

    __slots__ = ("field", "rows", "cols", "_data")

    def __init__(self, field: ScalarField, data, *, rows: int | None = None, cols: int | None = None):
        self.field = field
        if field.is_prime_field:
            arr = np.asarray(data, dtype=np.int64)
            if arr.ndim == 1:
                arr = arr.reshape((rows or 0, cols or 0)) if arr.size == 0 else arr.reshape(1, -1)
            if arr.size == 0:
                arr = arr.reshape((rows if rows is not None else arr.shape[0] if arr.ndim == 2 else 0,
                                   cols if cols is not None else 0))
            arr = arr % field.characteristic
            arr.setflags(write=False)
            self._data = arr
            self.rows, self.cols = arr.shape
        else:
            tup = tuple(tuple(field.coerce(x) for x in row) for row in data)
            self._data = tup
            self.rows = len(tup) if rows is None else rows
            self.cols = len(tup[0]) if tup else (cols if cols is not None else 0)
            if tup and any(len(r) != self.cols for r in tup):
                raise ValueError("ragged rows")

    # construction ---------------------------------------------------------

    @classmethod
    def from_rows(cls, field: ScalarField, rows: Iterable[Iterable]) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(field, rows, rows=len(rows), cols=ncols)

    @classmethod
    def zeros(cls, field: ScalarField, rows: int, cols: int) -> "ExactMatrix":
        if field.is_prime_field:
            return cls(field, np.zeros((rows, cols), dtype=np.int64))
        return cls(field, [[Fraction(0)] * cols for _ in range(rows)], rows=rows, cols=cols)

    @classmethod
    def identity(cls, field: ScalarField, n: int) -> "ExactMatrix":
        if field.is_prime_field:
            return cls(field, np.eye(n, dtype=np.int64))
        return cls(field, [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)],
                   rows=n, cols=n)

    # access ---------------------------------------------------------------

    def entry(self, i: int, j: int):
        if self.field.is_prime_field:
            return int(self._data[i, j])
        return self._data[i][j]

    def row(self, i: int) -> list:
        if self.field.is_prime_field:
            return [int(x) for x in self._data[i]]
        return list(self._data[i])

    def to_lists(self) -> list[list]:
        return [self.row(i) for i in range(self.rows)]

    def array(self) -> np.ndarray:
        if not self.field.is_prime_field:
            raise TypeError("array view only for prime-field matrices")
        return self._data

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix) or self.field != other.field:
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        if self.field.is_prime_field:
            return bool(np.array_equal(self._data, other._data))
        return self._data == other._data

    def __hash__(self):
        return hash((self.field, self.rows, self.cols))

    def __repr__(self):
        return f"ExactMatrix({self.field.kind}, {self.rows}x{self.cols})"


def matmul(A: ExactMatrix, B: ExactMatrix) -> ExactMatrix:
    if A.field != B.field or A.cols != B.rows:
        raise ValueError("shape or field mismatch")
    f = A.field
    if f.is_prime_field:
        # int64 products of reduced entries can overflow for large p only if
        # the inner dimension is huge; use object dtype beyond a safe bound
        prod = (A._data.astype(object) @ B._data.astype(object)) % f.characteristic
        return ExactMatrix(f, prod.astype(np.int64))
    rows = []
    for i in range(A.rows):
        row = []
        for j in range(B.cols):
            s = Fraction(0)
            for k in range(A.cols):
                s += A._data[i][k] * B._data[k][j]
            row.append(s)
        rows.append(row)
    return ExactMatrix(f, rows, rows=A.rows, cols=B.cols)


# ---------------------------------------------------------------------------
# rational elimination (pure Python, arbitrary precision)


def _rref_fraction(rows: list[list[Fraction]], npiv_cols: int) -> tuple[list[list[Fraction]], list[int]]:
    R = [list(r) for r in rows]
    m = len(R)
    n = len(R[0]) if m else 0
    piv: list[int] = []
    r = 0
    for c in range(min(npiv_cols, n)):
        if r == m:
            break
        sel = next((i for i in range(r, m) if R[i][c] != 0), None)
        if sel is None:
            continue
        if sel != r:
            R[r], R[sel] = R[sel], R[r]
        inv = Fraction(1) / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        piv.append(c)
        r += 1
    return R, piv


def _prune_zero_lines(arr: np.ndarray) -> np.ndarray:
    """Drop all-zero rows and columns; the exact rank is unchanged."""
    keep_r = np.nonzero(arr.any(axis=1))[0]
    keep_c = np.nonzero(arr.any(axis=0))[0]
    return arr[np.ix_(keep_r, keep_c)]


def _rref(M: ExactMatrix, npiv_cols: int | None = None):
    """Field-dispatched RREF; returns (rows-as-lists or array, pivot list)."""
    if npiv_cols is None:
        npiv_cols = M.cols
    if M.field.is_prime_field:
        R, piv = _modp.rref_mod_p(M._data, M.field.characteristic, npiv_cols)
        return R, [int(c) for c in piv]
    R, piv = _rref_fraction([list(r) for r in M._data], npiv_cols)
    return R, piv


# ---------------------------------------------------------------------------
# public operations


def rank(M: ExactMatrix) -> int:
    """Exact rank of M."""
    if M.rows == 0 or M.cols == 0:
        return 0
    if M.field.is_prime_field:
        arr = M._data
        nnz = int(np.count_nonzero(arr))
        if nnz == 0:
            return 0
        if nnz < SPARSE_DENSITY_THRESHOLD * arr.size:
            arr = _prune_zero_lines(arr)
        return _modp.rank_mod_p(arr, M.field.characteristic)
    _, piv = _rref(M)
    return len(piv)


def kernel_basis(M: ExactMatrix) -> list[list]:
    """A basis of the right kernel, as column vectors (lists of scalars).

    The basis has cols(M) - rank(M) vectors; each is annihilated by M.
    """
    f = M.field
    n = M.cols
    if n == 0:
        return []
    if M.rows == 0:
        basis = []
        for j in range(n):
            v = [f.zero()] * n
            v[j] = f.one()
            basis.append(v)
        return basis
    R, piv = _rref(M)
    pivset = set(piv)
    free = [j for j in range(n) if j not in pivset]
    basis = []
    for fc in free:
        v = [f.zero()] * n
        v[fc] = f.one()
        for r, pc in enumerate(piv):
            entry = int(R[r, fc]) if f.is_prime_field else R[r][fc]
            v[pc] = f.neg(f.coerce(entry))
        basis.append(v)
    return basis


@dataclass(frozen=True)
class RowOp:
    """An elementary row operation: kind in {'swap','scale','addmul'}.

    swap(i, j); scale(i, c): row_i *= c; addmul(i, j, c): row_i += c*row_j.
    """

    kind: str
    i: int
    j: int = -1
    c: object = None


@dataclass(frozen=True)
class GaussReduction:
    pivots: tuple[int, ...]
    reduced: ExactMatrix
    record: tuple[RowOp, ...]


def gauss_reduce(M: ExactMatrix) -> GaussReduction:
    """Reduced row echelon form together with the elementary-operation record.

    The record, replayed on an identity matrix (see :func:`ops_matrix`),
    composes to an invertible change of basis T with T*M equal to the
    reduced form.  Runs in pure Python on either field; the unrecorded hot
    paths (:func:`rank`, :func:`kernel_basis`) use the backend kernels.
    """
    f = M.field
    R = [[f.coerce(x) for x in M.row(i)] for i in range(M.rows)]
    m, n = M.rows, M.cols
    ops: list[RowOp] = []
    piv: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        sel = next((i for i in range(r, m) if R[i][c] != f.zero()), None)
        if sel is None:
            continue
        if sel != r:
            R[r], R[sel] = R[sel], R[r]
            ops.append(RowOp("swap", r, sel))
        if R[r][c] != f.one():
            inv = f.inv(R[r][c])
            R[r] = [f.mul(inv, x) for x in R[r]]
            ops.append(RowOp("scale", r, c=inv))
        for i in range(m):
            if i != r and R[i][c] != f.zero():
                coef = f.neg(R[i][c])
                R[i] = [f.add(x, f.mul(coef, y)) for x, y in zip(R[i], R[r])]
                ops.append(RowOp("addmul", i, r, coef))
        piv.append(c)
        r += 1
    reduced = ExactMatrix.from_rows(f, R) if R else ExactMatrix.zeros(f, 0, n)
    return GaussReduction(tuple(piv), reduced, tuple(ops))


def ops_matrix(record: Sequence[RowOp], m: int, field: ScalarField) -> ExactMatrix:
    """Realize an operation record as the invertible matrix it composes to."""
    T = [[field.one() if i == j else field.zero() for j in range(m)] for i in range(m)]
    for op in record:
        if op.kind == "swap":
            T[op.i], T[op.j] = T[op.j], T[op.i]
        elif op.kind == "scale":
            T[op.i] = [field.mul(op.c, x) for x in T[op.i]]
        elif op.kind == "addmul":
            T[op.i] = [field.add(x, field.mul(op.c, y)) for x, y in zip(T[op.i], T[op.j])]
        else:
            raise ValueError(f"unknown op {op.kind}")
    return ExactMatrix.from_rows(field, T) if m else ExactMatrix.zeros(field, 0, 0)


def column_space_pivots(M: ExactMatrix) -> tuple[int, ...]:
    """Indices of a maximal independent subset of columns (RREF pivots)."""
    if M.rows == 0 or M.cols == 0:
        return ()
    _, piv = _rref(M)
    return tuple(piv)


def solve(M: ExactMatrix, rhs: Sequence) -> list | None:
    """One exact solution x of M x = rhs, or None if inconsistent."""
    f = M.field
    if len(rhs) != M.rows:
        raise ValueError("rhs length mismatch")
    if M.rows == 0:
        return [f.zero()] * M.cols
    if f.is_prime_field:
        aug = np.concatenate(
            [M._data, (np.asarray([int(x) for x in rhs], dtype=np.int64) % f.characteristic)[:, None]],
            axis=1,
        )
    else:
        aug = [list(M._data[i]) + [f.coerce(rhs[i])] for i in range(M.rows)]
    A = ExactMatrix(f, aug)
    R, piv = _rref(A, npiv_cols=M.cols)
    x = [f.zero()] * M.cols
    for r, pc in enumerate(piv):
        val = int(R[r, M.cols]) if f.is_prime_field else R[r][M.cols]
        x[pc] = f.coerce(val)
    # consistency: rows with zero pivot block must have zero rhs
    nrows = R.shape[0] if f.is_prime_field else len(R)
    for r in range(len(piv), nrows):
        val = int(R[r, M.cols]) if f.is_prime_field else R[r][M.cols]
        if f.coerce(val) != f.zero():
            return None
    return x


@dataclass(frozen=True)
class RankCrosscheck:
    rank_prime: int
    rank_rational: int

    @property
    def agree(self) -> bool:
        return self.rank_prime == self.rank_rational


def crosscheck_rank(int_rows: Sequence[Sequence[int]], p: int = 32003) -> RankCrosscheck:
    """Rank of an integer matrix over Q and over F_p; flags disagreement.

    rank over Q is always >= rank of the mod-p reduction; strict inequality
    means p divides a minor and the prime-field mode is lying for this
    matrix, which gets logged loudly.
    """
    rows = [list(r) for r in int_rows]
    rq = rank(ExactMatrix.from_rows(QQ, [[Fraction(x) for x in r] for r in rows])) if rows else 0
    rp = rank(ExactMatrix.from_rows(ScalarField(p), rows)) if rows else 0
    result = RankCrosscheck(rank_prime=rp, rank_rational=rq)
    if not result.agree:
        logger.warning(
            "rank disagreement: F_%d gives %d, Q gives %d", p, rp, rq
        )
    return result

"""Dense row reduction over a prime field F_p on int64 arrays.

This is the hot kernel of the whole engine: every Hom-complex cohomology
computation and every minimal-model reduction bottoms out in computing
reduced row echelon forms mod p, and iterated twists generate thousands of
them.  Two interchangeable implementations are provided:

* a numba ``@njit`` version (default when numba imports), and
* a pure-numpy fallback with vectorized row elimination.

The active backend is selected by the environment variable
``TWISTLAB_BACKEND`` (``auto`` | ``numba`` | ``numpy``) read at import time,
and can be switched at runtime with :func:`set_backend` (used by the
benchmark and the backend-parity tests).

Entries are int64 in ``[0, p)``.  All arithmetic stays exact provided
``p < 2**31`` so that products fit in int64; :mod:`twistlab.exactlin`
enforces this bound on field construction.
"""

from __future__ import annotations

import os

import numpy as np

_BACKEND_ENV = "TWISTLAB_BACKEND"


# ---------------------------------------------------------------------------
# pure-numpy backend


def _rref_numpy(a: np.ndarray, p: int, npiv_cols: int) -> tuple[np.ndarray, np.ndarray]:
    """Reduced row echelon form of ``a`` mod ``p``.

    Pivots are searched only in the first ``npiv_cols`` columns; row
    operations apply to the full width, so callers can append augmented
    columns (right-hand sides, identity blocks) that get carried along.

    Returns ``(R, pivot_cols)`` where ``pivot_cols`` lists the pivot column
    of each nonzero row of ``R`` (its length is the rank of ``a`` restricted
    to the pivot block).
    """
    R = np.array(a, dtype=np.int64, copy=True)
    m, n = R.shape
    piv: list[int] = []
    r = 0
    for c in range(npiv_cols):
        if r == m:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        inv = pow(int(R[r, c]), p - 2, p)
        R[r] = (R[r] * inv) % p
        col = R[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            R[rows] = (R[rows] - np.outer(col[rows], R[r])) % p
        piv.append(c)
        r += 1
    return R, np.asarray(piv, dtype=np.int64)


# ---------------------------------------------------------------------------
# numba backend

try:  # pragma: no cover - exercised via backend selection
    from numba import njit

    @njit(cache=True)
    def _pow_mod(a: np.int64, e: np.int64, p: np.int64) -> np.int64:
        result = np.int64(1)
        base = a % p
        while e > 0:
            if e & 1:
                result = (result * base) % p
            base = (base * base) % p
            e >>= 1
        return result

    @njit(cache=True)
    def _rref_numba_impl(a, p, npiv_cols):
        R = a.copy()
        m, n = R.shape
        piv = np.empty(min(m, npiv_cols) if m < npiv_cols else npiv_cols, dtype=np.int64)
        r = 0
        for c in range(npiv_cols):
            if r == m:
                break
            sel = -1
            for i in range(r, m):
                if R[i, c] != 0:
                    sel = i
                    break
            if sel < 0:
                continue
            if sel != r:
                for j in range(n):
                    tmp = R[r, j]
                    R[r, j] = R[sel, j]
                    R[sel, j] = tmp
            inv = _pow_mod(R[r, c], p - 2, p)
            for j in range(n):
                R[r, j] = (R[r, j] * inv) % p
            for i in range(m):
                if i != r and R[i, c] != 0:
                    f = R[i, c]
                    for j in range(n):
                        R[i, j] = (R[i, j] - f * R[r, j]) % p
            piv[r] = c
            r += 1
        return R, piv[:r]

    def _rref_numba(a: np.ndarray, p: int, npiv_cols: int) -> tuple[np.ndarray, np.ndarray]:
        a = np.ascontiguousarray(a, dtype=np.int64)
        if a.size == 0:
            return a.copy(), np.empty(0, dtype=np.int64)
        R, piv = _rref_numba_impl(a, np.int64(p), np.int64(npiv_cols))
        return R, piv

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


_IMPLS: dict[str, object] = {"numpy": _rref_numpy}
if _HAVE_NUMBA:
    _IMPLS["numba"] = _rref_numba


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_IMPLS))


def _resolve(choice: str) -> str:
    choice = choice.lower()
    if choice == "auto":
        return "numba" if "numba" in _IMPLS else "numpy"
    if choice not in _IMPLS:
        raise ValueError(
            f"unknown backend {choice!r}; available: {available_backends()}"
        )
    return choice


_active = _resolve(os.environ.get(_BACKEND_ENV, "auto"))


def active_backend() -> str:
    return _active


def set_backend(name: str) -> str:
    """Switch the elimination backend; returns the previous backend name."""
    global _active
    previous = _active
    _active = _resolve(name)
    return previous


def rref_mod_p(a: np.ndarray, p: int, npiv_cols: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Reduced row echelon form mod p via the active backend.

    ``a`` is not modified.  Empty matrices short-circuit.
    """
    a = np.asarray(a, dtype=np.int64)
    if a.ndim != 2:
        raise ValueError("expected a 2d array")
    if npiv_cols is None:
        npiv_cols = a.shape[1]
    if a.size == 0:
        return a.copy(), np.empty(0, dtype=np.int64)
    return _IMPLS[_active](a % p, p, npiv_cols)


def rank_mod_p(a: np.ndarray, p: int) -> int:
    _, piv = rref_mod_p(a, p)
    return int(piv.size)

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistlab import _modp
from twistlab.exactlin import (
    DEFAULT_PRIME_FIELD,
    QQ,
    ExactMatrix,
    GaussReduction,
    ScalarField,
    crosscheck_rank,
    gauss_reduce,
    kernel_basis,
    matmul,
    ops_matrix,
    rank,
    solve,
)

F = DEFAULT_PRIME_FIELD


def det_cofactor(rows):
    """Independent determinant oracle: plain cofactor expansion over Python ints."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * rows[0][j] * det_cofactor(minor)
    return total


def test_field_validation():
    assert ScalarField(0).kind == "rationals"
    assert ScalarField(32003).kind == "prime-field"
    with pytest.raises(ValueError):
        ScalarField(2)
    with pytest.raises(ValueError):
        ScalarField(15)


def test_rank_identity():
    assert rank(ExactMatrix.identity(F, 3)) == 3


def test_rank_zero():
    assert rank(ExactMatrix.zeros(F, 2, 5)) == 0


def test_rank_proportional_rows_over_q():
    M = ExactMatrix.from_rows(QQ, [[1, 2], [2, 4]])
    assert rank(M) == 1


def test_rank_random_invertible_det_oracle():
    # random 4x4 matrices over F_32003: rank 4 exactly when the cofactor
    # determinant is nonzero mod p
    rng = random.Random(7)
    for _ in range(25):
        rows = [[rng.randrange(32003) for _ in range(4)] for _ in range(4)]
        d = det_cofactor(rows) % 32003
        expected = 4 if d != 0 else 3  # rank < 4 iff det vanishes
        got = rank(ExactMatrix.from_rows(F, rows))
        if d != 0:
            assert got == 4
        else:
            assert got < 4


def test_kernel_identity_empty():
    assert kernel_basis(ExactMatrix.identity(F, 4)) == []


def test_kernel_zero_matrix():
    ker = kernel_basis(ExactMatrix.zeros(F, 2, 2))
    assert len(ker) == 2
    vs = np.array(ker)
    assert rank(ExactMatrix(F, vs)) == 2


def test_kernel_single_relation():
    ker = kernel_basis(ExactMatrix.from_rows(QQ, [[1, 1]]))
    assert len(ker) == 1
    v = ker[0]
    assert v[0] == -v[1] and v[0] != 0


def test_kernel_vectors_annihilated():
    rng = random.Random(3)
    for _ in range(20):
        m, n = rng.randrange(1, 6), rng.randrange(1, 6)
        rows = [[rng.randrange(-4, 5) for _ in range(n)] for _ in range(m)]
        M = ExactMatrix.from_rows(F, rows)
        ker = kernel_basis(M)
        assert rank(M) + len(ker) == n
        for v in ker:
            col = matmul(M, ExactMatrix.from_rows(F, [[x] for x in v]))
            assert all(col.entry(i, 0) == 0 for i in range(m))


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 5),
    st.integers(1, 5),
    st.randoms(use_true_random=False),
)
def test_rank_nullity_property(m, n, rnd):
    rows = [[rnd.randrange(-9, 10) for _ in range(n)] for _ in range(m)]
    M = ExactMatrix.from_rows(F, rows)
    assert rank(M) + len(kernel_basis(M)) == n
    Mq = ExactMatrix.from_rows(QQ, rows)
    assert rank(Mq) + len(kernel_basis(Mq)) == n


def test_rank_permutation_invariant():
    rng = random.Random(11)
    rows = [[rng.randrange(-5, 6) for _ in range(5)] for _ in range(4)]
    M = ExactMatrix.from_rows(F, rows)
    r0 = rank(M)
    perm = rows[::-1]
    assert rank(ExactMatrix.from_rows(F, perm)) == r0
    cols = [list(c) for c in zip(*rows)]
    random.Random(1).shuffle(cols)
    transposed_back = [list(r) for r in zip(*cols)]
    assert rank(ExactMatrix.from_rows(F, transposed_back)) == r0


def test_gauss_reduce_identity_empty_record():
    red = gauss_reduce(ExactMatrix.identity(F, 3))
    assert red.reduced == ExactMatrix.identity(F, 3)
    assert red.record == ()
    assert red.pivots == (0, 1, 2)


def test_gauss_reduce_swap_recorded():
    M = ExactMatrix.from_rows(F, [[0, 1], [1, 0]])
    red = gauss_reduce(M)
    assert red.reduced == ExactMatrix.identity(F, 2)
    assert any(op.kind == "swap" for op in red.record)


def test_gauss_reduce_transform_composes():
    rng = random.Random(5)
    for field in (F, QQ):
        rows = [[rng.randrange(-6, 7) for _ in range(4)] for _ in range(3)]
        M = ExactMatrix.from_rows(field, rows)
        red = gauss_reduce(M)
        T = ops_matrix(red.record, M.rows, field)
        assert matmul(T, M) == red.reduced
        assert rank(T) == M.rows  # invertible change of basis


def test_gauss_reduce_idempotent():
    rng = random.Random(9)
    rows = [[rng.randrange(-6, 7) for _ in range(5)] for _ in range(4)]
    red1 = gauss_reduce(ExactMatrix.from_rows(F, rows))
    red2 = gauss_reduce(red1.reduced)
    assert red2.reduced == red1.reduced
    assert red2.record == ()


def test_gauss_reduce_random_invertible_rank4():
    rng = random.Random(13)
    while True:
        rows = [[rng.randrange(32003) for _ in range(4)] for _ in range(4)]
        if det_cofactor(rows) % 32003 != 0:
            break
    red = gauss_reduce(ExactMatrix.from_rows(F, rows))
    assert len(red.pivots) == 4


def test_solve_consistent_and_inconsistent():
    M = ExactMatrix.from_rows(F, [[1, 2], [2, 4]])
    assert solve(M, [1, 2]) is not None
    assert solve(M, [1, 3]) is None
    x = solve(ExactMatrix.from_rows(QQ, [[2, 0], [0, 4]]), [1, 1])
    assert x == [Fraction(1, 2), Fraction(1, 4)]


def test_crosscheck_rank_agreement():
    rng = random.Random(21)
    for _ in range(30):
        rows = [[rng.randrange(-20, 21) for _ in range(4)] for _ in range(4)]
        res = crosscheck_rank(rows)
        assert res.agree


def test_crosscheck_rank_detects_characteristic_accident():
    # 32003 itself reduces to zero mod p: the two modes must disagree and flag
    res = crosscheck_rank([[32003]])
    assert res.rank_rational == 1
    assert res.rank_prime == 0
    assert not res.agree


def test_backend_parity():
    rng = np.random.default_rng(2)
    prev = _modp.active_backend()
    try:
        for _ in range(15):
            m, n = rng.integers(1, 8), rng.integers(1, 8)
            a = rng.integers(0, 32003, size=(m, n))
            results = {}
            for name in _modp.available_backends():
                _modp.set_backend(name)
                R, piv = _modp.rref_mod_p(a, 32003)
                results[name] = (R.tolist(), piv.tolist())
            vals = list(results.values())
            assert all(v == vals[0] for v in vals)
    finally:
        _modp.set_backend(prev)


def test_backend_env_selection(monkeypatch):
    assert "numpy" in _modp.available_backends()
    prev = _modp.set_backend("numpy")
    try:
        assert _modp.active_backend() == "numpy"
        with pytest.raises(ValueError):
            _modp.set_backend("fortran")
    finally:
        _modp.set_backend(prev)

import numpy as np
import pytest

from latdec.errors import DegenerateBasisError
from latdec.lattice import (
    dual_basis,
    hermite_bound,
    is_unimodular,
    lattice_determinant,
)
from latdec.matrix import pseudoinverse, qr_decompose


def random_unimodular(n, rng, steps=12, coeff=3):
    u = np.eye(n, dtype=np.int64)
    for _ in range(steps):
        i, j = rng.integers(0, n, size=2)
        if i != j:
            u[:, j] += int(rng.integers(-coeff, coeff + 1)) * u[:, i]
    return u


def test_determinant_examples():
    assert lattice_determinant(np.eye(5)) == pytest.approx(1.0)
    b = np.array([[2.0, 1.0], [0.0, 2.0]])  # columns (2,0) and (1,2)
    assert lattice_determinant(b) == pytest.approx(4.0)


def test_determinant_unimodular_invariance():
    rng = np.random.default_rng(11)
    for _ in range(30):
        n = int(rng.integers(2, 6))
        b = rng.standard_normal((n + 1, n))
        u = random_unimodular(n, rng)
        d1 = lattice_determinant(b)
        d2 = lattice_determinant(b @ u)
        assert d2 == pytest.approx(d1, rel=1e-9)


def test_determinant_rank_deficient():
    with pytest.raises(DegenerateBasisError):
        lattice_determinant(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_dual_examples():
    assert np.allclose(dual_basis(np.eye(2)), [[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(
        dual_basis(np.diag([2.0, 4.0])), [[0.0, 0.5], [0.25, 0.0]]
    )


def test_dual_r_diagonal_reciprocity():
    rng = np.random.default_rng(12)
    for _ in range(25):
        b = rng.integers(-10, 11, size=(4, 4)).astype(float)
        if abs(np.linalg.det(b)) < 0.5:
            continue
        _, r = qr_decompose(b)
        _, r_dual = qr_decompose(dual_basis(b))
        n = 4
        for i in range(n):
            prod = r[i, i] * r_dual[n - 1 - i, n - 1 - i]
            assert prod == pytest.approx(1.0, rel=1e-8)


def test_dual_involution_and_integrality():
    rng = np.random.default_rng(13)
    for _ in range(25):
        b = rng.integers(-8, 9, size=(4, 4)).astype(float)
        if abs(np.linalg.det(b)) < 0.5:
            continue
        dd = dual_basis(dual_basis(b))
        # exact coordinate round trip: dual of dual spans the same lattice
        coords = pseudoinverse(b) @ dd
        assert np.max(np.abs(coords - np.round(coords))) < 1e-8
        assert is_unimodular(np.round(coords).astype(np.int64))
        # primal-dual inner products are integers
        d = dual_basis(b)
        gram = d.T @ b
        assert np.max(np.abs(gram - np.round(gram))) < 1e-8


def test_determinant_reciprocity():
    rng = np.random.default_rng(14)
    for _ in range(25):
        n = int(rng.integers(2, 6))
        b = rng.standard_normal((n, n)) + 3 * np.eye(n)
        prod = lattice_determinant(b) * lattice_determinant(dual_basis(b))
        assert prod == pytest.approx(1.0, rel=1e-8)


def test_hermite_bound_values():
    assert hermite_bound(1).value == 1.0
    assert hermite_bound(2).value == 2.0
    assert hermite_bound(2, exact_low_dim=True).value == pytest.approx(
        2.0 / np.sqrt(3.0)
    )
    assert hermite_bound(100).value == 100.0
    with pytest.raises(ValueError):
        hermite_bound(0)


def test_hermite_exact_2d_matches_hexagonal_lattice():
    # the optimum in dimension 2 is achieved by the hexagonal lattice
    hexagonal = np.array([[1.0, 0.5], [0.0, np.sqrt(3.0) / 2.0]])
    f = 1.0 / lattice_determinant(hexagonal)  # lambda1 = 1
    assert hermite_bound(2, exact_low_dim=True).value == pytest.approx(f)


def test_hermite_bound_monotone():
    for exact in (False, True):
        vals = [hermite_bound(n, exact_low_dim=exact).value for n in range(1, 30)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        assert all(1.0 <= v <= n for n, v in enumerate(vals, start=1))


def test_is_unimodular():
    assert is_unimodular(np.eye(3, dtype=np.int64))
    assert is_unimodular(np.array([[1, 1], [0, 1]]))
    assert not is_unimodular(np.diag([2, 1]))
    with pytest.raises(ValueError):
        is_unimodular(np.ones((2, 3), dtype=np.int64))
    with pytest.raises(ValueError):
        is_unimodular(np.array([[0.5, 0.0], [0.0, 2.0]]))


def test_is_unimodular_exact_where_float_fails():
    k = 10**9
    m = np.array([[k + 1, k], [k, k - 1]], dtype=object)
    assert is_unimodular(m)  # determinant is exactly -1
    big = np.array(
        [[10**12, 10**12 - 1], [10**12 + 1, 10**12]], dtype=object
    )
    assert is_unimodular(big)

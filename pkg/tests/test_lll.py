import numpy as np
import pytest

from latdec.enumeration import shortest_vector
from latdec.exact import int_matmul
from latdec.lattice import dual_basis, is_unimodular
from latdec.lll import (
    LllParams,
    LllState,
    is_effectively_lll_reduced,
    is_lll_reduced,
    lll_reduce,
    reduction_quality,
    size_reduce_column,
)
from latdec.matrix import qr_decompose


def random_int_basis(rng, n, span=10):
    while True:
        b = rng.integers(-span, span + 1, size=(n, n))
        if abs(np.linalg.det(b.astype(float))) > 0.5:
            return b


def test_params_alpha():
    assert LllParams(0.75).alpha == 2.0
    assert LllParams(1.0).alpha == pytest.approx(4.0 / 3.0)
    with pytest.raises(ValueError):
        LllParams(0.25)
    with pytest.raises(ValueError):
        LllParams(1.1)


def test_identity_unchanged():
    res = lll_reduce(np.eye(4))
    assert np.allclose(res.reduced, np.eye(4))
    assert np.array_equal(res.u, np.eye(4, dtype=np.int64))
    assert res.swaps == 0


def test_skewed_z2_basis_reaches_unit_vector():
    # columns (4,3) and (7,5) span all of Z^2 (determinant -1)
    b = np.array([[4.0, 7.0], [3.0, 5.0]])
    res = lll_reduce(b, LllParams(0.75))
    assert np.linalg.norm(res.reduced[:, 0]) == pytest.approx(1.0)
    assert is_lll_reduced(res.reduced)


def test_lattice_preservation_exact():
    rng = np.random.default_rng(31)
    for _ in range(25):
        n = int(rng.integers(2, 9))
        b = random_int_basis(rng, n)
        res = lll_reduce(b.astype(float))
        assert is_unimodular(res.u)
        exact = np.array(int_matmul(b, res.u), dtype=np.int64)
        assert np.max(np.abs(res.reduced - exact)) < 1e-6


def test_reduction_counts_and_closure():
    rng = np.random.default_rng(32)
    for delta in (0.75, 0.99):
        params = LllParams(delta)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            b = random_int_basis(rng, n).astype(float)
            res = lll_reduce(b, params)
            assert is_lll_reduced(res.reduced, params)
            assert is_effectively_lll_reduced(res.reduced, params)
            assert res.swaps >= 0 and res.size_reductions >= 0


def test_is_lll_reduced_counterexamples():
    # huge off-diagonal entry violates the size condition
    assert not is_lll_reduced(np.array([[1.0, 100.0], [0.0, 1.0]]))
    # Lovasz violated: 0.75 * 1 > 0.01
    assert not is_lll_reduced(np.diag([1.0, 0.1]), LllParams(0.75))


def test_effectively_reduced_but_not_reduced():
    # size condition fails only at the (1,3) pair
    r = np.array([[1.0, 0.0, 0.9], [0.0, 1.0, 0.4], [0.0, 0.0, 1.0]])
    assert not is_lll_reduced(r)
    assert is_effectively_lll_reduced(r)


def test_dual_of_reduced_is_effectively_reduced():
    rng = np.random.default_rng(33)
    params = LllParams(0.75)
    for _ in range(25):
        n = int(rng.integers(2, 8))
        b = random_int_basis(rng, n).astype(float)
        res = lll_reduce(b, params)
        assert is_effectively_lll_reduced(dual_basis(res.reduced), params)


def test_projected_tail_is_reduced():
    rng = np.random.default_rng(34)
    params = LllParams(0.75)
    for _ in range(10):
        n = 6
        b = random_int_basis(rng, n).astype(float)
        res = lll_reduce(b, params)
        _, r = qr_decompose(res.reduced)
        for i in range(1, n - 1):
            assert is_lll_reduced(r[i:, i:], params)


def test_shortest_first_column_is_stable():
    rng = np.random.default_rng(35)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        b = random_int_basis(rng, n, span=6).astype(float)
        coords, lam = shortest_vector(b)
        v = b @ coords
        # place a shortest vector in front; it must stay in front
        cols = [v] + [b[:, j] for j in range(n)]
        for j in range(n, 0, -1):
            cand = np.column_stack(cols[:1] + cols[1:j] + cols[j + 1 :])
            if abs(np.linalg.det(cand)) > 0.5:
                res = lll_reduce(cand)
                assert np.linalg.norm(res.reduced[:, 0]) == pytest.approx(
                    lam, rel=1e-9
                )
                break


def test_size_reduce_column_hook_and_ratio():
    # ratio 2.4 rounds to 2, leaving 0.4
    b = np.array([[1.0, 2.4], [0.0, 1.0]])
    seen = []
    state = LllState(b, LllParams(0.75), collector=seen.append)
    size_reduce_column(state, 1)
    assert state.r[0, 1] == pytest.approx(0.4)
    assert len(seen) == 1
    assert np.array_equal(seen[0], [-2, 1])

    # already size-reduced column: no change, nothing emitted
    state2 = LllState(np.array([[1.0, 0.3], [0.0, 1.0]]), LllParams(0.75),
                      collector=seen.append)
    size_reduce_column(state2, 1)
    assert len(seen) == 1


def test_size_reduction_of_appended_column_is_sic():
    from latdec.babai import sic_decode
    from latdec.embedding import build_extended

    rng = np.random.default_rng(36)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        b = random_int_basis(rng, n).astype(float)
        red = lll_reduce(b).reduced
        y = 5.0 * rng.standard_normal(n)
        ext = build_extended(red, y, 0.5)
        state = LllState(ext.matrix, LllParams(0.75))
        size_reduce_column(state, n)
        sic = sic_decode(red, y).coords
        assert np.array_equal(state.u[:n, n], sic)
        assert state.u[n, n] == 1


def test_reduction_quality_corpus():
    rng = np.random.default_rng(37)
    params = LllParams(0.75)
    for _ in range(60):
        b = random_int_basis(rng, 8).astype(float)
        res = lll_reduce(b, params)
        _, lam = shortest_vector(b)
        report = reduction_quality(res, params, lam)
        assert report.ok, report.violations


def test_reduction_quality_flags_violations():
    params = LllParams(0.75)
    res = lll_reduce(np.eye(2), params)
    report = reduction_quality(res, params, lambda1=0.1)  # wrong minimum
    assert not report.ok
    assert "minimum-sandwich" in report.violations

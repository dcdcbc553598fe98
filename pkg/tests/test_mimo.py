import numpy as np
import pytest

from latdec.mimo import (
    ChannelInstance,
    apply_channel,
    bits_to_coords,
    coords_to_bits,
    draw_channel,
    lattice_matrix,
    mmse_gdfe,
    parse_generator_file,
    qam_constellation,
    realify,
    remap_to_constellation,
    stack_spacetime,
)


def test_realify_examples():
    assert np.array_equal(realify(np.array([[1.0]])), np.eye(2))
    assert np.array_equal(realify(np.array([[1j]])), [[0.0, -1.0], [1.0, 0.0]])


def test_realify_is_isometry():
    rng = np.random.default_rng(91)
    for _ in range(20):
        h = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
        x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        complex_norm = np.linalg.norm(h @ x)
        xr = np.concatenate([x.real, x.imag])
        real_norm = np.linalg.norm(realify(h) @ xr)
        assert real_norm == pytest.approx(complex_norm, abs=1e-12)


def test_qam_scale_and_alphabet():
    c = qam_constellation(4, 1)
    assert c.a == pytest.approx(np.sqrt(2.0))
    assert c.alphabet == (-1, 0)
    c16 = qam_constellation(16, 4)
    assert c16.alphabet == (-2, -1, 0, 1)
    assert c16.bits_per_dim == 2
    with pytest.raises(ValueError):
        qam_constellation(8, 1)
    with pytest.raises(ValueError):
        qam_constellation(2, 1)


def test_gray_roundtrip_and_adjacency():
    for m in (4, 16, 64):
        c = qam_constellation(m, 2)
        coords = np.array(c.alphabet)
        assert np.array_equal(bits_to_coords(c, coords_to_bits(c, coords)), coords)
        # adjacent alphabet points differ in exactly one bit
        for a, b in zip(c.alphabet, c.alphabet[1:]):
            ba = coords_to_bits(c, [a])
            bb = coords_to_bits(c, [b])
            assert int(np.sum(ba != bb)) == 1
    with pytest.raises(ValueError):
        coords_to_bits(qam_constellation(4, 1), [5])


def test_power_constraint():
    # average energy per channel use is 1 under the symbol shift a(x + 1/2)
    rng = np.random.default_rng(92)
    for m, n_t in ((4, 1), (16, 4), (64, 2)):
        c = qam_constellation(m, n_t)
        idx = rng.integers(0, len(c.alphabet), size=(100_000, 2 * n_t))
        sym = c.a * (np.array(c.alphabet)[idx] + 0.5)
        energy = np.mean(np.sum(sym * sym, axis=1))
        assert energy == pytest.approx(1.0, rel=0.01)


def test_apply_channel_noise_statistics():
    rng = np.random.default_rng(93)
    c = qam_constellation(4, 2)
    inst = draw_channel(2, 2, sigma2=0.5, rng=rng)
    draws = np.array(
        [apply_channel(inst, c, np.zeros(4, dtype=int), rng)[1] for _ in range(10_000)]
    )
    # 4e4 samples per run x 10k trials: per-component variance sigma2/2
    assert np.var(draws) == pytest.approx(0.25, rel=0.02)


def test_apply_channel_noiseless_and_validation():
    rng = np.random.default_rng(94)
    c = qam_constellation(16, 3)
    inst = draw_channel(3, 3, sigma2=0.0, rng=rng)
    x = np.array([1, -2, 0, 1, -1, 0])
    y, noise = apply_channel(inst, c, x, rng)
    assert np.allclose(y, lattice_matrix(inst, c) @ x)
    assert np.all(noise == 0)
    with pytest.raises(ValueError):
        apply_channel(inst, c, np.array([3, 0, 0, 0, 0, 0]), rng)


def test_channel_snr_bookkeeping():
    # empirical per-receive-antenna SNR matches 1/sigma2
    rng = np.random.default_rng(95)
    sigma2 = 0.2
    c = qam_constellation(16, 4)
    alphabet = np.array(c.alphabet)
    sig_energy = 0.0
    noise_energy = 0.0
    trials = 2000
    for _ in range(trials):
        inst = draw_channel(4, 4, sigma2, rng)
        x = alphabet[rng.integers(0, 4, size=8)]
        shifted = x + 0.5  # transmitted symbols carry the half-shift
        b = lattice_matrix(inst, c)
        sig = b @ shifted
        _, noise = apply_channel(inst, c, x, rng)
        sig_energy += float(sig @ sig) / 8.0
        noise_energy += float(noise @ noise) / 8.0
    snr = sig_energy / noise_energy
    assert snr == pytest.approx(1.0 / sigma2, rel=0.05)


def test_channel_shape_validation():
    with pytest.raises(ValueError):
        ChannelInstance(h=np.zeros((2, 3), dtype=complex), sigma2=1.0)


def test_mmse_gdfe_examples():
    reg = mmse_gdfe(np.eye(1), y_prime=np.array([3.0]))
    assert reg.r[0, 0] == pytest.approx(np.sqrt(2.0))
    assert reg.y1[0] == pytest.approx(3.0 / np.sqrt(2.0))

    reg0 = mmse_gdfe(np.zeros((3, 3)))
    assert np.allclose(reg0.r, np.eye(3))


def test_mmse_gdfe_regularizes_singular_channels():
    b = np.array([[1.0, 1.0], [1.0, 1.0]])  # rank 1
    reg = mmse_gdfe(b)
    assert np.all(np.diag(reg.r) > 0)


def test_mmse_gdfe_pythagorean_split():
    rng = np.random.default_rng(96)
    for _ in range(20):
        n = int(rng.integers(1, 5))
        b = rng.standard_normal((n, n))
        y = rng.standard_normal(n)
        reg = mmse_gdfe(b, y_prime=y)
        for _ in range(5):
            x = rng.integers(-3, 4, size=n).astype(float)
            lhs = np.linalg.norm(reg.y1 - reg.r @ x) ** 2
            rhs = np.linalg.norm(y - b @ x) ** 2 + np.linalg.norm(x) ** 2
            assert lhs <= rhs + 1e-9
            # the gap is the fixed residual of projecting (y; 0), independent of x
        gaps = []
        for _ in range(4):
            x = rng.integers(-3, 4, size=n).astype(float)
            lhs = np.linalg.norm(reg.y1 - reg.r @ x) ** 2
            rhs = np.linalg.norm(y - b @ x) ** 2 + np.linalg.norm(x) ** 2
            gaps.append(rhs - lhs)
        assert np.ptp(gaps) < 1e-8


def test_mmse_gdfe_custom_t_matrix():
    rng = np.random.default_rng(97)
    b = rng.standard_normal((3, 3))
    t = np.diag([1.0, 4.0, 9.0])
    reg = mmse_gdfe(b, t_matrix=t)
    # stacked Gram identity: R^T R = B^T B + T
    assert np.allclose(reg.r.T @ reg.r, b.T @ b + t, atol=1e-10)
    with pytest.raises(ValueError):
        mmse_gdfe(b, t_matrix=-np.eye(3))


def test_remap():
    c = qam_constellation(4, 1)  # alphabet (-1, 0)
    assert np.array_equal(remap_to_constellation(np.array([0, -1]), c), [0, -1])
    assert np.array_equal(remap_to_constellation(np.array([3, -7]), c), [0, -1])


def test_stack_spacetime():
    rng = np.random.default_rng(98)
    h = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    # T = 1, identity generator: the uncoded model
    assert np.allclose(stack_spacetime(np.eye(2), h, 1), realify(h))
    # T = 2, identity generator: block diagonal with two realified copies
    out = stack_spacetime(np.eye(4), h, 2)
    assert out.shape == (12, 8)
    expected = np.zeros((12, 8))
    expected[:6, :4] = realify(h)
    expected[6:, 4:] = realify(h)
    assert np.allclose(out, expected)
    with pytest.raises(ValueError):
        stack_spacetime(np.eye(3), h, 2)


def test_generator_file_roundtrip(tmp_path):
    path = tmp_path / "gen.txt"
    path.write_text("2 2 complex\n1 0  0 -1\n0.5 0.5  2 0\n", encoding="utf-8")
    g = parse_generator_file(path)
    assert g.shape == (2, 2)
    assert g[0, 1] == -1j
    assert g[1, 0] == 0.5 + 0.5j

    path2 = tmp_path / "gen_real.txt"
    path2.write_text("1 2 real\n3 4\n", encoding="utf-8")
    g2 = parse_generator_file(path2)
    assert np.array_equal(g2, np.array([[3.0, 4.0]], dtype=complex))

    bad = tmp_path / "bad.txt"
    bad.write_text("2 2 complex\n1 0\n", encoding="utf-8")
    with pytest.raises(ValueError):
        parse_generator_file(bad)
    bad2 = tmp_path / "bad2.txt"
    bad2.write_text("2 2 quaternion\n1 0 1 0 1 0 1 0\n", encoding="utf-8")
    with pytest.raises(ValueError):
        parse_generator_file(bad2)

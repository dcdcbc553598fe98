"""MIMO system model: channel and noise generation, complex-to-real
expansion, QAM constellation mapping with Gray labeling, space-time
stacking, MMSE-GDFE regularization, and constellation remapping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matrix import OpCounter, qr_decompose


@dataclass(frozen=True)
class ChannelInstance:
    """A flat-fading channel draw: complex gain matrix with unit-variance
    i.i.d. entries and the per-complex-entry noise variance."""

    h: np.ndarray
    sigma2: float

    def __post_init__(self) -> None:
        if self.h.shape[0] < self.h.shape[1]:
            raise ValueError("need at least as many receive as transmit antennas")
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be nonnegative")


def draw_channel(n_r: int, n_t: int, sigma2: float, rng: np.random.Generator) -> ChannelInstance:
    """Sample an i.i.d. complex Gaussian channel with unit-variance entries."""
    h = (rng.standard_normal((n_r, n_t)) + 1j * rng.standard_normal((n_r, n_t))) / np.sqrt(2.0)
    return ChannelInstance(h=h, sigma2=float(sigma2))


def realify(h: np.ndarray) -> np.ndarray:
    """Real-valued expansion ``[[Re, -Im], [Im, Re]]`` of a complex matrix.

    The expansion is an isometry: complex vector norms are preserved.
    """
    h = np.asarray(h, dtype=complex)
    return np.block([[h.real, -h.imag], [h.imag, h.real]])


@dataclass(frozen=True)
class Constellation:
    """Square M-QAM as a scaled, shifted integer box.

    Per real dimension the symbols are ``a * (k + 1/2)`` for integer ``k``
    in ``alphabet = {-sqrt(M)/2, ..., sqrt(M)/2 - 1}``; the scale ``a``
    makes the average energy per complex symbol ``1 / n_t`` so a codeword
    carries unit power. Bits are Gray-labeled per real dimension.
    """

    m: int
    n_t: int
    a: float = field(init=False)
    alphabet: tuple[int, ...] = field(init=False)
    bits_per_dim: int = field(init=False)

    def __post_init__(self) -> None:
        root = int(round(np.sqrt(self.m)))
        if self.m < 4 or root * root != self.m:
            raise ValueError("QAM order must be a perfect square >= 4")
        if self.n_t < 1:
            raise ValueError("n_t must be >= 1")
        object.__setattr__(self, "a", float(np.sqrt(6.0 / ((self.m - 1) * self.n_t))))
        object.__setattr__(self, "alphabet", tuple(range(-root // 2, root // 2)))
        object.__setattr__(self, "bits_per_dim", int(round(np.log2(root))))


def qam_constellation(m: int, n_t: int) -> Constellation:
    """Build a square-QAM constellation with energy normalization."""
    return Constellation(m=m, n_t=n_t)


def _gray_encode(idx: int) -> int:
    return idx ^ (idx >> 1)


def _gray_decode(code: int) -> int:
    idx = 0
    while code:
        idx ^= code
        code >>= 1
    return idx


def coords_to_bits(constellation: Constellation, coords) -> np.ndarray:
    """Gray-labeled bits of an integer coordinate vector, MSB first per
    real dimension."""
    lo = constellation.alphabet[0]
    nb = constellation.bits_per_dim
    bits = []
    for v in np.asarray(coords).tolist():
        idx = int(v) - lo
        if not 0 <= idx < len(constellation.alphabet):
            raise ValueError(f"coordinate {v} outside the alphabet")
        g = _gray_encode(idx)
        bits.extend((g >> (nb - 1 - b)) & 1 for b in range(nb))
    return np.asarray(bits, dtype=np.int64)


def bits_to_coords(constellation: Constellation, bits) -> np.ndarray:
    """Inverse of :func:`coords_to_bits`."""
    bits = np.asarray(bits, dtype=np.int64)
    nb = constellation.bits_per_dim
    if bits.size % nb:
        raise ValueError("bit vector length must be a multiple of bits per dimension")
    lo = constellation.alphabet[0]
    out = []
    for k in range(bits.size // nb):
        chunk = bits[k * nb : (k + 1) * nb]
        code = 0
        for b in chunk:
            code = (code << 1) | int(b)
        out.append(_gray_decode(code) + lo)
    return np.asarray(out, dtype=np.int64)


def lattice_matrix(instance: ChannelInstance, constellation: Constellation) -> np.ndarray:
    """Real decoding-lattice basis: the constellation scale times the real
    expansion of the channel."""
    return constellation.a * realify(instance.h)


def apply_channel(
    instance: ChannelInstance,
    constellation: Constellation,
    x,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """One use of the real-valued channel ``y = B x + n``.

    ``x`` holds integer alphabet coordinates (the constellation's half-symbol
    shift is a known constant offset and is kept out of ``y``). Real noise
    components are i.i.d. Gaussian with variance ``sigma2 / 2`` each, so a
    complex noise entry has variance ``sigma2``.
    """
    x = np.asarray(x, dtype=np.int64)
    lo, hi = constellation.alphabet[0], constellation.alphabet[-1]
    if np.any(x < lo) or np.any(x > hi):
        raise ValueError("x has entries outside the alphabet")
    b = lattice_matrix(instance, constellation)
    if x.shape[0] != b.shape[1]:
        raise ValueError("x length does not match the channel")
    noise = rng.normal(scale=np.sqrt(instance.sigma2 / 2.0), size=b.shape[0])
    return b @ x + noise, noise


@dataclass(frozen=True)
class RegularizedSystem:
    """MMSE-GDFE regularized decode system ``y1 = R x + n1``.

    ``r`` is the R-factor of the channel stacked over a positive-definite
    square root; its diagonal stays positive even for singular channels.
    ``transform`` maps a received vector into ``y1`` (``y1`` is prefilled
    when the receive vector was supplied).
    """

    r: np.ndarray
    y1: np.ndarray | None
    transform: np.ndarray


def mmse_gdfe(
    bprime: np.ndarray,
    y_prime: np.ndarray | None = None,
    t_matrix: np.ndarray | None = None,
    ops: OpCounter | None = None,
) -> RegularizedSystem:
    """Left preprocessing by the QR of the channel stacked over a
    regularization block.

    With ``T`` positive definite (identity by default), factor
    ``[B'; T^(1/2)] = Q R`` and set ``y1 = Q^T (y'; 0)``. For any x,
    ``||y1 - R x||^2 <= ||y' - B' x||^2 + ||x||^2`` (in the T = I case),
    with equality up to a residual independent of x.
    """
    b = np.asarray(bprime, dtype=float)
    m, n = b.shape
    if t_matrix is None:
        root = np.eye(n)
    else:
        t = np.asarray(t_matrix, dtype=float)
        if t.shape != (n, n):
            raise ValueError("T must be n x n")
        vals, vecs = np.linalg.eigh((t + t.T) / 2.0)
        if np.any(vals <= 0):
            raise ValueError("T must be positive definite")
        root = vecs @ np.diag(np.sqrt(vals)) @ vecs.T
    stacked = np.vstack([b, root])
    q, r = qr_decompose(stacked, ops=ops)
    transform = q[:m, :].T
    y1 = None
    if y_prime is not None:
        y1 = transform @ np.asarray(y_prime, dtype=float)
        if ops is not None:
            ops.add(m * n)
    return RegularizedSystem(r=r, y1=y1, transform=transform)


def remap_to_constellation(x_hat, constellation: Constellation) -> np.ndarray:
    """Clamp integer estimates componentwise to the nearest alphabet point.

    For a contiguous integer alphabet this is a clamp to the endpoints;
    in-range estimates pass through unchanged.
    """
    x = np.asarray(x_hat, dtype=np.int64)
    return np.clip(x, constellation.alphabet[0], constellation.alphabet[-1])


def _per_slot_order(n_half: int, t_len: int) -> np.ndarray:
    """Permutation from (all real parts, all imaginary parts) ordering to
    per-time-slot (real, imaginary) blocks."""
    idx = np.empty(2 * n_half * t_len, dtype=np.int64)
    pos = 0
    for t in range(t_len):
        for i in range(n_half):
            idx[pos] = t * n_half + i
            pos += 1
        for i in range(n_half):
            idx[pos] = n_half * t_len + t * n_half + i
            pos += 1
    return idx


def stack_spacetime(g: np.ndarray, h: np.ndarray, t_len: int) -> np.ndarray:
    """Real-valued matrix of a space-time block code over ``t_len`` channel
    uses: the real expansion of ``(I_T kron H) @ G`` with real dimensions
    grouped per time slot.

    With an identity generator the result is block-diagonal with ``t_len``
    copies of ``realify(h)``; for ``t_len = 1`` it reduces to the uncoded
    model. Output shape is ``(2 n_r t_len) x (2 n_t t_len)``.
    """
    h = np.asarray(h, dtype=complex)
    g = np.asarray(g, dtype=complex)
    n_r, n_t = h.shape
    if t_len < 1:
        raise ValueError("t_len must be >= 1")
    if g.shape != (n_t * t_len, n_t * t_len):
        raise ValueError(
            f"generator must be {n_t * t_len} x {n_t * t_len}, got {g.shape}"
        )
    big = realify(np.kron(np.eye(t_len), h) @ g)
    rows = _per_slot_order(n_r, t_len)
    cols = _per_slot_order(n_t, t_len)
    return big[np.ix_(rows, cols)]


def parse_generator_file(path) -> np.ndarray:
    """Read a generator matrix from its plain-text interchange format.

    First line: ``rows cols complex|real``. Then row-major entries,
    whitespace separated across any number of lines; complex entries are
    ``re im`` pairs.
    """
    with open(path, encoding="utf-8") as fh:
        tokens = fh.read().split()
    if len(tokens) < 3:
        raise ValueError("generator file is truncated")
    try:
        rows, cols = int(tokens[0]), int(tokens[1])
    except ValueError as exc:
        raise ValueError("generator file header must start with 'rows cols'") from exc
    kind = tokens[2]
    body = tokens[3:]
    if kind == "real":
        if len(body) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, found {len(body)}")
        vals = np.asarray([float(v) for v in body], dtype=complex)
    elif kind == "complex":
        if len(body) != 2 * rows * cols:
            raise ValueError(f"expected {2 * rows * cols} numbers, found {len(body)}")
        pairs = np.asarray([float(v) for v in body]).reshape(-1, 2)
        vals = pairs[:, 0] + 1j * pairs[:, 1]
    else:
        raise ValueError("generator kind must be 'complex' or 'real'")
    return vals.reshape(rows, cols)

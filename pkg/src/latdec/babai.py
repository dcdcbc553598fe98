"""Zero-forcing and successive-interference-cancellation decoders, their
lattice-reduction-aided forms, and the associated decoding-radius formulas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import hermite_bound
from .lll import DEFAULT_PARAMS, LllParams, ReductionResult, lll_reduce
from .matrix import (
    OpCounter,
    QrFactors,
    iround,
    qr_decompose,
    round_half_away,
    solve_upper_triangular,
)


@dataclass
class DecodeResult:
    """Decoder output: integer coordinates, achieved distance to the target,
    the decoder that produced it, and an operation-count snapshot."""

    coords: np.ndarray
    distance: float
    decoder_tag: str
    ops: int = 0


def _residual(basis: np.ndarray, y: np.ndarray, coords: np.ndarray,
              ops: OpCounter | None = None) -> float:
    if ops is not None:
        ops.add(basis.shape[0] * (basis.shape[1] + 1))
    return float(np.linalg.norm(y - basis @ coords))


def zf_decode(basis, y, ops: OpCounter | None = None) -> DecodeResult:
    """Zero-forcing: round the pseudoinverse solution componentwise
    (ties away from zero).

    The solution ``B^+ y`` is evaluated as one triangular solve against the
    QR factors rather than by forming the pseudoinverse.
    """
    if ops is None:
        ops = OpCounter()
    b = np.asarray(basis, dtype=float)
    y = np.asarray(y, dtype=float)
    q, r = qr_decompose(b, ops=ops)
    y_r = q.T @ y
    ops.add(q.shape[0] * q.shape[1])
    coords = round_half_away(solve_upper_triangular(r, y_r, ops=ops)).astype(np.int64)
    return DecodeResult(coords, _residual(b, y, coords, ops), "zf", ops.mul_adds)


def sic_decode(basis, y, ops: OpCounter | None = None,
               tag: str = "sic") -> DecodeResult:
    """Successive interference cancellation (nearest-plane): back-substitute
    through the R-factor, rounding one coordinate at a time.

    ``basis`` may be a matrix or a precomputed :class:`QrFactors`, so callers
    that already factorized can reuse the work.
    """
    if ops is None:
        ops = OpCounter()
    if isinstance(basis, QrFactors):
        q, r = basis
    else:
        q, r = qr_decompose(np.asarray(basis, dtype=float), ops=ops)
    y = np.asarray(y, dtype=float)
    n = r.shape[0]
    y_r = q.T @ y
    ops.add(q.shape[0] * n)
    r_rows = r.tolist()
    y_list = y_r.tolist()
    x = [0] * n
    for i in range(n - 1, -1, -1):
        s = y_list[i] - sum(r_rows[i][j] * x[j] for j in range(i + 1, n))
        x[i] = iround(s / r_rows[i][i])
    ops.add(n * (n + 1) // 2)
    coords = np.asarray(x, dtype=np.int64)
    # distance split: in-span residual plus the component outside the span
    in_span2 = float(np.sum((y_r - r @ coords) ** 2))
    out_of_span = y - q @ y_r
    perp2 = float(out_of_span @ out_of_span)
    ops.add(n * (n + 1) // 2 + 2 * q.shape[0] * n)
    return DecodeResult(coords, float(np.sqrt(in_span2 + perp2)), tag, ops.mul_adds)


def lr_aided_decode(
    basis,
    y,
    params: LllParams = DEFAULT_PARAMS,
    inner: str = "sic",
    ops: OpCounter | None = None,
    reduction: ReductionResult | None = None,
) -> DecodeResult:
    """Reduce the basis, run the inner decoder on the reduced system, and map
    the estimate back through the unimodular transform.

    No constellation clamping happens here; remapping onto a finite alphabet
    is the caller's business.
    """
    if ops is None:
        ops = OpCounter()
    if inner not in ("zf", "sic"):
        raise ValueError("inner decoder must be 'zf' or 'sic'")
    b = np.asarray(basis, dtype=float)
    y = np.asarray(y, dtype=float)
    red = reduction if reduction is not None else lll_reduce(b, params, ops=ops)
    if inner == "sic":
        inner_res = sic_decode(QrFactors(*qr_decompose(red.reduced, ops=ops)), y, ops=ops)
    else:
        inner_res = zf_decode(red.reduced, y, ops=ops)
    coords = red.u @ inner_res.coords
    ops.add(red.u.shape[0] * red.u.shape[1])
    tag = f"lll_{inner}"
    return DecodeResult(coords, _residual(b, y, coords, ops), tag, ops.mul_adds)


def sic_radius(r: np.ndarray) -> float:
    """Guaranteed decoding radius of SIC: half the smallest diagonal entry of
    the upper-triangular factor. The bound is tight."""
    d = np.diag(np.asarray(r, dtype=float))
    if np.any(d <= 0.0):
        raise ValueError("upper-triangular factor must have positive diagonal")
    return 0.5 * float(np.min(d))


def sic_radius_lower_bound(
    lambda1: float,
    n: int,
    params: LllParams = DEFAULT_PARAMS,
    exact_gamma: bool = False,
) -> float:
    """Lower bound on the SIC decoding radius over an LLL-reduced basis:
    ``lambda1 / (2 sqrt(g_n) alpha^((n-1)/4))`` with ``g_n`` the Hermite
    constant bound of :func:`hermite_bound`.

    The default Minkowski bound gives the sqrt(n) form; ``exact_gamma``
    tightens it in low dimension.
    """
    if lambda1 <= 0:
        raise ValueError("lambda1 must be positive")
    g = hermite_bound(n, exact_low_dim=exact_gamma).value
    return lambda1 / (2.0 * np.sqrt(g) * params.alpha ** ((n - 1) / 4.0))


def worst_case_radius_lower_bound(
    lambda1: float, n: int, params: LllParams = DEFAULT_PARAMS
) -> float:
    """Older lower bound on the LLL-SIC radius,
    ``lambda1 / (2 alpha^((n-1)/2))``; kept for comparison."""
    if lambda1 <= 0:
        raise ValueError("lambda1 must be positive")
    return lambda1 / (2.0 * params.alpha ** ((n - 1) / 2.0))


@dataclass
class RadiusReport:
    """Decoding radius of a reduced basis next to its two lower bounds.

    ``sic_radius >= hermite_lower`` always holds on an LLL-reduced basis
    with an exact ``lambda1``; the worst-case bound is reported for
    comparison only. ``lambda1_exact`` records whether an exact minimum was
    supplied or the sandwich fallback ``alpha^(-(n-1)/2) ||b1||`` was used.
    """

    sic_radius: float
    hermite_lower: float
    worst_case_lower: float
    lambda1: float
    lambda1_exact: bool


def radius_report(
    reduction: ReductionResult,
    params: LllParams = DEFAULT_PARAMS,
    lambda1: float | None = None,
    exact_gamma: bool = False,
) -> RadiusReport:
    """Build a :class:`RadiusReport` for a reduced basis.

    When no exact minimum norm is available (dimension beyond the
    enumeration budget), the lower bounds are evaluated at the provable
    underestimate ``alpha^(-(n-1)/2) * ||b1||``.
    """
    n = reduction.r.shape[0]
    exact = lambda1 is not None
    if lambda1 is None:
        lambda1 = params.alpha ** (-(n - 1) / 2.0) * float(reduction.r[0, 0])
    return RadiusReport(
        sic_radius=sic_radius(reduction.r),
        hermite_lower=sic_radius_lower_bound(lambda1, n, params, exact_gamma),
        worst_case_lower=worst_case_radius_lower_bound(lambda1, n, params),
        lambda1=lambda1,
        lambda1_exact=exact,
    )

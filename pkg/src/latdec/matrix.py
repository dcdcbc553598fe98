"""Dense real matrix kernels: QR decomposition, pseudoinverse, triangular
solves, and the floating-operation counter used for complexity comparisons.

All matrices are plain ``numpy.ndarray`` with basis vectors stored as
columns.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DegenerateBasisError

# A column is declared linearly dependent when its orthogonal residual is
# below this fraction of the largest column norm.
RANK_TOL = 1e-12


class OpCounter:
    """Counter of floating-point multiply-add pairs inside matrix kernels.

    Convention: an inner product, axpy or scaling of length m costs m
    mul-adds; rounding, comparisons and integer bookkeeping are free. The
    absolute numbers only matter relative to each other, so kernels count at
    the granularity of their vectorized operations.
    """

    __slots__ = ("mul_adds",)

    def __init__(self) -> None:
        self.mul_adds = 0

    def add(self, count: int) -> None:
        self.mul_adds += int(count)

    def __repr__(self) -> str:
        return f"OpCounter(mul_adds={self.mul_adds})"


class QrFactors(NamedTuple):
    """Thin QR factors: ``q`` has orthonormal columns, ``r`` is upper
    triangular with nonnegative diagonal."""

    q: np.ndarray
    r: np.ndarray


def iround(x: float) -> int:
    """Round a scalar to the nearest integer, ties away from zero."""
    if x >= 0.0:
        return int(math.floor(x + 0.5))
    return -int(math.floor(-x + 0.5))


def round_half_away(x):
    """Elementwise rounding to the nearest integer, ties away from zero.

    Returns a float array (use :func:`iround` for scalars when an ``int`` is
    needed).
    """
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def qr_decompose(b: np.ndarray, ops: OpCounter | None = None) -> QrFactors:
    """Thin QR of a full-column-rank matrix by classical Gram-Schmidt with
    reorthogonalization (CGS2).

    The diagonal of ``r`` is positive by construction. Raises
    :class:`DegenerateBasisError` when a column's residual norm falls below
    ``RANK_TOL`` times the largest column norm.
    """
    b = np.asarray(b, dtype=float)
    if b.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    m, n = b.shape
    if m < 1 or n < 1:
        raise ValueError("matrix must be at least 1x1")
    if m < n:
        raise DegenerateBasisError(f"matrix is {m}x{n}: more columns than rows")
    if not np.all(np.isfinite(b)):
        raise ValueError("matrix entries must be finite")

    col_scale = float(np.max(np.sqrt(np.sum(b * b, axis=0))))
    if col_scale == 0.0:
        raise DegenerateBasisError("all columns are zero")

    q = np.empty((m, n))
    r = np.zeros((n, n))
    flops = 0
    for i in range(n):
        v = b[:, i].copy()
        if i:
            qi = q[:, :i]
            s = qi.T @ v
            v -= qi @ s
            # second pass keeps orthogonality at machine precision
            s2 = qi.T @ v
            v -= qi @ s2
            r[:i, i] = s + s2
            flops += 4 * m * i
        nrm = float(np.linalg.norm(v))
        flops += 2 * m
        if nrm <= RANK_TOL * col_scale:
            raise DegenerateBasisError(
                f"column {i} is linearly dependent (residual {nrm:.3e})"
            )
        r[i, i] = nrm
        q[:, i] = v / nrm
    if ops is not None:
        ops.add(flops)
    return QrFactors(q, r)


def solve_upper_triangular(
    r: np.ndarray, y: np.ndarray, ops: OpCounter | None = None
) -> np.ndarray:
    """Back-substitution for ``r x = y`` with ``r`` upper triangular.

    ``y`` may be a vector or a matrix of stacked right-hand sides.
    """
    r = np.asarray(r, dtype=float)
    n = r.shape[0]
    x = np.array(y, dtype=float)
    for i in range(n - 1, -1, -1):
        if i < n - 1:
            x[i] -= r[i, i + 1 :] @ x[i + 1 :]
        x[i] /= r[i, i]
    if ops is not None:
        cols = 1 if x.ndim == 1 else x.shape[1]
        ops.add(cols * n * (n + 1) // 2)
    return x


def pseudoinverse(b: np.ndarray, ops: OpCounter | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a full-column-rank matrix via QR.

    Satisfies ``pseudoinverse(b) @ b == I`` up to rounding. Raises
    :class:`DegenerateBasisError` on rank deficiency.
    """
    q, r = qr_decompose(b, ops=ops)
    return solve_upper_triangular(r, q.T, ops=ops)


def det_from_r(r: np.ndarray) -> float:
    """Product of the diagonal of an upper-triangular factor.

    This equals the lattice determinant of the basis the factor came from.
    Raises :class:`DegenerateBasisError` if any diagonal entry is
    nonpositive.
    """
    r = np.asarray(r, dtype=float)
    d = np.diag(r)
    if np.any(d <= 0.0):
        raise DegenerateBasisError("upper-triangular factor has a nonpositive diagonal")
    return float(np.prod(d))

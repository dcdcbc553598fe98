"""Lattice-level semantics: determinants, dual bases, Hermite-constant
bounds and unimodularity checks.

A lattice basis is a full-column-rank real matrix whose integer combinations
of columns form the lattice.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .exact import int_det
from .matrix import OpCounter, det_from_r, pseudoinverse, qr_decompose

# Exactly known values of the Hermite constant in low dimension (densest
# packings: hexagonal, fcc, D4, D5, E6, E7, E8).
_GAMMA_EXACT = {
    1: 1.0,
    2: 2.0 / math.sqrt(3.0),
    3: 2.0 ** (1.0 / 3.0),
    4: math.sqrt(2.0),
    5: 8.0 ** (1.0 / 5.0),
    6: (64.0 / 3.0) ** (1.0 / 6.0),
    7: 64.0 ** (1.0 / 7.0),
    8: 2.0,
}


class HermiteBound(NamedTuple):
    """Upper bound on the Hermite constant of dimension ``n``."""

    n: int
    value: float


def hermite_bound(n: int, exact_low_dim: bool = False) -> HermiteBound:
    """Monotone upper bound on the Hermite constant.

    Defaults to Minkowski's bound (value ``n``); with ``exact_low_dim`` the
    exactly known constants are used for n <= 8. The returned value is the
    running maximum over dimensions 1..n, so it is nondecreasing in ``n``
    even though monotonicity of the constant itself is unproven.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")

    def bound(i: int) -> float:
        if exact_low_dim and i in _GAMMA_EXACT:
            return _GAMMA_EXACT[i]
        return float(i)

    return HermiteBound(n, max(bound(i) for i in range(1, n + 1)))


def lattice_determinant(basis: np.ndarray, ops: OpCounter | None = None) -> float:
    """Determinant of the lattice spanned by the columns of ``basis``.

    Equals sqrt(det(B^T B)); invariant under unimodular column transforms.
    """
    _, r = qr_decompose(basis, ops=ops)
    return det_from_r(r)


def dual_basis(basis: np.ndarray, ops: OpCounter | None = None) -> np.ndarray:
    """Basis of the dual lattice: pseudoinverse transpose, columns reversed.

    The column reversal pairs the i-th primal direction with the
    (n-i+1)-th dual direction, so the R-factor diagonals of a basis and its
    dual are elementwise reciprocal in opposite order.
    """
    return pseudoinverse(basis, ops=ops).T[:, ::-1]


def is_unimodular(u) -> bool:
    """True iff ``u`` is a square integer matrix with determinant +-1.

    The determinant is computed exactly over the integers; floating point is
    never trusted for this predicate.
    """
    arr = np.asarray(u)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("expected a square matrix")
    try:
        d = int_det(arr)
    except ValueError:
        raise ValueError("expected an integer matrix") from None
    return d in (1, -1)

"""Exact integer and rational matrix arithmetic.

Determinants, inverses and adjugates of integer matrices overflow fixed-width
types quickly, so everything here runs on Python's arbitrary-precision ints
(Bareiss elimination) or on ``fractions.Fraction``.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import DegenerateBasisError


def as_int_rows(a) -> list[list[int]]:
    """Copy a matrix-like object into a list of rows of Python ints.

    Float inputs are accepted only when every entry is integral.
    """
    arr = np.asarray(a)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if arr.dtype == object:
        rows = [[int(v) for v in row] for row in arr.tolist()]
    elif np.issubdtype(arr.dtype, np.integer):
        rows = [[int(v) for v in row] for row in arr.tolist()]
    elif np.issubdtype(arr.dtype, np.floating):
        if not np.all(arr == np.round(arr)):
            raise ValueError("matrix has non-integer entries")
        rows = [[int(v) for v in row] for row in arr.tolist()]
    else:
        raise ValueError(f"unsupported dtype {arr.dtype}")
    return rows


def int_det(a) -> int:
    """Exact determinant of a square integer matrix (fraction-free Bareiss)."""
    m = as_int_rows(a)
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("matrix must be square")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if pivot is None:
                return 0
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def int_matmul(a, b) -> list[list[int]]:
    """Exact product of two integer matrices."""
    ra = as_int_rows(a)
    rb = as_int_rows(b)
    if len(rb) != len(ra[0]):
        raise ValueError("inner dimensions do not match")
    cols = len(rb[0])
    return [
        [sum(ra[i][k] * rb[k][j] for k in range(len(rb))) for j in range(cols)]
        for i in range(len(ra))
    ]


def int_matvec(a, x) -> list[int]:
    """Exact integer matrix-vector product."""
    rows = as_int_rows(a)
    xs = [int(v) for v in np.asarray(x).tolist()]
    if len(xs) != len(rows[0]):
        raise ValueError("dimension mismatch")
    return [sum(r[k] * xs[k] for k in range(len(xs))) for r in rows]


def frac_inverse(a) -> list[list[Fraction]]:
    """Exact inverse of a nonsingular integer matrix, as Fractions.

    Gauss-Jordan elimination with exact pivoting; raises
    :class:`DegenerateBasisError` when the matrix is singular.
    """
    rows = as_int_rows(a)
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ValueError("matrix must be square")
    aug = [
        [Fraction(v) for v in rows[i]] + [Fraction(int(i == j)) for j in range(n)]
        for i in range(n)
    ]
    for col in range(n):
        pivot = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if pivot is None:
            raise DegenerateBasisError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [u - f * v for u, v in zip(aug[i], aug[col])]
    return [row[n:] for row in aug]


def frac_solve(a, rhs) -> list[Fraction]:
    """Exact solution of ``a x = rhs`` for integer ``a`` and ``rhs``."""
    inv = frac_inverse(a)
    b = [Fraction(int(v)) for v in np.asarray(rhs).tolist()]
    n = len(inv)
    if len(b) != n:
        raise ValueError("dimension mismatch")
    return [sum(inv[i][k] * b[k] for k in range(n)) for i in range(n)]

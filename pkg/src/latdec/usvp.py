"""Reduction from unique-SVP to Hermite-SVP.

Given a lattice whose shortest vector is unusually short relative to the
second minimum, a Hermite-SVP solver (one that finds a vector of norm at
most ``C_n det^(1/n)``) can be driven to recover an exact shortest vector:
shorten the *dual* basis front-to-back by repeated solve / primitive-part /
basis-completion / projection steps, then dualize back and read off the
first primal vector.

All basis bookkeeping here is exact over arbitrary-precision integers
(duals are cleared of denominators by the determinant); floating point is
confined to the solver calls, whose outputs are integer coordinate vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateBasisError, SolverContractError
from .exact import as_int_rows, frac_inverse, frac_solve, int_det, int_matmul
from .lll import DEFAULT_PARAMS, LllParams, lll_reduce
from .matrix import qr_decompose

_CONTRACT_SLACK = 1e-8


@dataclass(frozen=True)
class HsvpSolver:
    """Contract for a Hermite-SVP solver.

    ``solve(basis)`` returns nonzero integer coordinates of a lattice vector
    with norm at most ``constant(k) * det^(1/k)`` for a k-column basis. The
    schedule ``constant(k)^(k/(k-1))`` must be nondecreasing in k for the
    reduction's guarantee to apply.
    """

    name: str
    constant: Callable[[int], float]
    solve: Callable[[np.ndarray], np.ndarray]

    def validate_schedule(self, n: int) -> None:
        prev = None
        for k in range(2, n + 1):
            v = self.constant(k) ** (k / (k - 1))
            if prev is not None and v < prev * (1.0 - 1e-12):
                raise ValueError(
                    f"solver constant schedule decreases at k={k}"
                )
            prev = v


def lll_as_hsvp(params: LllParams = DEFAULT_PARAMS) -> HsvpSolver:
    """LLL as a Hermite-SVP solver with constants ``alpha^((k-1)/4)``.

    The schedule ``alpha^(k/4)`` is increasing, so the reduction hypothesis
    holds.
    """

    def solve(basis: np.ndarray) -> np.ndarray:
        red = lll_reduce(np.asarray(basis, dtype=float), params)
        return red.u[:, 0].copy()

    return HsvpSolver(
        name="lll",
        constant=lambda k: params.alpha ** ((k - 1) / 4.0),
        solve=solve,
    )


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended gcd: returns (g, x, y) with g = a*x + b*y, g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def primitive_part(coeffs) -> tuple[np.ndarray, int]:
    """Divide an integer vector by the gcd of its entries.

    Returns the primitive vector (gcd of entries 1, signs preserved) and the
    extracted factor.
    """
    vals = [int(v) for v in np.asarray(coeffs).tolist()]
    if not any(vals):
        raise ValueError("coefficient vector is zero")
    g = 0
    for v in vals:
        g = math.gcd(g, v)
    return np.asarray([v // g for v in vals], dtype=np.int64), g


def complete_basis(primitive) -> np.ndarray:
    """Unimodular matrix whose first column is the given primitive vector.

    Built by composing the inverses of the pairwise extended-gcd row
    operations that reduce the vector to a unit vector. Any unimodular
    completion is as good as any other for the reduction.
    """
    v = [int(x) for x in np.asarray(primitive).tolist()]
    n = len(v)
    if not any(v):
        raise ValueError("cannot complete the zero vector")
    g_all = 0
    for x in v:
        g_all = math.gcd(g_all, x)
    if g_all != 1:
        raise ValueError("vector is not primitive (gcd != 1)")
    # W starts as the identity; each gcd step on (v[0], v[j]) right-multiplies
    # W by the inverse of the corresponding elementary matrix.
    w = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for j in range(1, n):
        if v[j] == 0:
            continue
        a, b = v[0], v[j]
        g, x, y = _xgcd(a, b)
        # row op M = [[x, y], [-b/g, a/g]] maps (a, b) -> (g, 0);
        # columns 0 and j of W absorb M^{-1} = [[a/g, -y], [b/g, x]]
        for i in range(n):
            c0, cj = w[i][0], w[i][j]
            w[i][0] = (a // g) * c0 + (b // g) * cj
            w[i][j] = -y * c0 + x * cj
        v[0], v[j] = g, 0
    assert v[0] == 1
    return np.asarray(w, dtype=np.int64)


def scaled_dual(basis) -> tuple[np.ndarray, int]:
    """Integer-cleared dual basis: ``|det B|`` times the dual of ``B``.

    Computed exactly (rational inverse, then the column-reversing pairing);
    the result spans ``scale`` times the dual lattice, which leaves
    Hermite-SVP questions unchanged because the scaling is uniform.
    """
    rows = as_int_rows(basis)
    n = len(rows)
    det = int_det(rows)
    if det == 0:
        raise DegenerateBasisError("basis is singular")
    s = abs(det)
    inv = frac_inverse(rows)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            val = s * inv[n - 1 - j][i]
            if val.denominator != 1:
                raise AssertionError("scaled dual is not integral")
            out[i][j] = int(val)
    return np.asarray(out, dtype=object), s


def _dualize_scaled(dual_rows: list[list[int]], scale: int) -> list[list[int]]:
    """Primal basis recovered from a scaled dual basis (exact)."""
    n = len(dual_rows)
    inv = frac_inverse(dual_rows)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            val = scale * inv[n - 1 - j][i]
            if val.denominator != 1:
                raise AssertionError("primal recovered from dual is not integral")
            out[i][j] = int(val)
    return out


def project_orthogonal(basis, lead: int) -> np.ndarray:
    """Basis of the projection of columns ``lead..n-1`` onto the orthogonal
    complement of the first ``lead`` columns, expressed in an orthonormal
    frame of that complement (the trailing block of the R-factor).

    The projected lattice determinant is the product of the trailing
    diagonal entries.
    """
    b = np.asarray(basis, dtype=float)
    n = b.shape[1]
    if not 0 <= lead < n:
        raise ValueError("lead must be in [0, n)")
    _, r = qr_decompose(b)
    return r[lead:, lead:].copy()


def _check_contract(
    solver: HsvpSolver, basis_float: np.ndarray, coords: np.ndarray, det: float
) -> None:
    k = basis_float.shape[1]
    norm = float(np.linalg.norm(basis_float @ np.asarray(coords, dtype=float)))
    bound = solver.constant(k) * det ** (1.0 / k)
    if norm > bound * (1.0 + _CONTRACT_SLACK):
        raise SolverContractError(
            f"solver {solver.name} returned norm {norm:.6g} > bound {bound:.6g} "
            f"at dimension {k}"
        )


def reduce_usvp(
    basis,
    solver: HsvpSolver,
    trace: list | None = None,
    method: str = "generic",
) -> np.ndarray:
    """Find coordinates of a shortest vector of a gap lattice using only a
    Hermite-SVP solver.

    ``basis`` must be a nonsingular square integer matrix. Under the gap
    promise (second minimum sufficiently larger than the first relative to
    the solver constants) the returned coordinates satisfy
    ``||B @ coords|| = lambda1``.

    ``method="generic"`` runs the full dual shorten-project-lift loop with
    one solver call per projection level; ``method="fast"`` exploits the
    near self-duality of LLL-style solvers: a single solve of the whole
    scaled dual followed by dualization. ``trace``, when given, accumulates
    the dual R-factor diagonal after each step.
    """
    if method not in ("generic", "fast"):
        raise ValueError("method must be 'generic' or 'fast'")
    rows = as_int_rows(basis)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("basis must be square")
    if n == 1:
        if rows[0][0] == 0:
            raise DegenerateBasisError("basis is singular")
        return np.asarray([1], dtype=np.int64)
    solver.validate_schedule(n)
    dual, scale = scaled_dual(rows)
    d_rows = [[int(v) for v in row] for row in dual.tolist()]

    if method == "fast":
        red = lll_reduce(np.asarray(d_rows, dtype=float))
        d_rows = int_matmul(d_rows, red.u)
        if trace is not None:
            _, r = qr_decompose(np.asarray(d_rows, dtype=float))
            trace.append(np.diag(r).copy())
    else:
        d_float = np.asarray(d_rows, dtype=float)
        det_d = abs(int_det(d_rows))
        coeffs = solver.solve(d_float)
        coeffs, _ = primitive_part(coeffs)
        _check_contract(solver, d_float, coeffs, float(det_d))
        d_rows = int_matmul(d_rows, complete_basis(coeffs))
        if trace is not None:
            _, r = qr_decompose(np.asarray(d_rows, dtype=float))
            trace.append(np.diag(r).copy())
        for i in range(2, n + 1):
            d_float = np.asarray(d_rows, dtype=float)
            _, r = qr_decompose(d_float)
            proj = r[i - 1 :, i - 1 :]
            coeffs = solver.solve(proj)
            coeffs, _ = primitive_part(coeffs)
            proj_det = float(np.prod(np.diag(proj)))
            _check_contract(solver, proj, coeffs, proj_det)
            w = complete_basis(coeffs)
            tail = [row[i - 1 :] for row in d_rows]
            new_tail = int_matmul(tail, w)
            d_rows = [
                row[: i - 1] + new_tail[k] for k, row in enumerate(d_rows)
            ]
            if trace is not None:
                _, r2 = qr_decompose(np.asarray(d_rows, dtype=float))
                trace.append(np.diag(r2).copy())

    primal = _dualize_scaled(d_rows, scale)
    c1 = [row[0] for row in primal]
    coords = frac_solve(rows, c1)
    out = []
    for v in coords:
        if v.denominator != 1:
            raise AssertionError("recovered vector is not in the lattice")
        out.append(int(v))
    return np.asarray(out, dtype=np.int64)

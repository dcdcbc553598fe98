"""QR-based LLL reduction with unimodular transform tracking.

The working state is the upper-triangular factor of the basis plus the
integer coefficient matrix mapping original columns to current columns.
Swaps update the factor with a local 2x2 Givens rotation; a full
refactorization every n swaps guards against drift. Size reduction runs a
full round on a column before each Lovasz test, and optionally feeds every
intermediate lattice point to a candidate-collector hook (used by list
decoding).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .matrix import OpCounter, iround, qr_decompose

# relative slack applied to the size and Lovasz inequalities; floating-point
# reduction needs a little room at the boundary
_COND_SLACK = 1e-9


@dataclass(frozen=True)
class LllParams:
    """Reduction parameter delta in (1/4, 1] and its quality constant
    alpha = 1/(delta - 1/4)."""

    delta: float = 0.75
    alpha: float = field(init=False)

    def __post_init__(self) -> None:
        if not 0.25 < self.delta <= 1.0:
            raise ValueError("delta must lie in (1/4, 1]")
        object.__setattr__(self, "alpha", 1.0 / (self.delta - 0.25))


DEFAULT_PARAMS = LllParams()


@dataclass
class ReductionResult:
    """Output of a reduction: ``reduced = original @ u`` with ``u``
    unimodular, plus the consistent upper-triangular factor of ``reduced``
    and work statistics."""

    reduced: np.ndarray
    u: np.ndarray
    r: np.ndarray
    swaps: int
    size_reductions: int


class LllState:
    """Mutable workspace of a running reduction."""

    __slots__ = (
        "basis",
        "r",
        "u",
        "n",
        "params",
        "ops",
        "collector",
        "swaps",
        "size_reductions",
        "flops",
        "_swaps_since_refresh",
    )

    def __init__(self, basis, params: LllParams, ops=None, collector=None):
        self.basis = np.asarray(basis, dtype=float)
        self.params = params
        self.ops = ops
        self.collector = collector
        self.n = self.basis.shape[1]
        _, self.r = qr_decompose(self.basis, ops=ops)
        self.u = np.eye(self.n, dtype=np.int64)
        self.swaps = 0
        self.size_reductions = 0
        self.flops = 0
        self._swaps_since_refresh = 0


def size_reduce_column(state: LllState, k: int) -> None:
    """Full round of size reductions of column ``k`` against columns
    ``k-1 .. 0``.

    After the call ``|r[i, k]| <= r[i, i] / 2`` for every ``i < k``. Each
    nonzero integer subtraction updates the coefficient matrix and offers
    the intermediate lattice point's coordinates to the collector hook.
    """
    r = state.r
    u = state.u
    collector = state.collector
    flops = 0
    for i in range(k - 1, -1, -1):
        mu = iround(r[i, k] / r[i, i])
        if mu:
            r[: i + 1, k] -= mu * r[: i + 1, i]
            u[:, k] -= mu * u[:, i]
            state.size_reductions += 1
            flops += i + 1
            if collector is not None:
                collector(u[:, k].copy())
    state.flops += flops


def _swap_and_restore(state: LllState, k: int) -> None:
    """Swap columns k-1 and k, then re-triangularize rows k-1 and k with a
    Givens rotation (diagonal kept nonnegative)."""
    r = state.r
    n = state.n
    r[:, [k - 1, k]] = r[:, [k, k - 1]]
    state.u[:, [k - 1, k]] = state.u[:, [k, k - 1]]
    a = r[k - 1, k - 1]
    b = r[k, k - 1]
    h = math.hypot(a, b)
    c = a / h
    s = b / h
    top = r[k - 1, k - 1 :].copy()
    bot = r[k, k - 1 :].copy()
    r[k - 1, k - 1 :] = c * top + s * bot
    r[k, k - 1 :] = -s * top + c * bot
    r[k, k - 1] = 0.0
    if r[k, k] < 0.0:
        r[k, k:] = -r[k, k:]
    state.flops += 4 * (n - k + 1)
    state.swaps += 1
    state._swaps_since_refresh += 1


def _refresh_factor(state: LllState) -> None:
    current = state.basis @ state.u
    _, state.r = qr_decompose(current, ops=state.ops)
    state.flops += state.basis.shape[0] * state.n * state.n
    state._swaps_since_refresh = 0


def lll_reduce(
    basis,
    params: LllParams = DEFAULT_PARAMS,
    ops: OpCounter | None = None,
    collector=None,
) -> ReductionResult:
    """LLL-reduce a full-column-rank basis, tracking the unimodular
    transform.

    The output satisfies the size condition ``|r[j, i]| <= r[j, j] / 2`` for
    all j < i and the Lovasz condition
    ``delta * r[i-1, i-1]^2 <= r[i, i]^2 + r[i-1, i]^2`` for all i.
    """
    state = LllState(basis, params, ops=ops, collector=collector)
    n = state.n
    delta = params.delta
    k = 1
    while k < n:
        size_reduce_column(state, k)
        r = state.r
        lhs = delta * r[k - 1, k - 1] ** 2
        rhs = r[k, k] ** 2 + r[k - 1, k] ** 2
        if lhs <= rhs + _COND_SLACK * r[k - 1, k - 1] ** 2:
            k += 1
        else:
            _swap_and_restore(state, k)
            if state._swaps_since_refresh >= n:
                _refresh_factor(state)
            k = max(k - 1, 1)
    reduced = state.basis @ state.u
    _, r_final = qr_decompose(reduced, ops=ops)
    if ops is not None:
        ops.add(state.flops + state.basis.shape[0] * n * n)
    return ReductionResult(
        reduced=reduced,
        u=state.u,
        r=r_final,
        swaps=state.swaps,
        size_reductions=state.size_reductions,
    )


def _size_condition(r: np.ndarray, j: int, i: int) -> bool:
    return abs(r[j, i]) <= abs(r[j, j]) * (0.5 + _COND_SLACK)


def _lovasz_condition(r: np.ndarray, delta: float, i: int) -> bool:
    lhs = delta * r[i - 1, i - 1] ** 2
    rhs = r[i, i] ** 2 + r[i - 1, i] ** 2
    return lhs <= rhs + _COND_SLACK * r[i - 1, i - 1] ** 2


def is_lll_reduced(basis, params: LllParams = DEFAULT_PARAMS) -> bool:
    """Check the size condition for every pair j < i plus the Lovasz
    condition, with a relative 1e-9 slack on each inequality."""
    _, r = qr_decompose(basis)
    n = r.shape[0]
    for i in range(n):
        for j in range(i):
            if not _size_condition(r, j, i):
                return False
        if i and not _lovasz_condition(r, params.delta, i):
            return False
    return True


def is_effectively_lll_reduced(basis, params: LllParams = DEFAULT_PARAMS) -> bool:
    """Weaker predicate: size condition only for adjacent pairs (j = i-1),
    Lovasz condition for all i.

    This is the variant preserved under dualization: the dual of an
    LLL-reduced basis passes this check even though the full size condition
    may fail for j < i-1.
    """
    _, r = qr_decompose(basis)
    n = r.shape[0]
    for i in range(1, n):
        if not _size_condition(r, i - 1, i):
            return False
        if not _lovasz_condition(r, params.delta, i):
            return False
    return True


@dataclass
class QualityReport:
    """Result of checking the standard reduction quality bounds.

    ``violations`` names each failed inequality; empty means all bounds
    hold (within a relative 1e-9 slack).
    """

    b1_norm: float
    det: float
    lambda1: float
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def reduction_quality(
    result: ReductionResult, params: LllParams, lambda1: float
) -> QualityReport:
    """Verify the quality guarantees of a reduced basis against an exact
    minimum norm.

    Checks, for alpha = 1/(delta - 1/4) and n columns:

    - diagonal decay: ``r[i,i]^2 >= r[i-1,i-1]^2 / alpha`` for every i;
    - Hermite bound: ``||b1|| <= alpha^((n-1)/4) * det^(1/n)``;
    - approximation bound: ``||b1|| <= alpha^((n-1)/2) * lambda1``;
    - sandwich: ``alpha^(-(n-1)/2) * ||b1|| <= lambda1 <= ||b1||``.
    """
    r = result.r
    n = r.shape[0]
    alpha = params.alpha
    d = np.diag(r)
    violations: list[str] = []
    for i in range(1, n):
        if d[i] ** 2 < d[i - 1] ** 2 / alpha * (1.0 - _COND_SLACK):
            violations.append(f"diagonal-decay[i={i}]")
    b1 = float(d[0])
    det = float(np.prod(d))
    if b1 > alpha ** ((n - 1) / 4.0) * det ** (1.0 / n) * (1.0 + _COND_SLACK):
        violations.append("hermite-first-vector")
    if b1 > alpha ** ((n - 1) / 2.0) * lambda1 * (1.0 + _COND_SLACK):
        violations.append("approx-factor")
    if not (
        alpha ** (-(n - 1) / 2.0) * b1 <= lambda1 * (1.0 + _COND_SLACK)
        and lambda1 <= b1 * (1.0 + _COND_SLACK)
    ):
        violations.append("minimum-sandwich")
    return QualityReport(b1_norm=b1, det=det, lambda1=lambda1, violations=violations)

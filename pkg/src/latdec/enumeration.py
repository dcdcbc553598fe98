"""Exact brute-force lattice solvers at small dimension.

Depth-first Schnorr-Euchner style enumeration over the R-factor of an
(internally LLL-reduced) basis. These are correctness oracles: they always
return exact optima, and abort with :class:`BudgetExceededError` rather than
silently approximating.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError
from .lll import LllParams, lll_reduce
from .matrix import OpCounter, iround, qr_decompose


@dataclass(frozen=True)
class EnumBudget:
    """Resource limits for exact enumeration."""

    max_dimension: int = 12
    max_nodes: int = 5_000_000

    def __post_init__(self) -> None:
        if self.max_dimension < 1 or self.max_nodes < 1:
            raise ValueError("budget limits must be >= 1")


@dataclass(frozen=True)
class MinimaReport:
    """First two successive minima of a lattice with witness vectors."""

    lambda1: float
    lambda2: float
    v1: np.ndarray
    v2: np.ndarray


_ORACLE_PARAMS = LllParams(0.99)


def _check_dimension(n: int, budget: EnumBudget) -> None:
    if n > budget.max_dimension:
        raise BudgetExceededError(
            f"dimension {n} exceeds enumeration budget {budget.max_dimension}"
        )


def _zigzag_search(
    r_rows: list[list[float]],
    y: list[float],
    bound2: float,
    *,
    exclude_zero: bool,
    max_nodes: int,
    collect=None,
    seed: list[int] | None = None,
    lex_key=None,
):
    """Core depth-first zig-zag search for ``||y - R x||^2 <= bound2``.

    In best-mode (collect is None) the bound shrinks as better points are
    found and ties within a relative 1e-9 are broken by ``lex_key``; in
    collect-mode every solution is reported and the bound stays fixed.

    Returns (best_x or None, best_d2, nodes).
    """
    n = len(r_rows)
    x = [0] * n
    step = [0] * n
    dist = [0.0] * n
    e = [y[:] for _ in range(n)]

    best_x = list(seed) if seed is not None else None
    best_d2 = bound2
    if lex_key is None:
        lex_key = tuple
    tie_eps = 1e-9 * (1.0 + abs(best_d2))
    prune_bound = best_d2 + tie_eps

    k = n - 1
    c = e[k][k] / r_rows[k][k]
    x[k] = iround(c)
    step[k] = 1 if c >= x[k] else -1
    nodes = 0

    while True:
        nodes += 1
        if nodes > max_nodes:
            raise BudgetExceededError(f"enumeration exceeded {max_nodes} nodes")
        rk = r_rows[k]
        w = e[k][k] - x[k] * rk[k]
        d = dist[k] + w * w
        if d <= prune_bound:
            if k > 0:
                ek = e[k]
                ek1 = e[k - 1]
                xk = x[k]
                for j in range(k):
                    ek1[j] = ek[j] - xk * r_rows[j][k]
                k -= 1
                dist[k] = d
                c = e[k][k] / r_rows[k][k]
                x[k] = iround(c)
                step[k] = 1 if c >= x[k] else -1
                continue
            # leaf
            if not (exclude_zero and not any(x)):
                if collect is not None:
                    collect(tuple(x), d)
                elif best_x is None or d < best_d2 - tie_eps:
                    best_x = x[:]
                    best_d2 = d
                    tie_eps = 1e-9 * (1.0 + abs(best_d2))
                    prune_bound = best_d2 + tie_eps
                elif d <= best_d2 + tie_eps:
                    if d < best_d2:
                        best_d2 = d
                    if lex_key(x) < lex_key(best_x):
                        best_x = x[:]
            x[0] += step[0]
            step[0] = -step[0] - (1 if step[0] > 0 else -1)
        else:
            if k == n - 1:
                break
            k += 1
            x[k] += step[k]
            step[k] = -step[k] - (1 if step[k] > 0 else -1)

    return best_x, best_d2, nodes


def shortest_vector(
    basis: np.ndarray, budget: EnumBudget | None = None, ops: OpCounter | None = None
) -> tuple[np.ndarray, float]:
    """Exact shortest nonzero lattice vector.

    Returns integer coordinates (with respect to the given basis) and the
    minimum norm. The sign is canonicalized to the lexicographically smaller
    of the two antipodal witnesses.
    """
    budget = budget or EnumBudget()
    b = np.asarray(basis, dtype=float)
    n = b.shape[1]
    _check_dimension(n, budget)
    red = lll_reduce(b, _ORACLE_PARAMS, ops=ops)
    _, r = qr_decompose(red.reduced, ops=ops)
    r_rows = r.tolist()
    bound2 = r_rows[0][0] ** 2 * (1.0 + 1e-9)
    best, d2, nodes = _zigzag_search(
        r_rows,
        [0.0] * n,
        bound2,
        exclude_zero=True,
        max_nodes=budget.max_nodes,
    )
    if ops is not None:
        ops.add(nodes * n)
    coords = red.u @ np.asarray(best, dtype=np.int64)
    if tuple(-coords) < tuple(coords):
        coords = -coords
    return coords, float(np.sqrt(d2))


def closest_vector(
    basis: np.ndarray,
    target: np.ndarray,
    budget: EnumBudget | None = None,
    ops: OpCounter | None = None,
) -> tuple[np.ndarray, float]:
    """Exact closest lattice point to ``target``.

    Ties are broken by lexicographic order of the coordinate vector.
    Returns integer coordinates and the exact distance (including any
    component of ``target`` outside the lattice span).
    """
    budget = budget or EnumBudget()
    b = np.asarray(basis, dtype=float)
    y = np.asarray(target, dtype=float)
    n = b.shape[1]
    _check_dimension(n, budget)
    red = lll_reduce(b, _ORACLE_PARAMS, ops=ops)
    q, r = qr_decompose(red.reduced, ops=ops)
    y_r = q.T @ y
    out_of_span = y - q @ y_r
    perp2 = float(out_of_span @ out_of_span)
    r_rows = r.tolist()
    y_list = y_r.tolist()

    # seed with the nearest-plane point for a tight initial radius
    seed = [0] * n
    for i in range(n - 1, -1, -1):
        s = y_list[i] - sum(r_rows[i][j] * seed[j] for j in range(i + 1, n))
        seed[i] = iround(s / r_rows[i][i])
    seed_d2 = 0.0
    for i in range(n):
        w = y_list[i] - sum(r_rows[i][j] * seed[j] for j in range(i, n))
        seed_d2 += w * w

    u_rows = red.u.tolist()

    def lex_key(x):
        return tuple(
            sum(u_rows[i][j] * x[j] for j in range(n)) for i in range(len(u_rows))
        )

    best, d2, nodes = _zigzag_search(
        r_rows,
        y_list,
        seed_d2,
        exclude_zero=False,
        max_nodes=budget.max_nodes,
        seed=seed,
        lex_key=lex_key,
    )
    if ops is not None:
        ops.add(nodes * n)
    coords = red.u @ np.asarray(best, dtype=np.int64)
    return coords, float(np.sqrt(d2 + perp2))


def first_two_minima(
    basis: np.ndarray, budget: EnumBudget | None = None
) -> MinimaReport:
    """Exact first and second successive minima with witness vectors.

    ``lambda2`` is the smallest norm among lattice vectors linearly
    independent of the shortest one.
    """
    budget = budget or EnumBudget()
    b = np.asarray(basis, dtype=float)
    n = b.shape[1]
    if n < 2:
        raise ValueError("successive minima need dimension >= 2")
    _check_dimension(n, budget)
    red = lll_reduce(b, _ORACLE_PARAMS)
    _, r = qr_decompose(red.reduced)
    r_rows = r.tolist()
    # the first two reduced vectors witness lambda1 and lambda2
    b2_norm2 = r_rows[0][1] ** 2 + r_rows[1][1] ** 2
    bound2 = max(r_rows[0][0] ** 2, b2_norm2) * (1.0 + 1e-9) + 1e-12

    found: list[tuple[float, tuple[int, ...]]] = []
    _zigzag_search(
        r_rows,
        [0.0] * n,
        bound2,
        exclude_zero=True,
        max_nodes=budget.max_nodes,
        collect=lambda x, d2: found.append((d2, x)),
    )
    found.sort(key=lambda item: (item[0], item[1]))
    d1, v1 = found[0]
    eps = 1e-9 * (1.0 + d1)

    def parallel(a: tuple[int, ...], v: tuple[int, ...]) -> bool:
        for i in range(n):
            for j in range(i + 1, n):
                if a[i] * v[j] != a[j] * v[i]:
                    return False
        return True

    second = next((item for item in found if not parallel(item[1], v1)), None)
    if second is None:
        raise BudgetExceededError("no independent vector found within search radius")
    d2, v2 = second
    if d2 < d1 - eps:  # cannot happen on a sorted list; defensive
        raise AssertionError("minima out of order")
    u = red.u
    return MinimaReport(
        lambda1=float(np.sqrt(d1)),
        lambda2=float(np.sqrt(d2)),
        v1=u @ np.asarray(v1, dtype=np.int64),
        v2=u @ np.asarray(v2, dtype=np.int64),
    )


def ml_decode_finite(
    basis: np.ndarray,
    target: np.ndarray,
    alphabet,
    budget: EnumBudget | None = None,
    ops: OpCounter | None = None,
) -> np.ndarray:
    """Exact constrained minimizer of ``||y - B x||`` over x in A^n.

    ``alphabet`` is the finite integer set allowed in every coordinate. The
    search runs on the given basis directly (no reduction, which would break
    the box constraint), seeded by the alphabet-clamped nearest-plane point.
    Ties are broken lexicographically.
    """
    budget = budget or EnumBudget()
    a_sorted = sorted({int(v) for v in alphabet})
    if not a_sorted:
        raise ValueError("alphabet must be nonempty")
    b = np.asarray(basis, dtype=float)
    y = np.asarray(target, dtype=float)
    n = b.shape[1]
    _check_dimension(n, budget)
    q, r = qr_decompose(b, ops=ops)
    y_r = (q.T @ y).tolist()
    r_rows = r.tolist()
    lo, hi = a_sorted[0], a_sorted[-1]

    # clamped nearest-plane seed
    seed = [0] * n
    for i in range(n - 1, -1, -1):
        s = y_r[i] - sum(r_rows[i][j] * seed[j] for j in range(i + 1, n))
        seed[i] = min(max(iround(s / r_rows[i][i]), lo), hi)
    seed_d2 = 0.0
    for i in range(n):
        w = y_r[i] - sum(r_rows[i][j] * seed[j] for j in range(i, n))
        seed_d2 += w * w

    best = seed[:]
    best_d2 = seed_d2
    tie_eps = 1e-9 * (1.0 + best_d2)

    x = [0] * n
    order: list[list[int]] = [a_sorted] * n
    idx = [0] * n
    dist = [0.0] * n
    e = [y_r[:] for _ in range(n)]

    def enter_level(k: int) -> None:
        center = e[k][k]
        rkk = r_rows[k][k]
        order[k] = sorted(a_sorted, key=lambda a: (abs(center - a * rkk), a))
        idx[k] = 0

    k = n - 1
    enter_level(k)
    nodes = 0
    while True:
        if idx[k] >= len(a_sorted):
            if k == n - 1:
                break
            k += 1
            idx[k] += 1
            continue
        nodes += 1
        if nodes > budget.max_nodes:
            raise BudgetExceededError(f"enumeration exceeded {budget.max_nodes} nodes")
        x[k] = order[k][idx[k]]
        w = e[k][k] - x[k] * r_rows[k][k]
        d = dist[k] + w * w
        if d > best_d2 + tie_eps:
            # candidates at this level are ordered by deviation: prune level
            if k == n - 1:
                break
            k += 1
            idx[k] += 1
            continue
        if k > 0:
            ek = e[k]
            ek1 = e[k - 1]
            xk = x[k]
            for j in range(k):
                ek1[j] = ek[j] - xk * r_rows[j][k]
            k -= 1
            dist[k] = d
            enter_level(k)
            continue
        # leaf
        if d < best_d2 - tie_eps:
            best = x[:]
            best_d2 = d
            tie_eps = 1e-9 * (1.0 + best_d2)
        elif d <= best_d2 + tie_eps and tuple(x) < tuple(best):
            best = x[:]
            if d < best_d2:
                best_d2 = d
        idx[0] += 1
    if ops is not None:
        ops.add(nodes * n)
    return np.asarray(best, dtype=np.int64)

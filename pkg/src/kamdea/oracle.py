"""Brute-force reference for small KAM programs, plus seeded random data.

The oracle never solves an LP. It enumerates intensity vectors on the grid
``{c / N : c a composition of N into n parts}`` of the unit simplex, derives
the slacks from the KAM equalities, and keeps the best feasible objective.

Gap bound. Every point of the simplex has a grid point within L1 distance
``D = n h`` (``h = 1/N``). For a linear function ``a . lam`` and a zero-sum
displacement ``d``, ``|a . d| <= (max a - min a) / 2 * |d|_1``. So the grid
point next to the true optimum violates each constraint by at most
``tau = range(a) / 2 * D`` and loses at most ``range(g) / 2 * D`` of
objective, where ``g`` is the objective gradient in lambda. Scanning with
constraints widened by ``tau`` therefore yields an upper bound on the true
optimum, and ``bound`` is the distance from that upper bound to the best
strictly feasible grid value.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from . import _kernels
from .dataset import Dataset

FEASIBILITY_TOL = 1e-9
DEFAULT_MAX_POINTS = 10_000_000


class OracleInfeasibleError(RuntimeError):
    """No grid point is feasible at this resolution; refine and retry."""

    def __init__(self, resolution: float):
        super().__init__(f"no feasible grid point at resolution {resolution:g}")
        self.resolution = resolution


@dataclass(frozen=True, eq=False)
class OracleResult:
    best_objective: float
    best_lambda: np.ndarray
    resolution: float
    bound: float
    relaxed_objective: float
    grid_points: int
    feasible_points: int

    @property
    def upper_bound(self) -> float:
        return self.best_objective + self.bound


def grid_size(n: int, divisions: int) -> int:
    return comb(divisions + n - 1, n - 1)


def default_resolution(n: int, max_points: int = DEFAULT_MAX_POINTS) -> float:
    """Finest step up to 1e-3 whose simplex grid stays within ``max_points``."""
    if n == 1:
        return 1.0
    N = 1000
    while N > 1 and grid_size(n, N) > max_points:
        N -= 1 if N <= 100 else max(1, N // 50)
    return 1.0 / N


def _spread(a: np.ndarray) -> float:
    return float(a.max() - a.min()) if a.size else 0.0


def oracle_evaluate(
    d: Dataset,
    l: int,
    eps_in,
    eps_out,
    w_in,
    w_out,
    resolution: float | None = None,
    *,
    backend: str | None = None,
) -> OracleResult:
    n = d.n
    if resolution is None:
        resolution = default_resolution(n)
    if not resolution > 0:
        raise ValueError(f"resolution must be > 0, got {resolution}")
    N = max(1, int(round(1.0 / resolution)))
    h = 1.0 / N

    X = np.ascontiguousarray(d.inputs, dtype=float)
    Y = np.ascontiguousarray(d.outputs, dtype=float)
    xl = X[l].copy()
    yl = Y[l].copy()
    em, ep, wm, wp = (np.ascontiguousarray(v, dtype=float) for v in (eps_in, eps_out, w_in, w_out))

    reach = n * h if n > 1 else 0.0
    tau_in = np.array([_spread(X[:, j]) / 2 * reach for j in range(d.m)])
    tau_out = np.array([_spread(Y[:, k]) / 2 * reach for k in range(d.p)])
    slope = Y @ wp - X @ wm
    obj_slack = _spread(slope) / 2 * reach

    best, counts, relaxed, n_feas = _kernels.grid_scan(
        X, Y, xl, yl, em, ep, wm, wp, N, tau_in, tau_out, FEASIBILITY_TOL, backend=backend
    )
    if n_feas == 0:
        raise OracleInfeasibleError(h)
    bound = max(0.0, float(relaxed) + obj_slack - float(best))
    return OracleResult(
        best_objective=float(best),
        best_lambda=np.asarray(counts, dtype=float) / N,
        resolution=h,
        bound=bound,
        relaxed_objective=float(relaxed),
        grid_points=grid_size(n, N),
        feasible_points=int(n_feas),
    )


def random_instance(seed: int, n: int, m: int, p: int, low: float = 0.5, high: float = 10.5) -> Dataset:
    """Dataset with entries drawn uniformly from ``[low, high]``; deterministic in ``seed``."""
    if min(n, m, p) < 1:
        raise ValueError(f"need n, m, p >= 1, got {n}, {m}, {p}")
    rng = np.random.default_rng(seed)
    x = rng.uniform(low, high, size=(n, m))
    y = rng.uniform(low, high, size=(n, p))
    return Dataset(
        tuple(f"D{i + 1}" for i in range(n)),
        x,
        y,
        tuple(f"x{j + 1}" for j in range(m)),
        tuple(f"y{k + 1}" for k in range(p)),
    )

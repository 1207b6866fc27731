"""Dense two-phase primal simplex for small maximization problems.

    maximize    c . x
    subject to  A_eq x  = b_eq
                A_ge x >= b_ge
                x >= 0

Pivoting follows Bland's rule (lowest-index entering column, lowest-index
basic variable among tied ratios), so a given program always produces the
same pivot sequence and therefore the same optimum.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

log = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-9
OPTIMALITY_TOL = 1e-9


class LpStatus(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"


class LpContractError(ValueError):
    """Malformed program: wrong dimensions or non-finite coefficients."""


class SolverError(RuntimeError):
    """The simplex loop hit its iteration cap."""


@dataclass(frozen=True)
class LinearProgram:
    num_vars: int
    objective: np.ndarray
    eq_constraints: list = field(default_factory=list)
    ge_constraints: list = field(default_factory=list)

    def check(self):
        c = np.asarray(self.objective, dtype=float)
        if c.shape != (self.num_vars,):
            raise LpContractError(
                f"objective has shape {c.shape}, expected ({self.num_vars},)"
            )
        if not np.all(np.isfinite(c)):
            raise LpContractError("objective has non-finite entries")
        for kind, rows in (("equality", self.eq_constraints), ("inequality", self.ge_constraints)):
            for r, (coef, rhs) in enumerate(rows):
                a = np.asarray(coef, dtype=float)
                if a.shape != (self.num_vars,):
                    raise LpContractError(
                        f"{kind} constraint {r} has {a.size} coefficients, expected {self.num_vars}"
                    )
                if not (np.all(np.isfinite(a)) and np.isfinite(rhs)):
                    raise LpContractError(f"{kind} constraint {r} has non-finite entries")

    def matrices(self):
        """Return ``(c, A_eq, b_eq, A_ge, b_ge)`` as float arrays."""
        n = self.num_vars

        def stack(rows):
            if not rows:
                return np.zeros((0, n)), np.zeros(0)
            return (
                np.array([np.asarray(a, dtype=float) for a, _ in rows]),
                np.array([float(b) for _, b in rows]),
            )

        A_eq, b_eq = stack(self.eq_constraints)
        A_ge, b_ge = stack(self.ge_constraints)
        return np.asarray(self.objective, dtype=float), A_eq, b_eq, A_ge, b_ge


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    values: np.ndarray
    objective_value: float
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _reduced_cost_row(T, basis, cost):
    # cost has one entry per tableau column (rhs entry 0)
    m = T.shape[0] - 1
    T[m] = cost[basis] @ T[:m] - cost


def solve(lp: LinearProgram, *, backend: str | None = None) -> LpOutcome:
    """Solve ``lp`` with the two-phase simplex method.

    ``backend`` selects the kernel implementation (``"numba"`` or
    ``"numpy"``); the default follows ``KAMDEA_DISABLE_NUMBA``.
    """
    lp.check()
    c, A_eq, b_eq, A_ge, b_ge = lp.matrices()
    n = lp.num_vars
    n_eq, n_ge = A_eq.shape[0], A_ge.shape[0]
    m = n_eq + n_ge

    if m == 0:
        if np.any(c > OPTIMALITY_TOL):
            return LpOutcome(LpStatus.UNBOUNDED, np.zeros(n), float("inf"))
        return LpOutcome(LpStatus.OPTIMAL, np.zeros(n), 0.0)

    A = np.vstack([A_eq, A_ge])
    b = np.concatenate([b_eq, b_ge])

    # row equilibration; the surplus columns added below are not scaled
    scale = np.abs(A).max(axis=1)
    scale[scale == 0] = 1.0
    A = A / scale[:, None]
    b = b / scale

    sign = np.where(b < 0, -1.0, 1.0)
    A *= sign[:, None]
    b *= sign

    # surplus variable t_r for each >= row: a.x - t_r = b
    S = np.zeros((m, n_ge))
    S[n_eq + np.arange(n_ge), np.arange(n_ge)] = -sign[n_eq:]

    n_struct = n + n_ge
    basis = np.full(m, -1, dtype=np.int64)
    for r in range(n_eq, m):
        if S[r, r - n_eq] == 1.0:
            basis[r] = n + (r - n_eq)
    art_rows = np.flatnonzero(basis < 0)
    n_art = art_rows.size
    basis[art_rows] = n_struct + np.arange(n_art)

    ncol = n_struct + n_art
    T = np.zeros((m + 1, ncol + 1))
    T[:m, :n] = A
    T[:m, n:n_struct] = S
    T[art_rows, n_struct + np.arange(n_art)] = 1.0
    T[:m, -1] = b

    max_iter = 50 * (m + ncol) + 1000
    iters = 0
    feas_scale = max(1.0, float(np.abs(b).max()))

    if n_art:
        cost1 = np.zeros(ncol + 1)
        cost1[n_struct:ncol] = -1.0
        _reduced_cost_row(T, basis, cost1)
        status, it = _kernels.simplex_loop(
            T, basis, n_struct, OPTIMALITY_TOL, max_iter, backend=backend
        )
        iters += it
        if status == _kernels.ITERATION_LIMIT:
            raise SolverError(f"phase 1 exceeded {max_iter} iterations")
        if T[m, -1] < -FEASIBILITY_TOL * feas_scale:
            log.debug("phase 1 residual %.3e: infeasible", -T[m, -1])
            return LpOutcome(LpStatus.INFEASIBLE, np.zeros(n), float("nan"), iters)

        # drive zero-level artificials out of the basis; drop redundant rows
        keep = np.ones(m + 1, dtype=bool)
        for r in range(m):
            if basis[r] < n_struct:
                continue
            mags = np.abs(T[r, :n_struct])
            j = int(np.argmax(mags))
            if mags[j] > OPTIMALITY_TOL:
                _kernels.pivot_numpy(T, basis, r, j)
            else:
                keep[r] = False
        cols = np.r_[np.arange(n_struct), ncol]
        T = np.ascontiguousarray(T[np.ix_(keep, cols)])
        basis = basis[keep[:m]]
        m = basis.size

    cost2 = np.zeros(n_struct + 1)
    cost2[:n] = c
    _reduced_cost_row(T, basis, cost2)
    status, it = _kernels.simplex_loop(
        T, basis, n_struct, OPTIMALITY_TOL, max_iter, backend=backend
    )
    iters += it
    if status == _kernels.ITERATION_LIMIT:
        raise SolverError(f"phase 2 exceeded {max_iter} iterations")
    if status == _kernels.UNBOUNDED:
        return LpOutcome(LpStatus.UNBOUNDED, np.zeros(n), float("inf"), iters)

    x = np.zeros(n_struct)
    x[basis] = T[:m, -1]
    values = x[:n] + 0.0  # normalizes -0.0
    return LpOutcome(LpStatus.OPTIMAL, values, float(c @ values), iters)

"""Hot numeric kernels.

Two implementations exist for each kernel: explicit loops compiled with
``numba.njit`` and a vectorized pure-numpy version. The compiled path is used
when numba imports and the environment variable ``KAMDEA_DISABLE_NUMBA`` is not
set to a truthy value. Both paths implement the same pivot rule and the same
grid order, so they agree up to floating-point summation order.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

_TRUTHY = {"1", "true", "yes", "on"}

NUMBA_AVAILABLE = numba is not None
NUMBA_ENABLED = NUMBA_AVAILABLE and (
    os.environ.get("KAMDEA_DISABLE_NUMBA", "").strip().lower() not in _TRUTHY
)

# simplex_loop status codes
OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2

# ratios within this of the minimum count as tied (Bland tie-break applies)
RATIO_TIE = 1e-12


# --------------------------------------------------------------------------
# simplex iteration
# --------------------------------------------------------------------------

def _pivot_loops(T, basis, row, col):
    nrow, ncol = T.shape
    p = T[row, col]
    for j in range(ncol):
        T[row, j] /= p
    T[row, col] = 1.0
    for i in range(nrow):
        if i == row:
            continue
        f = T[i, col]
        if f != 0.0:
            for j in range(ncol):
                T[i, j] -= f * T[row, j]
            T[i, col] = 0.0
    basis[row] = col


def _simplex_loop_loops(T, basis, n_enter, tol, max_iter):
    m = T.shape[0] - 1
    rhs = T.shape[1] - 1
    it = 0
    while it < max_iter:
        # Bland: lowest-index improving column
        col = -1
        for j in range(n_enter):
            if T[m, j] < -tol:
                col = j
                break
        if col == -1:
            return OPTIMAL, it

        best = np.inf
        for i in range(m):
            a = T[i, col]
            if a > tol:
                r = max(T[i, rhs], 0.0) / a
                if r < best:
                    best = r
        if best == np.inf:
            return UNBOUNDED, it

        row = -1
        for i in range(m):
            a = T[i, col]
            if a > tol:
                r = max(T[i, rhs], 0.0) / a
                if r <= best + RATIO_TIE and (row == -1 or basis[i] < basis[row]):
                    row = i

        _pivot_kernel(T, basis, row, col)
        it += 1
    return ITERATION_LIMIT, it


if NUMBA_AVAILABLE:
    _pivot_kernel = numba.njit(cache=True, nogil=True)(_pivot_loops)
else:  # pragma: no cover
    _pivot_kernel = _pivot_loops


def pivot_numpy(T, basis, row, col):
    """Gauss-Jordan pivot on ``T[row, col]`` in place."""
    T[row] /= T[row, col]
    T[row, col] = 1.0
    f = T[:, col].copy()
    f[row] = 0.0
    nz = np.flatnonzero(f)
    if nz.size:
        T[nz] -= np.outer(f[nz], T[row])
        T[nz, col] = 0.0
    basis[row] = col


def simplex_loop_numpy(T, basis, n_enter, tol, max_iter):
    """Primal simplex iterations on tableau ``T`` (vectorized).

    ``T`` holds the constraint rows followed by one reduced-cost row; the last
    column is the right-hand side. Only columns ``< n_enter`` may enter.
    Returns ``(status, iterations)``; ``T`` and ``basis`` are updated in place.
    """
    m = T.shape[0] - 1
    it = 0
    while it < max_iter:
        improving = np.flatnonzero(T[m, :n_enter] < -tol)
        if improving.size == 0:
            return OPTIMAL, it
        col = improving[0]

        a = T[:m, col]
        cand = np.flatnonzero(a > tol)
        if cand.size == 0:
            return UNBOUNDED, it
        ratios = np.maximum(T[cand, -1], 0.0) / a[cand]
        best = ratios.min()
        tied = cand[ratios <= best + RATIO_TIE]
        row = tied[np.argmin(basis[tied])]

        pivot_numpy(T, basis, row, col)
        it += 1
    return ITERATION_LIMIT, it


# --------------------------------------------------------------------------
# oracle grid scan
# --------------------------------------------------------------------------
#
# Scans every lambda = c / N on the simplex grid (c a composition of N into n
# nonnegative parts). For each grid point the KAM slacks are implied by the
# equality constraints; the scan tracks the best objective among points that
# are feasible within ``feas_tol`` and, separately, among points feasible
# within the widened per-factor tolerances ``tau_in``/``tau_out``.

def _grid_scan_loops(X, Y, xl, yl, em, ep, wm, wp, N, tau_in, tau_out, feas_tol):
    n, m = X.shape
    p = Y.shape[1]
    counts = np.zeros(n, dtype=np.int64)
    best_counts = np.zeros(n, dtype=np.int64)
    best = -np.inf
    relaxed = -np.inf
    n_feasible = 0
    s = 0
    while True:
        counts[n - 1] = N - s
        obj = 0.0
        strict = True
        loose = True
        for j in range(m):
            acc = 0.0
            for i in range(n):
                acc += counts[i] * X[i, j]
            sm = xl[j] + em[j] - acc / N
            obj += wm[j] * sm
            viol = max(-sm, sm - xl[j])
            if viol > feas_tol:
                strict = False
                if viol > feas_tol + tau_in[j]:
                    loose = False
        for k in range(p):
            acc = 0.0
            for i in range(n):
                acc += counts[i] * Y[i, k]
            sp = acc / N - yl[k] + ep[k]
            obj += wp[k] * sp
            viol = max(-sp, 2.0 * ep[k] - yl[k] - sp)
            if viol > feas_tol:
                strict = False
                if viol > feas_tol + tau_out[k]:
                    loose = False
        if strict:
            n_feasible += 1
            if obj > best:
                best = obj
                for i in range(n):
                    best_counts[i] = counts[i]
        if loose and obj > relaxed:
            relaxed = obj

        # odometer over counts[0..n-2], counts[0] fastest
        i = 0
        while i < n - 1:
            if s < N:
                counts[i] += 1
                s += 1
                break
            s -= counts[i]
            counts[i] = 0
            i += 1
        if i == n - 1:
            break
    return best, best_counts, relaxed, n_feasible


def compositions(total, parts):
    """All compositions of ``total`` into ``parts`` nonnegative integers.

    Rows are in odometer order with the first coordinate varying fastest,
    matching the compiled scan.
    """
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    # build the free coordinates from the slowest (last free) one inward
    rows = np.arange(total + 1, dtype=np.int64)[:, None]
    for _ in range(parts - 2):
        used = rows.sum(axis=1)
        cnt = total - used + 1
        rep = np.repeat(rows, cnt, axis=0)
        start = np.repeat(np.cumsum(cnt) - cnt, cnt)
        inner = np.arange(cnt.sum(), dtype=np.int64) - start
        rows = np.hstack([inner[:, None], rep])
    last = total - rows.sum(axis=1)
    return np.hstack([rows, last[:, None]])


def _grid_chunks(N, n):
    if n == 1:
        yield np.array([[N]], dtype=np.int64)
        return
    for a in range(N + 1):
        # coordinate n-2 fixed at a; coordinates 0..n-3 and n-1 share the rest
        rest = compositions(N - a, n - 1)
        block = np.empty((rest.shape[0], n), dtype=np.int64)
        block[:, : n - 2] = rest[:, : n - 2]
        block[:, n - 2] = a
        block[:, n - 1] = rest[:, n - 2]
        yield block


def grid_scan_numpy(X, Y, xl, yl, em, ep, wm, wp, N, tau_in, tau_out, feas_tol):
    """Vectorized grid scan, chunked on the slowest free coordinate."""
    n = X.shape[0]
    best = -np.inf
    best_counts = np.zeros(n, dtype=np.int64)
    relaxed = -np.inf
    n_feasible = 0
    for C in _grid_chunks(N, n):
        lam = C / N
        sm = xl + em - lam @ X
        sp = lam @ Y - yl + ep
        obj = sm @ wm + sp @ wp
        viol_in = np.maximum(-sm, sm - xl)
        viol_out = np.maximum(-sp, 2.0 * ep - yl - sp)
        strict = np.all(viol_in <= feas_tol, axis=1) & np.all(viol_out <= feas_tol, axis=1)
        loose = np.all(viol_in <= feas_tol + tau_in, axis=1) & np.all(
            viol_out <= feas_tol + tau_out, axis=1
        )
        if strict.any():
            n_feasible += int(strict.sum())
            idx = np.flatnonzero(strict)
            k = idx[np.argmax(obj[idx])]
            if obj[k] > best:
                best = float(obj[k])
                best_counts = C[k].copy()
        if loose.any():
            relaxed = max(relaxed, float(obj[loose].max()))
    return best, best_counts, relaxed, n_feasible


if NUMBA_AVAILABLE:
    pivot_numba = _pivot_kernel
    simplex_loop_numba = numba.njit(cache=True, nogil=True)(_simplex_loop_loops)
    grid_scan_numba = numba.njit(cache=True, nogil=True)(_grid_scan_loops)
else:  # pragma: no cover
    pivot_numba = None
    simplex_loop_numba = None
    grid_scan_numba = None


def get_backend(name: str | None = None) -> str:
    """Resolve a backend name; ``None`` means the environment default."""
    if name is None:
        return "numba" if NUMBA_ENABLED else "numpy"
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend requested but numba is not installed")
    return name


def simplex_loop(T, basis, n_enter, tol, max_iter, backend=None):
    if get_backend(backend) == "numba":
        return simplex_loop_numba(T, basis, n_enter, tol, max_iter)
    return simplex_loop_numpy(T, basis, n_enter, tol, max_iter)


def grid_scan(X, Y, xl, yl, em, ep, wm, wp, N, tau_in, tau_out, feas_tol, backend=None):
    if get_backend(backend) == "numba":
        return grid_scan_numba(X, Y, xl, yl, em, ep, wm, wp, N, tau_in, tau_out, feas_tol)
    return grid_scan_numpy(X, Y, xl, yl, em, ep, wm, wp, N, tau_in, tau_out, feas_tol)

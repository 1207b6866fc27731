import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kamdea.kam_core import build_kam_lp
from kamdea.lp_solver import LinearProgram, LpContractError, LpStatus, solve
from kamdea.oracle import oracle_evaluate

from conftest import random_lp_arrays

scipy_optimize = pytest.importorskip("scipy.optimize")


def _lp(c, A_eq=(), b_eq=(), A_ge=(), b_ge=()):
    c = np.asarray(c, dtype=float)
    return LinearProgram(
        c.size,
        c,
        [(np.asarray(a, float), b) for a, b in zip(A_eq, b_eq)],
        [(np.asarray(a, float), b) for a, b in zip(A_ge, b_ge)],
    )


def _max_violation(lp, x):
    c, A_eq, b_eq, A_ge, b_ge = lp.matrices()
    v = [0.0, float(np.max(-x, initial=0.0))]
    if A_eq.size:
        v.append(float(np.abs(A_eq @ x - b_eq).max()))
    if A_ge.size:
        v.append(float(np.max(b_ge - A_ge @ x, initial=0.0)))
    return max(v)


def test_one_variable_bound(backend):
    out = solve(_lp([1, 0], [[1, 1]], [5]), backend=backend)
    assert out.status is LpStatus.OPTIMAL
    assert out.objective_value == 5.0
    np.testing.assert_array_equal(out.values, [5.0, 0.0])


def test_infeasible_negative_equality(backend):
    out = solve(_lp([1], [[1]], [-1]), backend=backend)
    assert out.status is LpStatus.INFEASIBLE


def test_infeasible_conflicting_rows(backend):
    out = solve(_lp([1, 1], [[1, 1]], [1], [[1, 1]], [2]), backend=backend)
    assert out.status is LpStatus.INFEASIBLE


def test_unbounded(backend):
    out = solve(_lp([1, 0], A_ge=[[1, -1]], b_ge=[1]), backend=backend)
    assert out.status is LpStatus.UNBOUNDED


def test_no_constraints():
    assert solve(_lp([-1, 0])).objective_value == 0.0
    assert solve(_lp([1, 0])).status is LpStatus.UNBOUNDED


def test_redundant_equalities(backend):
    # second row duplicates the first; phase 1 leaves a zero artificial to drop
    out = solve(_lp([1, 2], [[1, 1], [2, 2]], [3, 6]), backend=backend)
    assert out.status is LpStatus.OPTIMAL
    assert out.objective_value == pytest.approx(6.0, abs=1e-12)


def test_beale_cycling_example(backend):
    # cycles under the largest-coefficient rule; Bland's rule must terminate
    c = [0.75, -20, 0.5, -6]
    A_ge = [[-0.25, 8, 1, -9], [-0.5, 12, 0.5, -3], [0, 0, -1, 0]]
    b_ge = [0, 0, -1]
    out = solve(_lp(c, A_ge=A_ge, b_ge=b_ge), backend=backend)
    assert out.status is LpStatus.OPTIMAL
    assert out.objective_value == pytest.approx(1.25, abs=1e-12)


def test_dimension_mismatch():
    with pytest.raises(LpContractError):
        solve(LinearProgram(2, np.array([1.0, 0.0]), [(np.array([1.0]), 1.0)]))
    with pytest.raises(LpContractError):
        solve(LinearProgram(3, np.array([1.0, 0.0]), []))


def test_non_finite_rejected():
    with pytest.raises(LpContractError):
        solve(_lp([1.0], [[np.nan]], [1.0]))


def test_kam_example_program(ab, backend):
    """Program for DMU A, unit weights, eps_out = (0.5, 0.5).

    Hand reduction: lam_A = 1 - lam_B, s_in = 0, s1 = 0.5 + 6 lam_B,
    s2 = 0.5 - lam_B >= 0, objective 1 + 5 lam_B, best at lam_B = 0.5.
    """
    lp = build_kam_lp(ab, 0, [0.0], [0.5, 0.5], [1.0], [1.0, 1.0])
    out = solve(lp, backend=backend)
    assert out.status is LpStatus.OPTIMAL
    assert out.objective_value == pytest.approx(3.5, abs=1e-12)
    np.testing.assert_allclose(out.values, [0.5, 0.5, 0.0, 3.5, 0.0], atol=1e-12)
    # independent confirmation from the grid oracle (optimum lies on-grid)
    ref = oracle_evaluate(ab, 0, [0.0], [0.5, 0.5], [1.0], [1.0, 1.0], 0.01)
    assert ref.best_objective == pytest.approx(3.5, abs=1e-12)


@given(
    seed=st.integers(0, 2**31 - 1),
    n_vars=st.integers(1, 8),
    n_eq=st.integers(0, 4),
    n_ge=st.integers(0, 4),
)
@settings(max_examples=150, deadline=None)
def test_matches_highs_on_random_feasible_bounded(seed, n_vars, n_eq, n_ge):
    rng = np.random.default_rng(seed)
    c, A_eq, b_eq, A_ge, b_ge = random_lp_arrays(rng, n_vars, n_eq, n_ge)
    # box row keeps the program bounded: sum(x) <= 10 + sum(x0)
    A_ge = np.vstack([A_ge, -np.ones(n_vars)])
    b_ge = np.append(b_ge, -(10.0 + 2.0 * n_vars))
    lp = _lp(c, A_eq, b_eq, A_ge, b_ge)
    out = solve(lp)
    ref = scipy_optimize.linprog(
        -c,
        A_ub=-A_ge,
        b_ub=-b_ge,
        A_eq=A_eq if n_eq else None,
        b_eq=b_eq if n_eq else None,
        bounds=[(0, None)] * n_vars,
        method="highs",
    )
    assert ref.status == 0
    assert out.status is LpStatus.OPTIMAL
    assert out.objective_value == pytest.approx(-ref.fun, rel=1e-7, abs=1e-7)
    assert _max_violation(lp, out.values) <= 1e-9 * max(1.0, np.abs(lp.matrices()[2]).max(initial=1.0))


@given(seed=st.integers(0, 2**31 - 1), n=st.integers(1, 5), m=st.integers(1, 3), p=st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_kam_programs_feasible_and_deterministic(seed, n, m, p):
    from kamdea.oracle import random_instance

    d = random_instance(seed, n, m, p)
    l = seed % n
    lp = build_kam_lp(d, l, 0.01 * d.inputs[l], 0.01 * d.outputs[l], 1 / d.inputs[l], 1 / d.outputs[l])
    a = solve(lp)
    b = solve(lp)
    assert a.status is LpStatus.OPTIMAL
    assert a.values.tobytes() == b.values.tobytes()
    assert a.objective_value == b.objective_value
    assert _max_violation(lp, a.values) <= 1e-9


@pytest.mark.skipif(len(__import__("conftest").BACKENDS) < 2, reason="numba not installed")
@given(seed=st.integers(0, 2**31 - 1), n_vars=st.integers(1, 8), n_eq=st.integers(0, 4), n_ge=st.integers(0, 4))
@settings(max_examples=80, deadline=None)
def test_backends_agree(seed, n_vars, n_eq, n_ge):
    rng = np.random.default_rng(seed)
    c, A_eq, b_eq, A_ge, b_ge = random_lp_arrays(rng, n_vars, n_eq, n_ge)
    A_ge = np.vstack([A_ge, -np.ones(n_vars)])
    b_ge = np.append(b_ge, -(10.0 + 2.0 * n_vars))
    lp = _lp(c, A_eq, b_eq, A_ge, b_ge)
    a = solve(lp, backend="numpy")
    b = solve(lp, backend="numba")
    assert a.status is b.status
    assert a.objective_value == pytest.approx(b.objective_value, abs=1e-9)

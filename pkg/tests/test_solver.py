import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semilab.domain import Interval, RadialBall, disk2d, torsion
from semilab.nonlinearity import catalog
from semilab.solver import (ConvergenceError, SolveConfig, compare_fields, residual_lambda_f, solve_minimal,
                            stability_eigenvalue, sweep_branch)

PLASMA1 = catalog("plasma_power", [1, -1])
EXP = catalog("exponential")


def plasma1_exact(x, lam):
    k = math.sqrt(-lam)
    # cosh(kx)/cosh(k) - 1 written without overflow
    return np.exp(k * (np.abs(x) - 1)) * (1 + np.exp(-2 * k * np.abs(x))) / (1 + math.exp(-2 * k)) - 1


def liouville_delta(lam):
    # larger root of -λ(δ-1)^2 = 8δ: the branch with u < 0
    a = -lam
    return ((2 * a + 8) + math.sqrt((2 * a + 8) ** 2 - 4 * a * a)) / (2 * a)


def liouville_exact(r, lam):
    d = liouville_delta(lam)
    return np.log(8 * d / (-lam * (d - r**2) ** 2))


def test_plasma_interval_centre_value():
    d = Interval(-1, 1, 2001)
    u = solve_minimal(PLASMA1, d, -100.0)
    assert u.values[1000] == pytest.approx(1 / math.cosh(10) - 1, abs=2e-6)
    assert u.converged and u.residual_norm <= 1e-9


def test_plasma_second_order():
    errs = []
    for n in (201, 401, 801):
        d = Interval(-1, 1, n)
        u = solve_minimal(PLASMA1, d, -100.0)
        errs.append(np.max(np.abs(u.values - plasma1_exact(d.coords, -100.0))))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert all(3.5 <= r <= 4.5 for r in ratios), ratios


def test_liouville_disk_matches_closed_form():
    errs = []
    for n in (201, 401):
        d = RadialBall(1.0, 2, n)
        u = solve_minimal(EXP, d, -1.0)
        errs.append(np.max(np.abs(u.values - liouville_exact(d.coords, -1.0))))
    assert errs[1] <= 1e-5
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_liouville_disk_2d_grid():
    d = disk2d(1.0, 1 / 64)
    u = solve_minimal(EXP, d, -1.0)
    assert np.max(np.abs(u.values - liouville_exact(d.radius(), -1.0))) <= 2e-4


def test_frozen_f_is_scaled_torsion():
    # f = 1 above t0 = -1; u = λ φ stays above -1 for λ = -1
    f = catalog("plasma_power", [0, -1])
    d = Interval(-1, 1, 401)
    u = solve_minimal(f, d, -1.0)
    assert np.max(np.abs(u.values + torsion(d).values)) <= 1e-12


def test_small_lambda_goes_to_zero():
    d = Interval(-1, 1, 401)
    sups = [np.max(np.abs(solve_minimal(EXP, d, lam).values)) for lam in (-1e-2, -1e-4, -1e-6)]
    assert sups[0] > sups[1] > sups[2] and sups[2] <= 1e-6


@pytest.mark.parametrize("lam", [0.0, 1.0])
def test_nonnegative_lambda_rejected(lam):
    with pytest.raises(ValueError):
        solve_minimal(EXP, Interval(), lam)


def test_residual_lambda_f_closed_form():
    d = Interval(-1, 1, 4001)
    for lam in (-10.0, -100.0, -1000.0):
        u = solve_minimal(PLASMA1, d, lam)
        k = math.sqrt(-lam)
        exact = -lam * math.cosh(k / 2) / math.cosh(k)
        assert residual_lambda_f(u, PLASMA1, 0.5) == pytest.approx(exact, rel=1e-3)


@pytest.mark.parametrize("name,params", [("plasma_power", [1, -1]), ("exponential", []), ("mems_inverse", [3])])
def test_residual_at_lambda_minus_one_bounded(name, params):
    f = catalog(name, params)
    u = solve_minimal(f, Interval(-1, 1, 401), -1.0)
    val = residual_lambda_f(u, f, 0.5)
    assert math.isfinite(val) and val <= float(f(0.0))


def test_liouville_negative_control():
    # t0 = -inf: λ e^u at the centre stays near 8 instead of vanishing
    d = RadialBall(1.0, 2, 8001)
    u = solve_minimal(EXP, d, -1e4)
    assert -1e4 * math.exp(u.values[0]) == pytest.approx(-8 / liouville_delta(-1e4), rel=1e-2)
    assert residual_lambda_f(u, EXP, 0.5) >= 7.0


def test_compare_with_itself():
    u = solve_minimal(PLASMA1, Interval(-1, 1, 201), -10.0)
    rep = compare_fields(u, u)
    assert rep.ordered and rep.min_gap == 0.0 and not rep.strict


def test_nested_domains_ordered():
    small = solve_minimal(PLASMA1, RadialBall(0.5, 3, 801), -50.0)
    big = solve_minimal(PLASMA1, RadialBall(1.0, 3, 1601), -50.0)
    rep = compare_fields(small, big, tol=0.0)
    assert rep.ordered and rep.strict


def test_lambda_ordering_same_domain():
    d = Interval(-1, 1, 401)
    u1 = solve_minimal(EXP, d, -10.0)
    u2 = solve_minimal(EXP, d, -20.0)
    assert compare_fields(u1, u2, tol=0.0).strict
    assert not compare_fields(u2, u1).ordered


def test_branch_monotone_and_liouville_centre():
    lams = [-1e2, -1e3, -1e4, -1e5, -1e6]
    rec = sweep_branch(EXP, RadialBall(1.0, 2, 20001), lams)
    assert not rec.truncated and rec.is_monotone() and rec.nodewise_monotone()
    centre = np.array([f.values[0] for f in rec.fields]) + np.log(-np.array(lams))
    exact = np.array([math.log(8 / liouville_delta(lam)) for lam in lams])
    assert np.max(np.abs(centre - exact)) <= 1e-6
    # the gap to log 8 closes like sqrt(8 / -λ)
    err = np.abs(centre - math.log(8))
    assert np.all(np.diff(err) < 0) and err[-1] == pytest.approx(math.sqrt(8e-6), rel=1e-2)


def test_plasma_branch_sup_decreases():
    d = Interval(-1, 1, 4001)
    rec = sweep_branch(PLASMA1, d, [-1e1, -1e2, -1e3, -1e4])
    K = np.abs(d.coords) <= 0.5
    sups = [np.max(np.abs(f.values[K] + 1)) for f in rec.fields]
    assert np.all(np.diff(sups) < 0)
    assert rec.is_monotone()


def test_uniqueness_from_random_starts():
    d = Interval(-1, 1, 201)
    lam = -30.0
    cfg = SolveConfig(continuation=True)
    ref = solve_minimal(PLASMA1, d, lam, cfg)
    rng = np.random.default_rng(7)
    lo = max(PLASMA1.t0, -1e3 * (1 + abs(lam)))
    for _ in range(20):
        guess = rng.uniform(lo, 0.0, d.n)
        u = solve_minimal(PLASMA1, d, lam, cfg, guess=guess)
        assert np.max(np.abs(u.values - ref.values)) <= 10 * cfg.newton_tol


def test_stability_eigenvalue_positive():
    d = Interval(-1, 1, 401)
    for f in (PLASMA1, EXP, catalog("mems_inverse", [3])):
        u = solve_minimal(f, d, -50.0)
        assert stability_eigenvalue(u, f) > 0
    # λ = 0 limit: the first Dirichlet eigenvalue of (-1, 1) is (π/2)^2
    u = solve_minimal(EXP, d, -1e-12)
    assert stability_eigenvalue(u, EXP) == pytest.approx((math.pi / 2) ** 2, rel=1e-4)


def test_no_continuation_failure_carries_best_iterate():
    cfg = SolveConfig(max_newton=1, continuation=False)
    with pytest.raises(ConvergenceError) as info:
        solve_minimal(EXP, Interval(-1, 1, 201), -1e4, cfg)
    assert info.value.best is not None


def test_bad_config():
    with pytest.raises(ValueError):
        SolveConfig(newton_tol=0)
    with pytest.raises(ValueError):
        SolveConfig(ratio=1.0)
    with pytest.raises(ValueError):
        sweep_branch(EXP, Interval(), [-1.0, -0.5])


@settings(max_examples=25)
@given(st.sampled_from([("plasma_power", [1, -1]), ("plasma_power", [2, -0.5]), ("plasma_power", [0.5, -1]),
                        ("exponential", []), ("mems_inverse", [3]), ("const_plus_exp", [1.0]),
                        ("log_power", [2.0, -0.1])]),
       st.floats(-1e4, -1e-3))
def test_strict_bounds(family, lam):
    f = catalog(*family)
    d = Interval(-1, 1, 201)
    u = solve_minimal(f, d, lam)
    ii = d.interior
    assert np.all(u.values[ii] < 0)
    assert np.all(u.values[d.boundary] == 0)
    if f.finite_threshold:
        gap = u.gap()[ii]
        if f.params.get("p", 1.0) >= 1:
            assert np.all(gap > 0)
        else:
            # f is not Lipschitz at t0: u may rest on t0 in a dead core, never below
            assert np.all(gap >= 0)


def test_sublinear_plasma_dead_core():
    f = catalog("plasma_power", [0.5, -1])
    d = Interval(-1, 1, 401)
    assert solve_minimal(f, d, -5.0).info["dead_core_nodes"] == 0
    u = solve_minimal(f, d, -100.0)
    core = d.interior & (100.0 * f.excess(u.gap()) <= 1e-10)
    assert u.info["dead_core_nodes"] == core.sum() > 0
    assert np.all(np.abs(d.coords[core]) < 0.8)
    assert np.max(u.gap()[core]) <= 1e-20

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semilab.asymptotics import FrameError, LimitProfile, energy, frame_for, robin_check_disk, verify_limit
from semilab.domain import Interval, RadialBall
from semilab.large import large_solve, shoot_entire
from semilab.nonlinearity import LimitNonlinearity, catalog, with_anchor
from semilab.solver import SolutionField, solve_minimal, sweep_branch

EXP = catalog("exponential")
PLASMA1 = catalog("plasma_power", [1, -1])


def liouville_delta(lam):
    a = -lam
    return ((2 * a + 8) + math.sqrt(32 * a + 64)) / (2 * a)


def liouville_energy(lam):
    """J of the closed-form disk solution with F = e^s: potential 8π/(δ-1), kinetic 8π(1/(δ-1) + log((δ-1)/δ))."""
    d = liouville_delta(lam)
    return 16 * math.pi / (d - 1) + 8 * math.pi * math.log((d - 1) / d)


# -- frames ---------------------------------------------------------------

def test_plasma_p2_frame():
    fr = frame_for(catalog("plasma_power", [2, -1]), -1e4)
    assert fr.regime == "large_solution"
    assert fr.alpha == pytest.approx(1e-4, rel=1e-12)


def test_plasma_p1_frame():
    d = Interval(-1, 1, 2001)
    u = solve_minimal(PLASMA1, d, -100.0)
    fr = frame_for(PLASMA1, -100.0, u)
    assert fr.regime == "entire_profile"
    assert fr.alpha == pytest.approx(1 / math.cosh(10), rel=1e-4)
    assert fr.eps == pytest.approx(0.1, rel=1e-12)
    assert fr.x_lambda == pytest.approx(0.0, abs=1e-12)


def test_liouville_frame():
    fr = frame_for(EXP, -1e6)
    assert fr.regime == "large_solution" and fr.alpha == 1.0
    assert fr.beta == pytest.approx(-6 * math.log(10), rel=1e-14)


@pytest.mark.parametrize("name,params,regime", [
    ("plasma_power", [2, -1], "large_solution"),
    ("plasma_power", [3, -0.5], "large_solution"),
    ("exponential", [], "large_solution"),
    ("power_exp", [2.0], "large_solution"),
    ("mems_inverse", [3], "bounded_limit"),
    ("const_plus_exp", [1.0], "torsion"),
])
def test_regime_dispatch(name, params, regime):
    assert frame_for(catalog(name, params), -1e3).regime == regime


@pytest.mark.parametrize("p", [0.5, 1.0])
def test_sublinear_plasma_is_entire_profile(p):
    f = catalog("plasma_power", [p, -1])
    u = solve_minimal(f, Interval(-1, 1, 401), -3.0)
    assert frame_for(f, -3.0, u).regime == "entire_profile"


def test_frame_errors():
    with pytest.raises(FrameError):
        frame_for(EXP, 1.0)
    with pytest.raises(FrameError):
        frame_for(PLASMA1, -10.0)        # entire profile needs the solution
    f = catalog("plasma_power", [0.5, -1])
    u = solve_minimal(f, Interval(-1, 1, 201), -100.0)
    with pytest.raises(FrameError):      # dead core: min u - t0 = 0
        frame_for(f, -100.0, u)


@given(st.floats(1.1, 6.0), st.floats(1.0, 12.0))
def test_power_frame_alpha(p, decades):
    lam = -(10.0**decades)
    fr = frame_for(catalog("plasma_power", {"p": p, "t0": -1.0}), lam)
    assert fr.alpha == pytest.approx((-lam) ** (-1 / (p - 1)), rel=1e-12)
    assert fr.beta == pytest.approx(-1 + fr.alpha, rel=1e-12)


@given(st.floats(0.5, 12.0))
def test_exponential_frame_scalar_equation(decades):
    # -λ = alpha(beta) / f(beta) solved for beta
    f = catalog("power_exp", [2.0])
    lam = -(10.0**decades)
    fr = frame_for(f, lam)
    b = fr.beta
    assert math.log(fr.alpha) - float(f.log_eval(b)) == pytest.approx(math.log(-lam), abs=1e-9)


def test_mems_frame_scale():
    fr = frame_for(catalog("mems_inverse", [3]), -1e8)
    s = fr.alpha
    # s (1 + s)^3 = -λ
    assert s * (1 + s) ** 3 == pytest.approx(1e8, rel=1e-10)
    assert fr.shift == pytest.approx(-1.0)


# -- verify_limit ---------------------------------------------------------

@pytest.fixture(scope="module")
def liouville_branch():
    lams = [-1e2, -1e3, -1e4, -1e5, -1e6]
    return sweep_branch(EXP, RadialBall(1.0, 2, 20001), lams)


def test_liouville_limit_rate(liouville_branch):
    fields = liouville_branch.fields
    frames = [frame_for(EXP, u.lam) for u in fields]
    prof = LimitProfile.closed_form(lambda r: np.log(8 / (1 - r**2) ** 2))
    mask = fields[0].domain.coords <= 0.8
    out = verify_limit(fields, frames, prof, mask=mask)
    errs = np.array([r["error_sup"] for r in out["rows"]])
    assert np.all(np.diff(errs) < 0)
    # closed form: the deviation is exactly sup_{r<=0.8} |log(δ/(δ - r^2)^2) - log(1/(1 - r^2)^2)|
    r = np.linspace(0, 0.8, 801)
    for lam, e in zip(liouville_branch.lambdas, errs):
        d = liouville_delta(lam)
        exact = np.max(np.abs(np.log(d / (d - r**2) ** 2) + 2 * np.log(1 - r**2)))
        assert e == pytest.approx(exact, abs=2e-5)
    assert out["slope"] == pytest.approx(-0.5, abs=0.05)


def test_torsion_limit():
    f = catalog("const_plus_exp", [1.0])
    d = Interval(-1, 1, 801)
    lams = [-1e1, -1e2, -1e3, -1e4]
    fields = [solve_minimal(f, d, lam) for lam in lams]
    frames = [frame_for(f, lam) for lam in lams]
    out = verify_limit(fields, frames, LimitProfile.torsion_profile())
    errs = [r["error_sup"] for r in out["rows"]]
    assert np.all(np.diff(errs) < 0) and errs[-1] <= 5e-3


def test_mems_bounded_limit():
    f = catalog("mems_inverse", [3])
    d = Interval(-1, 1, 4001)
    lams = [-1e2, -1e3, -1e4, -1e5, -1e6]
    fields = [solve_minimal(f, d, lam) for lam in lams]
    frames = [frame_for(f, lam) for lam in lams]
    prof = LimitProfile.closed_form(lambda x: -np.sqrt(np.clip(1 - x**2, 0, None)))
    out = verify_limit(fields, frames, prof, mask=np.abs(d.coords) <= 0.9)
    errs = [r["error_sup"] for r in out["rows"]]
    assert np.all(np.diff(errs) < 0) and errs[-1] <= 0.025


def test_plasma_p2_large_solution_limit():
    f = catalog("plasma_power", [2, -1])
    d = Interval(-1, 1, 4001)
    lams = [-1e3, -1e4, -1e5, -1e6]
    fields = [solve_minimal(f, d, lam) for lam in lams]
    frames = [frame_for(f, lam) for lam in lams]
    big = large_solve(LimitNonlinearity.power(2.0, shift=1.0), d)
    out = verify_limit(fields, frames, LimitProfile.from_blowup(big), mask=np.abs(d.coords) <= 0.5)
    errs = [r["error_sup"] for r in out["rows"]]
    # no rate is known a priori; the measured one is close to (-λ)^{-1/2}
    assert np.all(np.diff(errs) < 0)
    assert out["slope"] == pytest.approx(-0.5, abs=0.1)


def test_entire_profile_limit():
    d = Interval(-1, 1, 8001)
    lam = -1e4
    u = solve_minimal(PLASMA1, d, lam)
    fr = frame_for(PLASMA1, lam, u)
    prof = LimitProfile.from_entire(shoot_entire(1.0, 1, 4.0), y_max=3.0)
    out = verify_limit([u], [fr], prof)
    assert out["rows"][0]["error_sup"] <= 5e-3


def test_verify_limit_mismatch():
    u = solve_minimal(EXP, Interval(-1, 1, 101), -10.0)
    with pytest.raises(FrameError):
        verify_limit([u], [], LimitProfile.torsion_profile())
    with pytest.raises(FrameError):
        verify_limit([u], [frame_for(EXP, -20.0)], LimitProfile.torsion_profile())


# -- energy ---------------------------------------------------------------

def test_energy_zero_field():
    f = with_anchor(catalog("plasma_power", [1, -1]), 0.0)
    d = Interval(-1, 1, 101)
    z = SolutionField(d, np.zeros(d.n), lam=-5.0)
    assert energy(f, z).total == 0.0


def test_plasma_ball_energy():
    u = solve_minimal(PLASMA1, RadialBall(1.0, 3, 20001), -1e6)
    assert energy(PLASMA1, u).normalized == pytest.approx(2 * math.pi, rel=0.02)


@pytest.mark.parametrize("lam", [-1e2, -1e4, -1e6])
def test_liouville_energy_matches_closed_form(lam):
    u = solve_minimal(EXP, RadialBall(1.0, 2, 80001), lam)
    assert energy(EXP, u).total == pytest.approx(liouville_energy(lam), rel=1e-3)


def test_liouville_energy_limit_value():
    # J/sqrt(-λ) -> 16π/(2√2) = 4√2 π; the 2√2 π reading counts only the potential term
    vals = [liouville_energy(-(10.0**k)) / 10.0 ** (k / 2) for k in (8, 12, 16)]
    assert np.all(np.diff(vals) > 0)
    assert vals[-1] == pytest.approx(4 * math.sqrt(2) * math.pi, rel=1e-5)
    u = solve_minimal(EXP, RadialBall(1.0, 2, 80001), -1e6)
    rec = energy(EXP, u)
    assert rec.potential / math.sqrt(1e6) == pytest.approx(2 * math.sqrt(2) * math.pi, rel=0.01)
    assert rec.normalized == pytest.approx(4 * math.sqrt(2) * math.pi, rel=0.02)


def test_energy_is_minimal_among_perturbations():
    d = Interval(-1, 1, 801)
    f = with_anchor(EXP, 0.0)
    u = solve_minimal(f, d, -20.0)
    J0 = energy(f, u).total
    bump = np.where(d.interior, np.cos(np.pi * d.coords / 2), 0.0)
    for eps in (1e-2, -1e-2, 1e-1):
        v = SolutionField(d, u.values + eps * bump, lam=-20.0)
        assert energy(f, v).total > J0


# -- Robin function on the disk -------------------------------------------

def test_robin_disk():
    sol = large_solve(LimitNonlinearity.exponential(), RadialBall(1.0, 2, 2001))
    assert math.log(8) - 2 * math.log(0.75) == pytest.approx(2.6548, abs=1e-4)
    i = int(np.argmin(np.abs(sol.domain.coords - 0.5)))
    assert sol.values[i] == pytest.approx(2.6548, abs=1e-3)
    assert sol.values[0] == pytest.approx(math.log(8), abs=1e-5)
    assert robin_check_disk(sol) <= 1e-3


def test_robin_rejects_wrong_setup():
    with pytest.raises(FrameError):
        robin_check_disk(large_solve(LimitNonlinearity.power(2.0), RadialBall(1.0, 2, 201)))
    with pytest.raises(FrameError):
        robin_check_disk(large_solve(LimitNonlinearity.exponential(), RadialBall(1.0, 3, 201)))

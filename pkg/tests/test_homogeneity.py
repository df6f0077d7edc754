import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semilab.homogeneity import HomogeneityError, extract_g0, homogeneity_limit
from semilab.nonlinearity import catalog


def test_plasma_square_ratio_at_two():
    f = catalog("plasma_power", [2, -1])
    betas = -1 + np.geomspace(0.5, 1e-9, 8)
    tab = homogeneity_limit(f, lambda b: b + 1, [0.5, 1.0, 2.0], betas)
    # anchored ratio f(α t + t0)/f(β) at t = 2 is 2^2 at every β
    assert np.allclose(tab.anchored[:, 2], 4.0, rtol=1e-13)
    # the ratio around β itself is ((t + 1))^2
    assert np.allclose(tab.raw[:, 2], 9.0, rtol=1e-13)
    assert tab.kind == "power" and tab.exponent == 2.0


def test_exponential_identity_at_zero():
    f = catalog("exponential")
    tab = homogeneity_limit(f, lambda b: 1.0, [0.0, 1.0], -np.geomspace(1, 1e6, 7))
    assert np.allclose(tab.raw[:, 0], 1.0, rtol=0, atol=0)
    assert tab.kind == "exponential" and tab.exponent == 1.0


def test_single_t_sample_rejected():
    with pytest.raises(HomogeneityError):
        homogeneity_limit(catalog("exponential"), lambda b: 1.0, [0.0], [-1.0, -10.0])


def test_mems_inverse_power_limit():
    f = catalog("mems_inverse", [3])
    tab = homogeneity_limit(f, lambda b: -b, np.linspace(-3, 0.5, 15), -np.geomspace(1, 1e9, 10))
    assert tab.kind == "inverse_power" and tab.exponent == 3.0
    assert tab.offset == pytest.approx(1.0)
    # anchored ratio at t = -2 tends to 1/2^3
    i = int(np.argmin(np.abs(tab.t + 2)))
    assert tab.anchored_limit[i] == pytest.approx(0.125, rel=1e-6)
    assert tab.max_deviation() <= 1e-6


@given(st.floats(0.1, 5.0), st.floats(1e-9, 0.4), st.floats(0.05, 0.6))
def test_pure_power_is_beta_independent(p, gap, t):
    f = catalog("plasma_power", {"p": p, "t0": -1.0})
    tab = homogeneity_limit(f, lambda b: b + 1, [t / 2, t], [-1 + 0.6, -1 + gap])
    assert np.allclose(tab.raw[0], tab.raw[1], rtol=1e-12)
    assert tab.exponent == pytest.approx(p, rel=1e-9)


def test_window_is_enforced():
    f = catalog("plasma_power", [2, -1])
    with pytest.raises(HomogeneityError):
        homogeneity_limit(f, lambda b: b + 1, [5.0], [-0.5])     # α t + β > 0
    with pytest.raises(HomogeneityError):
        homogeneity_limit(f, lambda b: b + 1, [-2.0], [-0.5])    # below t0


def test_f_beta_zero_rejected():
    f = catalog("plasma_power", [2, -1])
    with pytest.raises(HomogeneityError):
        homogeneity_limit(f, lambda b: 1.0, [0.1], [-1.5])


def test_power_exp_is_exponential():
    f = catalog("power_exp", [2.0])
    betas = -np.geomspace(2, 1e3, 10)
    tab = homogeneity_limit(f, f.rescale.alpha, np.linspace(-2, 2, 9), betas)
    assert tab.kind == "exponential"
    assert tab.max_deviation() <= 1e-5


@pytest.mark.parametrize("name,params,conv", [
    ("plasma_power", [2, -1], True),
    ("plasma_power", [1, -1], False),
    ("exponential", [], True),
])
def test_extract_g0_examples(name, params, conv):
    g0 = extract_g0(catalog(name, params))
    assert g0.ko_admissible is conv


def test_extract_g0_numeric_envelope():
    f = catalog("log_power", {"p": 2.0, "t0": -0.1})
    g0 = extract_g0(f, alpha=lambda b: b - f.t0)
    t = np.linspace(0.05, 4.0, 50)
    # g0 is a lower envelope of the rescaled ratios
    for gap in (0.05, 1e-3, 1e-6):
        ratio = f.excess(gap * t) / f.excess(gap)
        assert np.all(g0(t) <= ratio * (1 + 1e-9))


def test_extract_g0_safety_range():
    with pytest.raises(HomogeneityError):
        extract_g0(catalog("plasma_power", [2, -1]), safety=0.0)

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semilab.domain import DomainError, Grid2D, Interval, RadialBall, SolutionField, disk2d, square2d, torsion


def _square_torsion(x, y, terms=200):
    """Series solution of -Δφ = 1 on the unit square with φ = 0 on the edges."""
    out = x * (1 - x) / 2
    for n in range(1, 2 * terms, 2):
        out = out - 4 / np.pi**3 * np.sin(n * np.pi * x) * np.cosh(n * np.pi * (y - 0.5)) / (
            n**3 * np.cosh(n * np.pi / 2))
    return out


def _apply(dom, v):
    return (dom.laplacian() @ v)[dom.interior]


def test_interval_quadratic_exact():
    d = Interval(-1, 1, 201)
    assert np.max(np.abs(_apply(d, d.coords**2) - 2)) <= 1e-10


@pytest.mark.parametrize("N", [1, 2, 3, 4, 7])
def test_ball_quadratic_exact(N):
    d = RadialBall(1.0, N, 301)
    assert np.max(np.abs(_apply(d, d.coords**2) - 2 * N)) <= 1e-9


@pytest.mark.parametrize("make", [lambda: square2d(1.0, 1 / 32), lambda: disk2d(1.0, 1 / 32)])
def test_grid_quadratic_exact(make):
    d = make()
    v = np.sum(d.coords**2, axis=1)
    assert np.max(np.abs(_apply(d, v) - 4)) <= 1e-8


def test_interval_torsion():
    d = Interval(-1, 1, 401)
    phi = torsion(d)
    assert np.max(np.abs(phi.values - (1 - d.coords**2) / 2)) <= 1e-12
    assert phi.values.max() == pytest.approx(0.5, abs=1e-12)
    assert d.coords[np.argmax(phi.values)] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("N", [1, 2, 3, 5])
def test_ball_torsion(N):
    d = RadialBall(1.0, N, 401)
    phi = torsion(d)
    assert np.max(np.abs(phi.values - (1 - d.coords**2) / (2 * N))) <= 1e-12


def test_disk_torsion_centre():
    h = 1 / 128
    d = disk2d(1.0, h)
    phi = torsion(d)
    centre = int(np.argmin(d.radius()))
    assert abs(phi.values[centre] - 0.25) <= 2 * h**2


def test_second_order_convergence_square():
    errs = []
    for h in (1 / 16, 1 / 32, 1 / 64):
        d = square2d(1.0, h)
        x, y = d.coords.T
        errs.append(np.max(np.abs(torsion(d).values - _square_torsion(x, y))))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert all(3.5 <= r <= 4.5 for r in ratios), ratios


@pytest.mark.parametrize("make", [
    lambda: Interval(-1, 1, 51), lambda: RadialBall(1.0, 3, 51), lambda: square2d(1.0, 1 / 16),
    lambda: disk2d(1.0, 1 / 16),
])
def test_row_sums_vanish_away_from_boundary(make):
    d = make()
    L = d.laplacian()
    ii = d.interior_index
    # rows whose stencil touches no boundary node
    LIB = d.split_laplacian()[1]
    free = np.asarray(np.abs(LIB).sum(axis=1)).ravel() == 0
    sums = np.asarray(L[ii].sum(axis=1)).ravel()
    assert np.max(np.abs(sums[free])) <= 1e-8 / d.h**2


@pytest.mark.parametrize("make", [
    lambda: Interval(0, 3, 31), lambda: RadialBall(2.0, 2, 31), lambda: square2d(2.0, 1 / 8),
    lambda: disk2d(0.5, 1 / 32), lambda: disk2d(1.0, 0.1, boundary_mode="nearest"),
])
def test_torsion_strictly_positive(make):
    d = make()
    phi = torsion(d)
    assert np.all(phi.values[d.interior] > 0)
    assert np.all(phi.values[d.boundary] == 0)


@given(st.floats(-3, 0), st.floats(0.1, 4), st.integers(5, 200))
def test_interval_torsion_any_interval(a, length, n):
    d = Interval(a, a + length, n)
    x = d.coords
    exact = (x - a) * (a + length - x) / 2
    assert np.allclose(torsion(d).values, exact, atol=1e-10 * max(1.0, length**2))


def test_weights_integrate_polynomials():
    assert Interval(-1, 1, 401).integrate(np.ones(401)) == pytest.approx(2.0)
    d = RadialBall(1.0, 3, 2001)
    assert d.integrate(np.ones(d.n)) == pytest.approx(4 * math.pi / 3, rel=1e-5)
    d2 = disk2d(1.0, 1 / 64)
    assert d2.integrate(np.ones(d2.n)) == pytest.approx(math.pi, rel=2e-2)


def test_compact_mask_uses_inradius():
    d = Interval(-1, 1, 201)
    m = d.compact_mask(0.5)
    assert np.allclose(np.abs(d.coords[m]).max(), 0.5)
    with pytest.raises(DomainError):
        d.compact_mask(1.5)


@pytest.mark.parametrize("bad", [
    lambda: Interval(1, 0), lambda: Interval(0, 1, 4), lambda: RadialBall(-1.0), lambda: RadialBall(1.0, 2.5),
    lambda: RadialBall(1.0, 2, 3), lambda: disk2d(1.0, 0.9),
])
def test_invalid_domains(bad):
    with pytest.raises(DomainError):
        bad()


def test_grid_is_connected_to_boundary():
    d = disk2d(1.0, 1 / 16)
    assert isinstance(d, Grid2D)
    # torsion solve succeeding with positive values certifies every interior node reaches Dirichlet data
    assert np.all(np.isfinite(torsion(d).values))


def test_solution_field_gap_uses_excess():
    d = Interval(-1, 1, 11)
    tiny = np.full(d.n, 1e-200)
    s = SolutionField(d, np.full(d.n, -1.0), lam=-1.0, t0=-1.0, excess=tiny)
    assert s.gap()[3] == 1e-200
    assert s.summary()["min_gap"] == 1e-200

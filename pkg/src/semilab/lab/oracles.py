"""Closed-form solutions used as references by the lab checks.

Each minimal-solution oracle maps (λ, node coordinate) to u_λ; limit
oracles map a radius to the limit profile.
"""

from __future__ import annotations

import math

import numpy as np


def plasma1_interval(lam, x):
    """(t+1)^+ on (-1, 1): u = cosh(k x)/cosh(k) - 1, k = sqrt(-λ)."""
    k = math.sqrt(-lam)
    x = np.asarray(x, dtype=float)
    # cosh(kx)/cosh(k) written with exponentials of non-positive arguments
    return np.exp(k * (np.abs(x) - 1)) * (1 + np.exp(-2 * k * np.abs(x))) / (1 + math.exp(-2 * k)) - 1


def plasma1_interval_gap(lam, x):
    return plasma1_interval(lam, x) + 1.0


def plasma1_ball3(lam, r):
    """(t+1)^+ on the unit ball of R^3: u = sinh(k r)/(r sinh k) - 1."""
    k = math.sqrt(-lam)
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.exp(k * (r - 1)) * (1 - np.exp(-2 * k * r)) / ((1 - math.exp(-2 * k)) * np.where(r > 0, r, 1.0))
    center = 2 * k * math.exp(-k) / (1 - math.exp(-2 * k))
    return np.where(r > 0, ratio, center) - 1


def liouville_delta(lam):
    return 1 + (4 + 2 * math.sqrt(4 - 2 * lam)) / (-lam)


def liouville_disk(lam, r):
    """e^t on the unit disk: u = log(8 δ / (-λ (δ - r^2)^2))."""
    d = liouville_delta(lam)
    r = np.asarray(r, dtype=float)
    return np.log(8 * d / (-lam)) - 2 * np.log(d - r**2)


def mems_interval(lam, x):
    """1/(1-t)^3 on (-1, 1): u = 1 - sqrt(1 + c (1 - x^2)), c = -2λ / (1 + sqrt(1 - 4λ))."""
    c = -2 * lam / (1 + math.sqrt(1 - 4 * lam))
    x = np.asarray(x, dtype=float)
    return 1 - np.sqrt(1 + c * (1 - x**2))


def critical_ball(lam, r, N=3):
    """((t+1)^+)^((N+2)/(N-2)) on the unit ball of R^N, N >= 3.

    u = ((δ - 1)/(δ - r^2))^((N-2)/2) - 1, δ from :func:`critical_ball_delta`.
    """
    d = critical_ball_delta(lam, N)
    r = np.asarray(r, dtype=float)
    return ((d - 1) / (d - r**2)) ** ((N - 2) / 2) - 1


def critical_ball_delta(lam, N=3):
    a = N * (N - 2)
    return (N * N - 2 * N - 2 * lam + math.sqrt(a * (a - 4 * lam))) / (-2 * lam)


MINIMAL = {
    "plasma1_interval": plasma1_interval,
    "plasma1_ball3": plasma1_ball3,
    "liouville_disk": liouville_disk,
    "mems_interval": mems_interval,
    "critical_ball3": critical_ball,
}


# limit profiles v as functions of the radius
def liouville_large(r):
    """Large solution of Δv = e^v on the unit disk."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        return math.log(8.0) - 2 * np.log1p(-r**2)


def critical_large(r, N=3):
    """Large solution of Δw = w^((N+2)/(N-2)) on the unit ball: (N(N-2))^((N-2)/4) (1-r^2)^(-(N-2)/2)."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        return (N * (N - 2)) ** ((N - 2) / 4) * (1 - r**2) ** (-(N - 2) / 2)


def critical_large_shifted(r, N=3):
    """Large solution of Δv = (v+1)^((N+2)/(N-2)): the profile above minus one."""
    return critical_large(r, N) - 1.0


def mems_limit(r):
    r = np.asarray(r, dtype=float)
    return -np.sqrt(np.clip(1 - r**2, 0.0, None))


LIMITS = {
    "liouville_large": liouville_large,
    "critical_large": critical_large,
    "critical_large_shifted": critical_large_shifted,
    "mems_limit": mems_limit,
}


def torsion_exact(domain_spec: dict):
    """Analytic torsion function for interval, ball and disk specs, else None."""
    kind = domain_spec.get("kind")
    if kind == "interval":
        a, b = float(domain_spec.get("a", -1.0)), float(domain_spec.get("b", 1.0))
        return lambda x: (np.asarray(x) - a) * (b - np.asarray(x)) / 2
    if kind in ("ball", "disk2d"):
        R = float(domain_spec.get("radius", 1.0))
        N = int(domain_spec.get("dim", 2)) if kind == "ball" else 2
        return lambda r: (R**2 - np.asarray(r) ** 2) / (2 * N)
    return None


def entire_exact(p: float, N: int):
    """Closed-form entire profiles where known (p = 0 any N; p = 1 with N = 1, 3)."""
    if p == 0:
        return lambda r: 1 + np.asarray(r) ** 2 / (2 * N)
    if p == 1 and N == 1:
        return np.cosh
    if p == 1 and N == 3:
        def f(r):
            r = np.asarray(r, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(r > 0, np.sinh(r) / np.where(r > 0, r, 1.0), 1.0)
        return f
    if p == 1 and N == 2:
        from scipy.special import i0

        return i0
    return None

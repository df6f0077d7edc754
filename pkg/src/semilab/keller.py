"""Keller-Osserman test for the existence of boundary blow-up solutions.

For a positive non-decreasing g the quantity

    I(g) = int_{t1}^inf dt / sqrt(G(t)),    G(t) = int_{t1}^t g(s) ds

is finite iff Δv = g(v) admits solutions that blow up at the boundary.  The
head [t1, T0] is integrated after the substitution t = t1 + s^2, which removes
the inverse square-root singularity.  The tail is split into dyadic blocks
[T_k, 2 T_k]; because G is increasing each block integral is bracketed by

    (T_{k+1} - T_k) / sqrt(G(T_{k+1}))  <=  block  <=  (T_{k+1} - T_k) / sqrt(G(T_k)).

Convergence is certified when the upper bounds decay geometrically and the
remaining geometric tail is below ``tol``.  Divergence is certified by the
comparison integrand 1/sqrt(g(t) (t - t1)) <= 1/sqrt(G(t)): its block lower
bounds stop decaying, so their sum is unbounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .nonlinearity import LimitNonlinearity

__all__ = ["KOResult", "KellerOssermanError", "keller_osserman"]


class KellerOssermanError(RuntimeError):
    """g is inadmissible, or the tail could not be bounded either way."""


@dataclass(frozen=True)
class KOResult:
    convergent: bool
    value: float | None
    error_bound: float
    blocks: int
    block_upper: tuple = field(default=(), repr=False)
    block_lower: tuple = field(default=(), repr=False)

    @property
    def verdict(self) -> str:
        return "convergent" if self.convergent else "divergent"


def _check_admissible(g: LimitNonlinearity, t1: float, top: float = 1e6):
    t = np.concatenate([np.linspace(t1, t1 + 10.0, 200), np.geomspace(t1 + 10.0, t1 + top, 200)])
    with np.errstate(over="ignore"):
        vals = g.eval(t)
    finite = np.isfinite(vals)
    if not np.all(vals[finite] > 0) or not finite[0]:
        raise KellerOssermanError(f"g must be positive on [t1, inf); got min {np.nanmin(vals):.3g}")
    v = vals[finite]
    if np.any(np.diff(v) < -1e-12 * np.abs(v[1:])):
        raise KellerOssermanError("g must be non-decreasing on [t1, inf)")


def keller_osserman(g: LimitNonlinearity, t1: float = 1.0, tol: float = 1e-8,
                    max_blocks: int = 400, window: int = 4) -> KOResult:
    """Classify the Keller-Osserman integral of ``g`` from ``t1``.

    Returns a :class:`KOResult`; ``value`` carries the integral (to within
    ``tol``) when it converges and is ``None`` otherwise.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    _check_admissible(g, t1)

    def G(t):
        return g.integral(t1, t)

    def head(a, b):
        # t = t1 + s^2 on [sqrt(a - t1), sqrt(b - t1)]
        def integrand(s):
            if s == 0.0:
                return 2.0 / np.sqrt(float(g.eval(t1)))
            return 2.0 * s / np.sqrt(G(t1 + s * s))

        val, err = integrate.quad(integrand, np.sqrt(a - t1), np.sqrt(b - t1),
                                  epsabs=tol / 100, epsrel=1e-12, limit=400)
        return val, err

    T = t1 + max(1.0, abs(t1))
    total, quad_err = head(t1, T)
    uppers, lowers = [], []
    ratios = []
    for k in range(max_blocks):
        T_next = 2.0 * T
        with np.errstate(over="ignore"):
            G_lo, G_hi = G(T), G(T_next)
        if not np.isfinite(G_hi):
            # g overflows doubles: the remaining tail is below any tolerance
            upper = (T_next - T) / np.sqrt(G_lo)
            if upper < tol:
                return KOResult(True, total, upper + quad_err, k, tuple(uppers), tuple(lowers))
            raise KellerOssermanError("overflow before the tail was bounded")
        upper = (T_next - T) / np.sqrt(G_lo)
        with np.errstate(over="ignore"):
            g_hi = float(g.eval(T_next))
        lower = (T_next - T) / np.sqrt(g_hi * (T_next - t1))
        block, err = integrate.quad(lambda t: 1.0 / np.sqrt(G(t)), T, T_next, epsabs=tol / 100, epsrel=1e-12, limit=200)
        total += block
        quad_err += err
        if uppers:
            ratios.append(upper / uppers[-1])
        uppers.append(upper)
        lowers.append(lower)
        T = T_next

        if len(ratios) >= window:
            rho = max(ratios[-window:])
            if rho < 1.0 and all(r <= 1.0 for r in ratios[-window:]):
                # conservative geometric factor (ratios approach their limit from below)
                rho_hat = np.sqrt(rho)
                tail = upper * rho_hat / (1.0 - rho_hat)
                if tail + quad_err < tol:
                    return KOResult(True, total, tail + quad_err, k + 1, tuple(uppers), tuple(lowers))
            low_ratios = np.array(lowers[-window - 1:])
            low_ratios = low_ratios[1:] / low_ratios[:-1]
            if np.all(low_ratios >= 1.0 - 1e-9 * 2.0 ** (-k) - 4.0 * abs(t1) / T) and k > 24:
                return KOResult(False, None, np.inf, k + 1, tuple(uppers), tuple(lowers))
    raise KellerOssermanError(f"tail not bounded after {max_blocks} dyadic blocks")

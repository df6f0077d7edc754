"""Rescaling frames, limit-profile comparisons and the energy J_λ.

Conventions.  A frame maps the solution onto a limit profile v by

    large_solution / bounded_limit / torsion:  (u - beta) / alpha  ->  v(x)
    entire_profile:                            (u(x_λ + eps y) - t0) / alpha  ->  v(|y|)

``beta`` is the additive shift (beta = t0 for finite thresholds,
beta = -log(-λ) for e^t, 0 for the bounded and torsion regimes).  For the
torsion regime alpha = -λ c0 and the profile is -φ, φ the torsion function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .domain import Domain, Grid2D, RadialBall, SolutionField, torsion
from .large import BlowupSolution, EntireProfile
from .nonlinearity import Nonlinearity

__all__ = [
    "FrameError",
    "RescaleFrame",
    "EnergyRecord",
    "LimitProfile",
    "frame_for",
    "verify_limit",
    "energy",
    "robin_check_disk",
    "solve_scalar",
    "threshold_dichotomy",
]

REGIMES = ("large_solution", "entire_profile", "torsion", "bounded_limit")


class FrameError(ValueError):
    pass


@dataclass(frozen=True)
class RescaleFrame:
    lam: float
    alpha: float
    beta: float
    regime: str
    eps: float | None = None
    x_lambda: float | np.ndarray | None = None
    t0: float = -math.inf
    shift: float = 0.0      # A = beta(λ)/alpha(λ) for the bounded limit Δv = g(v - A)

    def as_dict(self):
        x = self.x_lambda
        if isinstance(x, np.ndarray):
            x = x.tolist()
        return {"lambda": self.lam, "alpha": self.alpha, "beta": self.beta, "eps": self.eps,
                "x_lambda": x, "regime": self.regime, "shift": self.shift}


@dataclass(frozen=True)
class EnergyRecord:
    lam: float
    kinetic: float
    potential: float
    anchor: float

    @property
    def total(self) -> float:
        return self.kinetic + self.potential

    @property
    def normalized(self) -> float:
        return self.total / math.sqrt(-self.lam)

    def as_dict(self):
        return {"lambda": self.lam, "kinetic": self.kinetic, "potential": self.potential, "J": self.total,
                "J_normalized": self.normalized, "anchor": self.anchor}


# ---------------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------------

def energy(f: Nonlinearity, solution: SolutionField) -> EnergyRecord:
    """J_λ(u) = 1/2 ∫|∇u|^2 - λ ∫ F(u), with F anchored where ``f.anchor`` says.

    Gradients use edge differences (midpoint rule for |∇u|^2); the potential
    uses the domain's quadrature weights, which include the sphere area and
    r^{N-1} for radial domains.
    """
    dom = solution.domain
    u = solution.values
    kin = dom.kinetic(u)
    if f.finite_threshold and solution.excess is not None:
        F = f.antiderivative_excess(solution.excess)
    else:
        F = f.antiderivative(u)
    if not np.all(np.isfinite(F)):
        raise FrameError("F is undefined on the range of the solution")
    pot = -solution.lam * dom.integrate(F)
    return EnergyRecord(solution.lam, kin, pot, f.anchor)


# ---------------------------------------------------------------------------
# frames
# ---------------------------------------------------------------------------

def solve_scalar(fun: Callable[[float], float], target: float, lo: float = 1e-30, hi: float = 1e30,
                 rtol: float = 1e-12, prefer: str = "largest", max_iter: int = 400) -> float:
    """Positive root of fun(x) = target by bisection in log x.

    The bracket [lo, hi] is scanned on a geometric grid (grown by 1e10 at
    both ends until a sign change appears).  ``prefer`` picks the largest or
    smallest bracketed root, which matters when a rescaling hint is only
    asymptotically monotone.
    """
    def g(x):
        with np.errstate(all="ignore"):
            val = float(fun(x)) - target
        return val

    for _ in range(30):
        xs = np.geomspace(lo, hi, int(round(math.log10(hi / lo))) + 1)
        vals = np.array([g(x) for x in xs])
        ok = ~np.isnan(vals)
        idx = [i for i in range(len(xs) - 1) if ok[i] and ok[i + 1] and vals[i] * vals[i + 1] <= 0]
        if idx:
            break
        lo, hi = lo * 1e-10, hi * 1e10
        if lo < 1e-300 or hi > 1e300:
            raise FrameError("no root of the scalar rescaling equation in the bracket")
    else:  # pragma: no cover
        raise FrameError("no root of the scalar rescaling equation in the bracket")
    i = idx[-1] if prefer == "largest" else idx[0]
    a, b, fa = xs[i], xs[i + 1], vals[i]
    if fa == 0:
        return float(a)
    for _ in range(max_iter):
        m = math.sqrt(a * b)
        fm = g(m)
        if fm == 0:
            return m
        if fa * fm < 0:
            b = m
        else:
            a, fa = m, fm
        if b / a - 1 < rtol:
            break
    return math.sqrt(a * b)


def threshold_dichotomy(f: Nonlinearity, alphas=None) -> tuple[str, float]:
    """Case (i) when gamma(a)/a -> 0 as a -> 0 (gamma(a) = f(t0 + a)), else case (ii).

    Returns the regime and the fitted slope of log(gamma(a)/a) against log a.
    """
    a = np.geomspace(1e-12, 1e-6, 13) if alphas is None else np.asarray(alphas, dtype=float)
    ratio = f.excess(a) / a
    if np.any(ratio <= 0) or not np.all(np.isfinite(ratio)):
        raise FrameError("gamma(alpha) must be positive near t0")
    slope = float(np.polyfit(np.log(a), np.log(ratio), 1)[0])
    if not math.isfinite(slope):
        raise FrameError("ambiguous regime: gamma(a)/a has no fitted power near t0")
    # gamma(a)/a -> 0 means a positive power; borderline slopes fall in case (ii)
    return ("large_solution" if slope > 1e-3 else "entire_profile"), slope


def frame_for(f: Nonlinearity, lam: float, solution: SolutionField | None = None,
              alpha_fn: Callable[[float], float] | None = None) -> RescaleFrame:
    lam = float(lam)
    if not lam < 0:
        raise FrameError("λ must be negative")
    hint = f.rescale
    if f.finite_threshold:
        regime, _ = threshold_dichotomy(f)
        if regime == "large_solution":
            # -λ = alpha / gamma(alpha), decreasing in alpha
            if f.name in {"plasma_power"}:
                p = f.params["p"]
                alpha = (-lam) ** (-1.0 / (p - 1.0))
            else:
                alpha = solve_scalar(lambda a: math.log(a) - np.log(float(f.excess(a))), math.log(-lam),
                                     prefer="smallest")
            # a shifted limit g(t) = (t + c)^p pairs with beta = t0 + c alpha
            shift = hint.limit.shift if hint is not None and hint.limit.kind == "power" else 0.0
            return RescaleFrame(lam, alpha, f.t0 + shift * alpha, regime, t0=f.t0)
        if solution is None:
            raise FrameError("entire-profile frame needs the solution (alpha = min u - t0)")
        k = solution.argmin
        alpha = float(solution.gap()[k])
        if not alpha > 1e-300:
            # a dead core (p < 1) or a gap below the float range leaves no frame
            raise FrameError(f"min u - t0 = {alpha:.3g}: dead core or underflow, no entire-profile frame")
        eps = math.sqrt(alpha / (-lam * float(f.excess(alpha))))
        return RescaleFrame(lam, alpha, f.t0, regime, eps=eps, x_lambda=solution.domain.coords[k], t0=f.t0)

    if f.tail_limit > 0:
        return RescaleFrame(lam, -lam * f.tail_limit, 0.0, "torsion")
    alpha_of = alpha_fn or (hint.alpha if hint is not None else None)
    if alpha_of is None:
        raise FrameError("t0 = -inf without rescaling data: pass alpha_fn")
    regime = hint.regime if hint is not None else "large_solution"

    # -λ = alpha(beta)/f(beta) in the variable s = -beta > 0 (increasing in s)
    def lhs(s):
        b = -s
        return np.log(float(alpha_of(b))) - float(f.log_eval(b))

    if f.name == "exponential" and alpha_fn is None:
        s = math.log(-lam)
    else:
        s = solve_scalar(lhs, math.log(-lam))
    beta = -s
    alpha = float(alpha_of(beta))
    if regime == "bounded_limit":
        return RescaleFrame(lam, alpha, 0.0, regime, shift=beta / alpha)
    return RescaleFrame(lam, alpha, beta, "large_solution")


# ---------------------------------------------------------------------------
# limit profiles and verification
# ---------------------------------------------------------------------------

class LimitProfile:
    """A limit profile v evaluated on the solution's nodes.

    ``fn(domain, frame)`` returns ``(values, valid_mask)``.
    """

    def __init__(self, fn, label: str):
        self._fn, self.label = fn, label

    def evaluate(self, domain: Domain, frame: RescaleFrame):
        return self._fn(domain, frame)

    @classmethod
    def closed_form(cls, fn: Callable[[np.ndarray], np.ndarray], label: str = "closed form"):
        """v given as a function of |x| (radius from the domain centre)."""
        def ev(domain, frame):
            with np.errstate(divide="ignore", invalid="ignore"):
                vals = np.asarray(fn(domain.radius()), dtype=float)
            return vals, np.ones(domain.n, dtype=bool)
        return cls(ev, label)

    @classmethod
    def from_blowup(cls, sol: BlowupSolution, label: str = "large solution"):
        def ev(domain, frame):
            src = sol.domain
            if src is domain:
                return sol.values, np.isfinite(sol.values)
            if src.coords.ndim == 1:
                x = src.radius()
                order = np.argsort(x)
                ok = np.isfinite(sol.values[order])
                vals = np.interp(domain.radius(), x[order][ok], sol.values[order][ok], right=np.nan)
                return vals, np.isfinite(vals)
            from scipy.interpolate import LinearNDInterpolator

            ok = np.isfinite(sol.values)
            vals = LinearNDInterpolator(src.coords[ok], sol.values[ok])(domain.coords)
            return vals, np.isfinite(vals)
        return cls(ev, label)

    @classmethod
    def from_entire(cls, prof: EntireProfile, y_max: float = 3.0, label: str = "entire profile"):
        def ev(domain, frame):
            x = domain.coords
            xl = frame.x_lambda
            if x.ndim == 1:
                y = np.abs(x - xl) if domain.kind == "interval" else np.abs(x)
            else:
                y = np.linalg.norm(x - np.asarray(xl), axis=1)
            y = y / frame.eps
            mask = y <= min(y_max, prof.r_max)
            vals = np.full(domain.n, np.nan)
            vals[mask] = prof(y[mask])
            return vals, mask
        return cls(ev, label)

    @classmethod
    def torsion_profile(cls, label: str = "-torsion"):
        def ev(domain, frame):
            return -torsion(domain).values, np.ones(domain.n, dtype=bool)
        return cls(ev, label)


def _rescaled(sol: SolutionField, frame: RescaleFrame):
    if frame.regime == "entire_profile" or math.isfinite(frame.t0):
        # through u - t0 so the digits below t0's rounding survive
        return (sol.gap() - (frame.beta - frame.t0)) / frame.alpha
    return (sol.values - frame.beta) / frame.alpha


def verify_limit(fields: Sequence[SolutionField], frames: Sequence[RescaleFrame], profile: LimitProfile,
                 compact_fraction: float | None = 0.8, mask: np.ndarray | None = None) -> dict:
    """Value and C^1 errors of the rescaled solutions against ``profile``.

    The compact is the domain's inner ``compact_fraction`` (or ``mask``); for
    the entire-profile regime it is further restricted to |y| <= y_max in the
    rescaled variable.  Gradients are centred differences, taken in the
    rescaled variable y for the entire-profile regime.
    """
    if len(fields) != len(frames):
        raise FrameError("fields and frames are mismatched")
    rows = []
    for sol, fr in zip(fields, frames):
        if sol.lam != fr.lam:
            raise FrameError("fields and frames are mismatched")
        dom = sol.domain
        K = dom.interior.copy()
        if mask is not None:
            K &= mask
        elif compact_fraction is not None and fr.regime != "entire_profile":
            K &= dom.compact_mask(compact_fraction)
        v, ok = profile.evaluate(dom, fr)
        K &= ok
        if not K.any():
            raise FrameError("empty comparison set")
        diff = np.where(ok, _rescaled(sol, fr) - np.where(ok, v, 0.0), np.nan)
        e_val = float(np.max(np.abs(diff[K])))
        grad = dom.gradient_norm(diff)
        if fr.regime == "entire_profile":
            grad = grad * fr.eps
        gK = K & np.isfinite(grad)
        # a centred stencil must not reach outside the valid set
        e_grad = float(np.max(grad[gK])) if gK.any() else math.nan
        rows.append({"lambda": fr.lam, "alpha": fr.alpha, "beta": fr.beta, "eps": fr.eps if fr.eps else math.nan,
                     "error_sup": e_val, "error_grad": e_grad})
    slope = math.nan
    if len(rows) >= 2:
        lam = np.array([-r["lambda"] for r in rows])
        err = np.array([r["error_sup"] for r in rows])
        good = err > 0
        if good.sum() >= 2:
            slope = float(np.polyfit(np.log(lam[good]), np.log(err[good]), 1)[0])
    return {"rows": rows, "slope": slope, "profile": profile.label}


def robin_check_disk(large_v: BlowupSolution, r_max: float = 0.9) -> float:
    """sup_{|x| <= r_max} |v - (log 8 - 2 log(1 - |x|^2))| for Δv = e^v on the unit disk."""
    g = large_v.g
    if g.kind != "exponential" or g.scale != 1.0:
        raise FrameError("robin check needs g = e^v")
    dom = large_v.domain
    if isinstance(dom, RadialBall):
        if dom.dim != 2 or dom.R != 1.0:
            raise FrameError("robin check needs the unit disk")
    elif isinstance(dom, Grid2D):
        if dom.meta.get("radius") != 1.0 or dom.label != "disk2d":
            raise FrameError("robin check needs the unit disk")
    else:
        raise FrameError("robin check needs the unit disk")
    r = dom.radius()
    m = (r <= r_max) & dom.interior
    pred = math.log(8.0) - 2.0 * np.log1p(-r[m] ** 2)
    return float(np.max(np.abs(large_v.values[m] - pred)))

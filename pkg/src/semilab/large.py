"""Boundary blow-up solutions of Δv = g(v) and entire radial profiles of Δv = v^p.

Large solutions are approximated by the truncations

    Δv = g(v) in Ω,    v = M_k on ∂Ω,    M_k = m0 * ratio^k,

which increase pointwise in M_k.  Solving for v itself on a uniform mesh
carries an O(h) error from the unresolved boundary layer (v ~ -2 log d for
g = e^v).  When g has a closed-form regularising transform w = T(v), with
w ~ dist(x, ∂Ω) (see :meth:`LimitNonlinearity.regularizer`), the truncations
are solved in w instead.  The boundary data becomes w = T(M_k) -> 0 and
second-order accuracy is restored.  In that formulation the limit level
M = inf (w = 0 on the boundary) is itself a well-posed discrete problem and
closes the schedule.

``shoot_entire`` integrates the radial ODE v'' + (N-1)/r v' = v^p + s from
v(0) = 1 with a series start and an 8th-order Runge-Kutta method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy import integrate

from .domain import Domain, Grid2D, SolutionField, torsion
from .keller import KellerOssermanError, keller_osserman
from .nonlinearity import LimitNonlinearity
from .solver import EPS, SolveConfig, _newton

__all__ = [
    "LargeSolutionError",
    "BlowupSolution",
    "EntireProfile",
    "large_solve",
    "bounded_solve",
    "shoot_entire",
    "boundary_growth_probe",
]


class LargeSolutionError(RuntimeError):
    pass


class _DirectProblem:
    """Δv = g(v) in the interior with constant boundary value ``M``."""

    def __init__(self, g: LimitNonlinearity, domain: Domain, M: float):
        self.g = g
        self.LII, self.LIB = domain.split_laplacian()
        self.absL = abs(self.LII)
        self.vB = np.full(len(domain.boundary_index), float(M))
        self.bterm = self.LIB @ self.vB
        self.bscale = abs(self.LIB) @ np.abs(self.vB)

    def residual(self, v):
        with np.errstate(over="ignore", invalid="ignore"):
            return self.LII @ v + self.bterm - self.g.eval(v)

    def floor(self, v):
        with np.errstate(over="ignore"):
            scale = self.absL @ np.abs(v) + self.bscale + np.abs(self.g.eval(v))
        return 64.0 * EPS * float(np.max(scale))

    def jacobian(self, v):
        d = self.g.deriv(v)
        d = np.where(np.isfinite(d), d, 0.0)
        return (self.LII - sp.diags(d)).tocsc()

    def monotone(self, v, sweeps):
        with np.errstate(over="ignore"):
            d = self.g.deriv(np.linspace(float(v.min()), float(v.max()), 257))
        d = d[np.isfinite(d)]
        m = float(d.max()) if d.size else 0.0
        solve = spla.factorized((-self.LII + sp.diags(np.full(len(v), m))).tocsc())
        for _ in range(sweeps):
            v = solve(m * v - self.g.eval(v) + self.bterm)
        return v


class _RegularizedProblem:
    """-kappa w Δw + mu |∇w|^2 = rhs with constant boundary value ``wB``."""

    def __init__(self, reg, domain: Domain, wB: float):
        self.kappa, self.mu, self.rhs = reg[:3]
        ii, bb = domain.interior_index, domain.boundary_index
        self.LII, self.LIB = domain.split_laplacian()
        self.absL = abs(self.LII)
        self.wB = np.full(len(bb), float(wB))
        self.bterm = self.LIB @ self.wB
        self.D = []
        for Dfull in domain.first_derivatives():
            Dr = Dfull[ii]
            self.D.append((sp.csr_matrix(Dr[:, ii]), Dr[:, bb] @ self.wB))

    def _lap(self, w):
        return self.LII @ w + self.bterm

    def residual(self, w):
        grad2 = sum((Di @ w + bi) ** 2 for Di, bi in self.D)
        return -self.kappa * w * self._lap(w) + self.mu * grad2 - self.rhs

    def floor(self, w):
        lapscale = self.absL @ np.abs(w) + abs(self.LIB) @ np.abs(self.wB)
        gscale = sum((abs(Di) @ np.abs(w) + np.abs(bi)) ** 2 for Di, bi in self.D)
        scale = self.kappa * np.abs(w) * lapscale + self.mu * gscale + abs(self.rhs)
        return 64.0 * EPS * float(np.max(scale))

    def jacobian(self, w):
        J = -self.kappa * sp.diags(self._lap(w)) - self.kappa * sp.diags(w) @ self.LII
        for Di, bi in self.D:
            J = J + 2.0 * self.mu * sp.diags(Di @ w + bi) @ Di
        return J.tocsc()

    def monotone(self, w, sweeps):
        return None


@dataclass
class BlowupSolution:
    """Result of :func:`large_solve` (or :func:`bounded_solve`)."""

    g: LimitNonlinearity
    domain: Domain
    values: np.ndarray                 # v at the nodes (boundary carries the last M, possibly inf)
    levels: list = field(default_factory=list)
    deltas: list = field(default_factory=list)
    compact_fraction: float = 0.8
    converged: bool = True
    method: str = "direct"
    w: np.ndarray | None = None        # regularised variable when used
    level_values: list = field(default_factory=list, repr=False)
    residual_norm: float = 0.0

    @property
    def compact(self) -> np.ndarray:
        return self.domain.compact_mask(self.compact_fraction)

    @property
    def certified_fraction(self) -> float:
        return self.compact_fraction if self.converged else 0.0

    def as_field(self) -> SolutionField:
        return SolutionField(self.domain, self.values, lam=-1.0, residual_norm=self.residual_norm,
                             newton_iters=0, converged=self.converged, method=self.method)

    def rows(self):
        return ("level", "M", "interior_delta"), [[k, M, d] for k, (M, d) in enumerate(zip(self.levels, self.deltas))]


def _solve(prob, x0, cfg):
    x, rn, iters, ok, _ = _newton(prob, x0, cfg)
    return x, rn, ok


def _full(domain, interior_values, boundary_value):
    out = np.empty(domain.n)
    out[domain.interior_index] = interior_values
    out[domain.boundary_index] = boundary_value
    return out


def large_solve(g: LimitNonlinearity, domain: Domain, levels: int = 24, tol: float = 1e-8,
                compact_fraction: float = 0.8, method: str = "auto", m0: float = 1.0, ratio: float = 2.0,
                cfg: SolveConfig | None = None, keep_levels: bool = False, t1: float = 1.0) -> BlowupSolution:
    """Large solution of Δv = g(v) by increasing boundary truncation.

    ``method`` is ``"regularized"``, ``"direct"`` or ``"auto"`` (regularized
    when g has a closed-form transform).  The schedule stops once the sup of
    the change between consecutive levels on the compact (nodes at distance
    at least ``(1 - compact_fraction)`` times the inradius) drops below
    ``tol``.  The direct method raises if that never happens.  The
    regularized method always finishes with the limit level M = inf, so its
    deltas are diagnostics of the truncation rate.
    """
    if levels < 2:
        raise ValueError("need at least two truncation levels")
    try:
        ko = keller_osserman(g, t1=t1)
    except KellerOssermanError as exc:
        raise LargeSolutionError(f"Keller-Osserman test inconclusive for g = {g.describe()}: {exc}") from exc
    if not ko.convergent:
        raise LargeSolutionError(f"g = {g.describe()} violates the Keller-Osserman condition: no large solution")
    reg = g.regularizer()
    if method == "auto":
        method = "regularized" if reg is not None else "direct"
    if method == "regularized" and reg is None:
        raise ValueError(f"no regularising transform for g = {g.describe()}")
    if method not in {"regularized", "direct"}:
        raise ValueError(f"unknown method {method!r}")
    cfg = cfg or SolveConfig(max_newton=80)
    K = domain.compact_mask(compact_fraction)[domain.interior_index]
    ii = domain.interior_index

    # level 0 by a direct solve (bounded data, no singular layer)
    M = float(m0)
    v, rn, ok = _solve(_DirectProblem(g, domain, M), np.full(len(ii), M), cfg)
    if not ok:
        raise LargeSolutionError(f"truncated problem failed at M = {M:g}")
    Ms, deltas, kept = [M], [math.nan], ([_full(domain, v, M)] if keep_levels else [])
    w = reg[3](v) if method == "regularized" else None
    converged = False
    for k in range(1, levels):
        M = float(m0) * ratio**k
        if method == "regularized":
            w_new, rn, ok = _solve(_RegularizedProblem(reg, domain, float(reg[3](M))), w, cfg)
            v_new = reg[4](w_new)
        else:
            v_new, rn, ok = _solve(_DirectProblem(g, domain, M), v, cfg)
        if not ok:
            raise LargeSolutionError(f"truncated problem failed at M = {M:g} (residual {rn:.3g})")
        delta = float(np.max(np.abs(v_new[K] - v[K])))
        Ms.append(M)
        deltas.append(delta)
        v = v_new
        if method == "regularized":
            w = w_new
        if keep_levels:
            kept.append(_full(domain, v, M))
        if delta < tol:
            converged = True
            break
    boundary = M
    if method == "regularized":
        # the limit level w = 0 is a well-posed discrete problem: it is the answer,
        # the finite levels certify monotone convergence toward it
        w_lim, rn, ok = _solve(_RegularizedProblem(reg, domain, 0.0), w, cfg)
        if not ok:
            raise LargeSolutionError(f"limit level failed (residual {rn:.3g})")
        v_lim = reg[4](w_lim)
        Ms.append(math.inf)
        deltas.append(float(np.max(np.abs(v_lim[K] - v[K]))))
        v, w, boundary = v_lim, w_lim, math.inf
        converged = True
        if keep_levels:
            kept.append(_full(domain, v, boundary))
    if not converged:
        raise LargeSolutionError(
            f"truncation not Cauchy at tol={tol:g}: last interior delta {deltas[-1]:.3g} after {len(Ms)} levels")
    return BlowupSolution(
        g=g, domain=domain, values=_full(domain, v, boundary), levels=Ms, deltas=deltas,
        compact_fraction=compact_fraction, converged=True, method=method,
        w=None if w is None else _full(domain, w, 0.0 if boundary == math.inf else float(reg[3](boundary))),
        level_values=kept, residual_norm=rn,
    )


def bounded_solve(g: LimitNonlinearity, domain: Domain, boundary_value: float = 0.0,
                  cfg: SolveConfig | None = None) -> BlowupSolution:
    """Solution of Δv = g(v), v = ``boundary_value`` on the boundary.

    Used for the bounded limits (shifted and inverse-power g).  When g is
    singular at the boundary value (inverse power centred there) the
    regularised variable is used, so v ~ -dist^(2/(p+1)) is resolved.
    """
    cfg = cfg or SolveConfig(max_newton=80)
    reg = g.regularizer()
    ii = domain.interior_index
    singular = g.kind == "inverse_power" and abs(g.center - boundary_value) < 1e-300
    if singular and reg is not None:
        kappa, mu, rhs, to_w, from_w = reg
        phi = torsion(domain).values[ii]
        # w ~ a phi balances the equation at the centre for the model profile
        w0 = np.sqrt(rhs / (kappa * phi.max() + mu * 1e-12)) * phi
        w, rn, ok = _solve(_RegularizedProblem(reg, domain, 0.0), w0, cfg)
        if not ok:
            raise LargeSolutionError(f"bounded singular solve failed (residual {rn:.3g})")
        v = from_w(w)
        return BlowupSolution(g=g, domain=domain, values=_full(domain, v, boundary_value), levels=[boundary_value],
                              deltas=[math.nan], converged=True, method="regularized",
                              w=_full(domain, w, 0.0), residual_norm=rn)
    if singular:
        raise LargeSolutionError("singular bounded problem needs a regularising transform")
    v0 = np.full(len(ii), float(boundary_value))
    v, rn, ok = _solve(_DirectProblem(g, domain, boundary_value), v0, cfg)
    if not ok:
        raise LargeSolutionError(f"bounded solve failed (residual {rn:.3g})")
    return BlowupSolution(g=g, domain=domain, values=_full(domain, v, boundary_value), levels=[boundary_value],
                          deltas=[math.nan], converged=True, method="direct", residual_norm=rn)


# ---------------------------------------------------------------------------
# entire radial profiles
# ---------------------------------------------------------------------------

@dataclass
class EntireProfile:
    p: float
    N: int
    rhs_shift: float
    r: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    r_max: float                       # largest radius actually reached
    blowup_radius: float | None        # extrapolated blow-up radius, if overflow occurred
    overflow: bool
    _interp: Callable = field(repr=False, default=None)
    _series: tuple = field(repr=False, default=())

    def __call__(self, r):
        return self.evaluate(r)[0]

    def evaluate(self, r):
        """(v, v') at radii r (within the integrated range)."""
        r = np.abs(np.asarray(r, dtype=float))
        if np.any(r > self.r_max * (1 + 1e-12)):
            raise ValueError(f"radius beyond the integrated range {self.r_max:g}")
        r0, c2, c4 = self._series
        v = np.empty_like(r)
        dv = np.empty_like(r)
        near = r <= r0
        v[near] = 1.0 + c2 * r[near] ** 2 + c4 * r[near] ** 4
        dv[near] = 2 * c2 * r[near] + 4 * c4 * r[near] ** 3
        if np.any(~near):
            y = self._interp(r[~near])
            v[~near], dv[~near] = y[0], y[1]
        return v, dv

    def ode_residual(self, r, delta: float = 1e-3):
        """|v'' + (N-1)/r v' - v^p - s| relative to 1 + v^p, with v'' by a fourth-order difference of v'.

        v' is odd in r, so stencil points left of the centre reflect through it.
        """
        r = np.asarray(r, dtype=float)

        def dv_at(x):
            return np.sign(x) * self.evaluate(np.abs(x))[1]

        d2 = (-dv_at(r + 2 * delta) + 8 * dv_at(r + delta) - 8 * dv_at(r - delta) + dv_at(r - 2 * delta)) / (
            12 * delta)
        v, dv = self.evaluate(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            lap = np.where(r > 0, d2 + (self.N - 1) * dv / np.where(r > 0, r, 1.0), self.N * d2)
        g = v**self.p
        return np.abs(lap - g - self.rhs_shift) / (1.0 + g)


def shoot_entire(p: float, N: int, r_max: float, rhs_shift: float = 0.0, r_eval: Sequence[float] | None = None,
                 rtol: float = 1e-13, atol: float = 1e-14, overflow: float = 1e12) -> EntireProfile:
    """Radial solution of v'' + (N-1)/r v' = v^p + rhs_shift, v(0) = 1, v'(0) = 0."""
    if p < 0 or int(N) != N or N < 1:
        raise ValueError("need p >= 0 and integer N >= 1")
    if rhs_shift not in (0, 1):
        raise ValueError("rhs_shift must be 0 or 1")
    N = int(N)
    c2 = (1.0 + rhs_shift) / (2.0 * N)
    c4 = p * c2 / (4.0 * (N + 2))
    r0 = min(1e-3, 0.5 * r_max)
    y0 = [1.0 + c2 * r0**2 + c4 * r0**4, 2 * c2 * r0 + 4 * c4 * r0**3]

    def rhs(r, y):
        v, dv = y
        return [dv, max(v, 0.0) ** p + rhs_shift - (N - 1) / r * dv]

    def blow(r, y):
        return y[0] - overflow

    blow.terminal = True
    blow.direction = 1
    sol = integrate.solve_ivp(rhs, (r0, r_max), y0, method="DOP853", rtol=rtol, atol=atol,
                              dense_output=True, events=blow)
    hit = sol.status == 1
    if sol.status == -1:
        # for fast blow-up (large p) the step size underflows before v reaches ``overflow``:
        # v ~ (R - r)^{-2/(p-1)} cannot exceed ~eps^{-2/(p-1)} in double precision
        v_end, dv_end = sol.y[0, -1], sol.y[1, -1]
        floor = min(1e4, math.sqrt(np.finfo(float).eps ** (-2.0 / (p - 1.0)))) if p > 1 else math.inf
        if not (v_end >= floor and dv_end > 0):
            raise ArithmeticError(f"integration failed: {sol.message}")
        hit = True
    r_end = float(sol.t[-1])
    blowup = None
    if hit and p > 1:
        v_end, dv_end = sol.y[0, -1], sol.y[1, -1]
        # w = v^{-(p-1)/2} is nearly linear near the singularity: extrapolate its zero
        blowup = r_end + 2.0 / (p - 1.0) * v_end / dv_end
    prof = EntireProfile(p=p, N=N, rhs_shift=rhs_shift, r=sol.t, v=sol.y[0], dv=sol.y[1], r_max=r_end,
                         blowup_radius=blowup, overflow=hit, _interp=sol.sol, _series=(r0, c2, c4))
    if r_eval is not None:
        re = np.asarray(r_eval, dtype=float)
        re = re[re <= r_end]
        v, dv = prof.evaluate(re)
        prof.r, prof.v, prof.dv = re, v, dv
    return prof


# ---------------------------------------------------------------------------
# probes
# ---------------------------------------------------------------------------

def boundary_growth_probe(sol: BlowupSolution, ray_count: int = 8, radii: Sequence[float] | None = None,
                          oracle: Callable | None = None) -> list[dict]:
    """Sample v along inward rays from the centre.

    Returns rows ``{ray, angle, r, distance, v, oracle}``.  On radial domains
    there is a single ray.  ``oracle`` (a function of r) adds the reference
    value when given.
    """
    if not sol.converged:
        raise LargeSolutionError("probe needs a converged solution")
    dom = sol.domain
    R = dom.inradius
    radii = np.asarray(radii if radii is not None else np.linspace(0.0, 0.95, 20) * R, dtype=float)
    rows = []
    if isinstance(dom, Grid2D):
        from scipy.interpolate import LinearNDInterpolator

        finite = np.isfinite(sol.values)
        interp = LinearNDInterpolator(dom.coords[finite], sol.values[finite])
        for k in range(ray_count):
            th = 2 * math.pi * k / ray_count
            pts = dom.center + np.outer(radii, [math.cos(th), math.sin(th)])
            vals = interp(pts)
            for r, val in zip(radii, vals):
                rows.append(_probe_row(k, th, r, R - r, val, oracle))
    else:
        x = dom.radius() if dom.kind == "radial_ball" else dom.coords - getattr(dom, "center", 0.0)
        order = np.argsort(x)
        sel = dom.interior[order] & (x[order] >= 0)
        vals = np.interp(radii, x[order][sel], sol.values[order][sel])
        for r, val in zip(radii, vals):
            rows.append(_probe_row(0, 0.0, r, R - r, val, oracle))
    return rows


def _probe_row(k, th, r, d, val, oracle):
    row = {"ray": k, "angle": th, "r": float(r), "distance": float(d), "v": float(val)}
    if oracle is not None:
        row["oracle"] = float(oracle(r))
        row["error"] = abs(row["v"] - row["oracle"])
    return row

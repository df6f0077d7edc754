"""Minimal solutions of -Δu = λ f(u), λ < 0, with zero Dirichlet data.

The solve uses damped Newton with a monotone-iteration fallback and, when a
direct solve from the initial guess fails, continuation in λ.

For finite t0 the unknown is the excess ``w = u - t0`` rather than ``u``.
Deep in the asymptotic regime u is within 1e-40 of t0.  Such a value is not
representable as a double next to t0, but w is, and the tridiagonal and
M-matrix solves below keep its relative accuracy.

An absolute residual of 1e-10 is below rounding when |L| |u| is large
(|L| ~ 4/h^2).  Convergence is therefore declared when the residual meets
``newton_tol``, or when the Newton update is negligible and the residual has
reached its rounding floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .domain import Domain, DomainError, SolutionField
from .nonlinearity import Nonlinearity

__all__ = [
    "ConvergenceError",
    "SolveConfig",
    "BranchRecord",
    "OrderingReport",
    "solve_minimal",
    "sweep_branch",
    "compare_fields",
    "residual_lambda_f",
    "stability_eigenvalue",
]

EPS = np.finfo(float).eps
DEAD_CORE_FORCING = 1e-10


class ConvergenceError(RuntimeError):
    """Newton and the monotone fallback both failed; ``best`` holds the best iterate."""

    def __init__(self, message, best: SolutionField | None = None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class SolveConfig:
    newton_tol: float = 1e-10
    max_newton: int = 50
    min_damping: float = 2.0**-20
    ratio: float = 10.0**0.25          # λ-continuation ratio
    max_ratio_halvings: int = 10
    guess: str = "zero"                 # zero | previous_lambda | supplied
    monotone_sweeps: int = 30
    continuation: bool = True           # fall back to internal λ-continuation

    def __post_init__(self):
        if not self.newton_tol > 0:
            raise ValueError("newton_tol must be positive")
        if self.max_newton < 1:
            raise ValueError("max_newton must be at least 1")
        if not self.ratio > 1:
            raise ValueError("continuation ratio must exceed 1")
        if self.guess not in {"zero", "previous_lambda", "supplied"}:
            raise ValueError(f"unknown guess policy {self.guess!r}")


class _Problem:
    """Residual and Jacobian in the work variable on interior nodes.

    The Newton driver below only needs ``residual``, ``jacobian``, ``floor``
    and ``monotone``; other problems (large solutions) supply the same.
    """

    def __init__(self, f: Nonlinearity, domain: Domain, lam: float):
        self.f, self.domain, self.lam = f, domain, float(lam)
        self.shift = f.t0 if f.finite_threshold else 0.0
        self.LII, self.LIB = domain.split_laplacian()
        self.absL = abs(self.LII)
        self.wB = np.full(len(domain.boundary_index), -self.shift)  # u = 0 on the boundary
        self.bterm = self.LIB @ self.wB
        self.bscale = abs(self.LIB) @ np.abs(self.wB)

    def fw(self, w):
        return self.f.excess(w) if self.f.finite_threshold else self.f.eval(w)

    def dfw(self, w):
        return self.f.excess_deriv(w) if self.f.finite_threshold else self.f.deriv(w)

    def residual(self, w):
        return self.LII @ w + self.bterm + self.lam * self.fw(w)

    def floor(self, w):
        """Rounding level of the residual at w."""
        scale = self.absL @ np.abs(w) + self.bscale + abs(self.lam) * np.abs(self.fw(w))
        return 64.0 * EPS * float(np.max(scale))

    def jacobian(self, w):
        d = self.dfw(w)
        d = np.where(np.isfinite(d), d, 0.0)
        return (self.LII + sp.diags(self.lam * d)).tocsc()

    def newton_rhs(self, w):
        """J w - r(w), formed without cancellation (tiny excess values keep their digits)."""
        d = self.dfw(w)
        d = np.where(np.isfinite(d), d, 0.0)
        return self.lam * (d * w - self.fw(w)) - self.bterm

    def to_field(self, w, res, iters, converged, method):
        dom = self.domain
        ii = dom.interior_index
        u = np.zeros(dom.n)
        excess = None
        if self.f.finite_threshold:
            # u >= t0 by the maximum principle; sub-t0 round-off in a dead core (f = 0 there) is dropped
            w = np.maximum(w, 0.0)
            excess = np.empty(dom.n)
            excess[ii] = w
            excess[dom.boundary_index] = self.wB
            u[ii] = w + self.shift
        else:
            u[ii] = w
        u[dom.boundary_index] = 0.0
        return SolutionField(dom, u, self.lam, residual_norm=res, newton_iters=iters, converged=converged,
                             t0=self.f.t0, excess=excess, method=method)

    def initial(self, guess):
        ii = self.domain.interior_index
        if guess is None:
            return np.full(len(ii), -self.shift)
        if isinstance(guess, SolutionField):
            w = guess.gap()[ii] if self.f.finite_threshold else guess.values[ii]
            return np.array(w, dtype=float)
        g = np.asarray(guess, dtype=float)
        if g.shape == (self.domain.n,):
            g = g[ii]
        elif g.shape != (len(ii),):
            raise ValueError("initial guess has the wrong shape")
        return g - self.shift

    def monotone(self, w, sweeps):
        """(-L + m) w+ = m w + λ f(w) with m = -λ Lip(f) on the current range."""
        lo = float(np.min(w))
        hi = float(np.max(w))
        lip = self.dfw(np.linspace(max(lo, 0.0) if self.f.finite_threshold else lo, hi, 257))
        lip = lip[np.isfinite(lip)]
        m = -self.lam * (float(lip.max()) if lip.size else 0.0)
        A = (-self.LII + sp.diags(np.full(len(w), m))).tocsc()
        solve = spla.factorized(A)
        for _ in range(sweeps):
            w = solve(m * w + self.lam * self.fw(w) + self.bterm)
        return w


def _newton(prob: _Problem, w, cfg: SolveConfig):
    r = prob.residual(w)
    rn = float(np.max(np.abs(r)))
    best = (rn, w.copy())
    iters = 0
    method = "newton"
    for iters in range(1, cfg.max_newton + 1):
        # the Newton iterate is solved for directly, J w+ = J w - r, so that
        # components far below |w| are not lost to cancellation in w + d
        try:
            J = prob.jacobian(w)
            rhs = prob.newton_rhs(w) if hasattr(prob, "newton_rhs") else J @ w - r
            target = spla.spsolve(J, rhs)
        except Exception:
            target = np.full_like(w, np.nan)
        d = target - w
        step_ok = False
        if np.all(np.isfinite(target)):
            t = 1.0
            while t >= cfg.min_damping:
                wn = target if t == 1.0 else w + t * d
                rn_new = float(np.max(np.abs(prob.residual(wn))))
                if np.isfinite(rn_new) and (rn_new < rn or rn_new <= prob.floor(wn)):
                    step_ok = True
                    break
                t *= 0.5
        if not step_ok:
            # globalisation failed: monotone iteration always makes progress
            method = "newton+monotone"
            wn = prob.monotone(w, cfg.monotone_sweeps)
            if wn is None or not np.all(np.isfinite(wn)):
                break
            d = wn - w
            t = 1.0
        w = wn
        r = prob.residual(w)
        rn = float(np.max(np.abs(r)))
        if rn < best[0]:
            best = (rn, w.copy())
        small_step = float(np.max(np.abs(t * d))) <= cfg.newton_tol * (1.0 + float(np.max(np.abs(w))))
        if rn <= cfg.newton_tol or (small_step and t == 1.0 and rn <= prob.floor(w)):
            return w, rn, iters, True, method
    return best[1], best[0], iters, False, method


def solve_minimal(f: Nonlinearity, domain: Domain, lam: float, cfg: SolveConfig | None = None,
                  guess=None) -> SolutionField:
    """The unique (minimal, stable) solution for λ < 0.

    ``guess`` may be a :class:`SolutionField`, a node array or ``None`` (zero
    initial guess).  Raises :class:`ConvergenceError` carrying the best
    iterate if no method converges.
    """
    cfg = cfg or SolveConfig()
    lam = float(lam)
    if not lam < 0:
        raise ValueError("λ must be negative")
    prob = _Problem(f, domain, lam)
    w0 = prob.initial(guess)
    w, rn, iters, ok, method = _newton(prob, w0, cfg)
    if ok:
        return _checked(prob.to_field(w, rn, iters, True, method), f)
    if not cfg.continuation:
        raise ConvergenceError(f"Newton failed at λ={lam:g} (residual {rn:.3g})", prob.to_field(w, rn, iters, False, method))
    # continuation from the guess's λ when it is milder, else from a mild λ
    local = replace(cfg, continuation=False)
    if isinstance(guess, SolutionField) and guess.lam > lam:
        base = guess
    else:
        base = solve_minimal(f, domain, max(lam / cfg.ratio, -1.0), local)
    sol, extra = _continue(f, domain, base, lam, cfg)
    sol.newton_iters += iters + extra
    sol.method = "continuation"
    return sol


def _continue(f, domain, start: SolutionField, target: float, cfg: SolveConfig):
    """Walk from ``start`` to ``target`` geometrically, halving the ratio on failure."""
    cur = start
    log_step = math.log(cfg.ratio)
    halvings = 0
    extra = 0
    local = replace(cfg, continuation=False)
    if cur.lam <= target:
        return cur, 0
    while cur.lam > target:
        nxt = max(target, cur.lam * math.exp(log_step))
        try:
            sol = solve_minimal(f, domain, nxt, local, guess=cur)
        except ConvergenceError as exc:
            halvings += 1
            if halvings > cfg.max_ratio_halvings:
                raise ConvergenceError(f"continuation stalled at λ={cur.lam:g} toward {target:g}", exc.best) from exc
            log_step *= 0.5
            continue
        extra += sol.newton_iters
        cur = sol
    return cur, extra


def _checked(sol: SolutionField, f: Nonlinearity) -> SolutionField:
    ii = sol.domain.interior_index
    below_zero = bool(np.all(sol.values[ii] < 1e-12))
    above_t0 = bool(np.all(sol.gap()[ii] > -1e-12)) if f.finite_threshold else True
    sol.info["bounds_ok"] = below_zero and above_t0
    if f.finite_threshold:
        # dead core (possible when f is not Lipschitz at t0): u rests on t0 and the forcing vanishes
        forcing = np.abs(sol.lam * f.excess(sol.gap()[ii]))
        sol.info["dead_core_nodes"] = int(np.sum(forcing <= DEAD_CORE_FORCING))
    return sol


# ---------------------------------------------------------------------------
# branches
# ---------------------------------------------------------------------------

@dataclass
class BranchRecord:
    f: Nonlinearity
    domain: Domain
    entries: list = field(default_factory=list)
    fields: list = field(default_factory=list)
    truncated: bool = False
    error: str | None = None

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([e["lambda"] for e in self.entries])

    @property
    def min_values(self) -> np.ndarray:
        return np.array([e["min_u"] for e in self.entries])

    def is_monotone(self) -> bool:
        """More negative λ gives a strictly smaller minimum.

        Compared through min u - t0 for finite t0, which keeps its digits
        after u itself has rounded to t0.
        """
        m = np.array([e["min_gap"] for e in self.entries]) if self.f.finite_threshold else self.min_values
        return bool(np.all(np.diff(m) < 0))

    def nodewise_monotone(self) -> bool:
        """u at the more negative λ lies strictly below at every interior node (needs kept fields)."""
        if len(self.fields) != len(self.entries):
            raise ValueError("nodewise check needs the branch fields (keep_fields=True)")
        return all(compare_fields(a, b, tol=0.0).strict for a, b in zip(self.fields, self.fields[1:]))

    def rows(self):
        cols = ("lambda", "min_u", "argmin", "residual", "iters", "J_lambda", "supK_lambda_f")
        return cols, [[e[c] for c in cols] for e in self.entries]


def sweep_branch(f: Nonlinearity, domain: Domain, lambdas: Sequence[float], cfg: SolveConfig | None = None,
                 compact_fraction: float = 0.5, keep_fields: bool = True) -> BranchRecord:
    """Solve along strictly decreasing negative ``lambdas``, warm-starting each solve."""
    from .asymptotics import energy  # energy lives with the asymptotic post-processing

    cfg = cfg or SolveConfig(guess="previous_lambda")
    lams = [float(x) for x in lambdas]
    if not lams or any(x >= 0 for x in lams) or any(b >= a for a, b in zip(lams, lams[1:])):
        raise ValueError("λ schedule must be strictly decreasing negatives")
    rec = BranchRecord(f, domain)
    prev = None
    for lam in lams:
        guess = prev if cfg.guess == "previous_lambda" else None
        try:
            sol = solve_minimal(f, domain, lam, cfg, guess=guess)
        except ConvergenceError as exc:
            rec.truncated, rec.error = True, str(exc)
            break
        e = sol.summary()
        e["J_lambda"] = energy(f, sol).total
        e["supK_lambda_f"] = residual_lambda_f(sol, f, compact_fraction)
        e["bounds_ok"] = sol.info.get("bounds_ok", True)
        rec.entries.append(e)
        if keep_fields:
            rec.fields.append(sol)
        prev = sol
    return rec


# ---------------------------------------------------------------------------
# comparison and diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrderingReport:
    ordered: bool
    strict: bool
    min_gap: float
    max_violation: float
    tolerance: float
    violations: tuple = ()

    def as_dict(self):
        return {"ordered": self.ordered, "strict": self.strict, "min_gap": self.min_gap,
                "max_violation": self.max_violation, "tolerance": self.tolerance,
                "violations": list(self.violations)}


def _sample(field_: SolutionField, target: Domain, gap: bool):
    src = field_.domain
    vals = field_.gap() if gap else field_.values
    if src is target:
        return vals
    if src.coords.ndim == 1 and target.coords.ndim == 1 and src.kind == target.kind:
        x = target.coords
        if x.min() < src.coords.min() - 1e-12 or x.max() > src.coords.max() + 1e-12:
            raise DomainError("target nodes lie outside the source domain")
        return np.interp(x, src.coords, vals)
    if src.coords.ndim == 2 and target.coords.ndim == 2:
        from scipy.interpolate import LinearNDInterpolator

        out = LinearNDInterpolator(src.coords, vals)(target.coords)
        if np.any(np.isnan(out[target.interior])):
            raise DomainError("target nodes lie outside the source domain")
        return out
    raise DomainError("incompatible domains")


def compare_fields(upper: SolutionField, lower: SolutionField, mask=None, tol: float | None = None) -> OrderingReport:
    """Check ``lower <= upper`` on ``upper``'s interior nodes (or ``mask``).

    ``lower`` is interpolated onto ``upper``'s nodes when the meshes differ.
    Differences are taken in the excess variable when both fields carry it.
    """
    dom = upper.domain
    use_gap = upper.excess is not None and lower.excess is not None and upper.t0 == lower.t0
    a = upper.gap() if use_gap else upper.values
    b = _sample(lower, dom, use_gap)
    sel = dom.interior if mask is None else (np.asarray(mask, dtype=bool) & dom.interior)
    if tol is None:
        tol = 1e-9 * (1.0 + max(np.max(np.abs(upper.values)), np.max(np.abs(lower.values))))
    diff = a[sel] - b[sel]
    viol = np.flatnonzero(sel)[diff < -tol]
    locs = tuple(float(np.linalg.norm(dom.coords[i])) for i in viol[:20])
    return OrderingReport(
        ordered=viol.size == 0,
        strict=bool(np.all(diff > 0)),
        min_gap=float(diff.min()),
        max_violation=float(max(0.0, -diff.min())),
        tolerance=float(tol),
        violations=locs,
    )


def residual_lambda_f(u: SolutionField, f: Nonlinearity, compact_fraction: float = 0.5) -> float:
    """sup over the compact K of |λ f(u)|."""
    K = u.domain.compact_mask(compact_fraction)
    vals = f.excess(u.gap()[K]) if f.finite_threshold else f.eval(u.values[K])
    return float(np.max(np.abs(u.lam * vals)))


def stability_eigenvalue(u: SolutionField, f: Nonlinearity, tol: float = 1e-8, max_iter: int = 500,
                         seed: int = 0) -> float:
    """Smallest eigenvalue of -Δ - λ f'(u) by inverse power iteration."""
    dom = u.domain
    ii = dom.interior_index
    LII, _ = dom.split_laplacian()
    d = f.excess_deriv(u.gap()[ii]) if f.finite_threshold else f.deriv(u.values[ii])
    d = np.where(np.isfinite(d), d, 0.0)
    A = (-LII - sp.diags(u.lam * d)).tocsc()
    solve = spla.factorized(A)
    x = np.random.default_rng(seed).random(len(ii)) + 1.0  # positive start overlaps the ground state
    x /= np.linalg.norm(x)
    mu = np.inf
    for _ in range(max_iter):
        y = solve(x)
        ny = np.linalg.norm(y)
        mu_new = float(np.dot(x, y)) / ny**2 if ny > 0 else np.inf
        x = y / ny
        if abs(mu_new - mu) <= tol * abs(mu_new):
            return mu_new
        mu = mu_new
    return mu

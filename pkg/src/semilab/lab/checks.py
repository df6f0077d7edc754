"""Experiment checks.  Each check returns exactly one :class:`Verdict`.

A failing check is a recorded verdict; only configuration errors raise.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from ..asymptotics import FrameError, LimitProfile, RescaleFrame, energy, frame_for, robin_check_disk, verify_limit
from ..domain import Domain, RadialBall
from ..homogeneity import HomogeneityError, homogeneity_limit
from ..keller import KellerOssermanError, keller_osserman
from ..large import LargeSolutionError, boundary_growth_probe, bounded_solve, large_solve, shoot_entire
from ..nonlinearity import LimitNonlinearity, catalog
from ..solver import (ConvergenceError, SolveConfig, compare_fields, solve_minimal, stability_eigenvalue,
                      sweep_branch)
from . import oracles, plotting
from .config import ConfigError, ExperimentConfig, build_domain, build_nonlinearity
from .io import write_csv

STATEMENTS = {
    "branch": "unique minimal solution with t0 < u < 0, decreasing in λ at every node",
    "energy": "energy of the minimal solution grows like C sqrt(-λ)",
    "theorem12": "finite threshold: (u - t0)/α converges to the large solution or the entire profile",
    "theorem15": "positive tail at -inf: u/λ converges to c0 times the torsion function",
    "theorem16": "infinite threshold: (u - β)/α converges to the large or bounded limit solution",
    "large": "boundary blow-up solution of Δv = g(v) by boundary-lift truncation",
    "entire": "entire radial profiles of Δv = v^p with v(0) = 1",
    "ko": "Keller-Osserman classification of t^p and e^t",
    "homogeneity": "rescaled ratios f(α(β)t + β)/f(β) converge to the predicted limit",
    "robin": "large solution of Δv = e^v on the unit disk equals 2R(x) + log 8",
}


@dataclass
class Verdict:
    check: str
    statement: str
    status: str                       # pass | fail | info
    metrics: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    wall_time: float = 0.0
    message: str = ""

    def as_dict(self):
        return {"check": self.check, "statement": self.statement, "status": self.status, "metrics": self.metrics,
                "artifacts": list(self.artifacts), "wall_time": self.wall_time, "message": self.message}


@dataclass
class CheckContext:
    check: str
    config: ExperimentConfig
    outdir: Path
    cache: dict = field(default_factory=dict)

    def __post_init__(self):
        res = self.config.for_check(self.check)
        self.f_spec, self.dom_spec = res["nonlinearity"], res["domain"]
        self.lambdas, self.options = res["lambdas"], res["options"]
        self.cfg = self.config.solve_config()
        self.artifacts: list[str] = []

    def path(self, name: str) -> Path:
        return self.outdir / f"{self.check}_{name}"

    def csv(self, name, header, rows):
        p = write_csv(self.path(name), header, rows)
        self.artifacts.append(p.name)
        return p

    def plot(self, name, fn: Callable, *args, **kwargs):
        p = fn(self.path(name), *args, **kwargs)
        self.artifacts.append(p.name)
        return p

    def opt(self, key, default=None):
        return self.options.get(key, default)

    @property
    def f(self):
        return build_nonlinearity(self.f_spec, f"options.{self.check}.nonlinearity")

    def domain(self, spec=None) -> Domain:
        spec = spec or self.dom_spec
        key = ("domain", json.dumps(spec, sort_keys=True))
        if key not in self.cache:
            self.cache[key] = build_domain(spec, f"options.{self.check}.domain")
        return self.cache[key]

    def branch(self, f_spec=None, dom_spec=None, lambdas=None):
        """Warm-started branch, shared between checks with the same data."""
        f_spec, dom_spec = f_spec or self.f_spec, dom_spec or self.dom_spec
        lambdas = list(lambdas if lambdas is not None else self.lambdas)
        key = ("branch", json.dumps([f_spec, dom_spec, lambdas, self.config.solver], sort_keys=True))
        if key not in self.cache:
            cfg = SolveConfig(**{**self.config.solver, "guess": "previous_lambda"})
            self.cache[key] = sweep_branch(build_nonlinearity(f_spec), self.domain(dom_spec), lambdas, cfg)
        return self.cache[key]


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _decreasing(err, last: int = 4) -> bool:
    e = np.asarray(err, dtype=float)[-last:]
    return bool(np.all(np.isfinite(e)) and np.all(np.diff(e) < 0))


def _dim(domain: Domain) -> int:
    if isinstance(domain, RadialBall):
        return domain.dim
    return 1 if domain.coords.ndim == 1 else 2


def refined_spec(spec: dict, lam: float, factor: float = 10.0) -> dict:
    """Mesh with h <= 1/(factor sqrt(-λ)) for the O(1/sqrt(-λ)) boundary layer (interval, ball)."""
    spec = dict(spec)
    k = math.sqrt(-lam)
    if spec["kind"] == "interval":
        L = float(spec.get("b", 1.0)) - float(spec.get("a", -1.0))
        spec["n"] = max(int(spec.get("n", 2001)), int(math.ceil(factor * k * L)) + 1)
    elif spec["kind"] == "ball":
        L = float(spec.get("radius", 1.0))
        spec["n"] = max(int(spec.get("n", 2001)), int(math.ceil(factor * k * L)) + 1)
    elif spec["kind"] in ("disk2d", "square2d"):
        spec["h"] = min(float(spec.get("h", 0.01)), 1.0 / (factor * k))
    return spec


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def check_branch(ctx: CheckContext) -> Verdict:
    f = ctx.f
    rec = ctx.branch()
    m: dict = {"solved": len(rec.entries), "requested": len(ctx.lambdas), "truncated": rec.truncated}
    ok = not rec.truncated
    if rec.entries:
        m["all_converged"] = all(e["converged"] for e in rec.entries)
        m["bounds_ok"] = all(e["bounds_ok"] for e in rec.entries)
        m["max_residual"] = max(e["residual"] for e in rec.entries)
        m["min_monotone"] = rec.is_monotone()
        m["nodewise_monotone"] = rec.nodewise_monotone()
        ok &= m["all_converged"] and m["bounds_ok"] and m["min_monotone"] and m["nodewise_monotone"]
        cols, rows = rec.rows()
        ctx.csv("branch.csv", cols, rows)
        ctx.plot("branch.svg", plotting.branch_diagram, rec.lambdas, rec.min_values, title=f.describe(), t0=f.t0)

    name = ctx.opt("oracle")
    if name and rec.entries:
        fn = oracles.MINIMAL[name]
        tol, scaled = float(ctx.opt("oracle_tol", 1e-4)), bool(ctx.opt("oracle_tol_scaled", False))
        rows, good = [], True
        for sol in rec.fields:
            x = sol.domain.radius() if isinstance(sol.domain, RadialBall) else sol.domain.coords
            err = float(np.max(np.abs(sol.values - fn(sol.lam, x))))
            bound = tol * (1 + math.sqrt(-sol.lam)) if scaled else tol
            rows.append([sol.lam, err, bound])
            good &= err <= bound
        ctx.csv("oracle.csv", ("lambda", "error_sup", "bound"), rows)
        m["oracle"], m["oracle_errors"] = name, [r[1] for r in rows]
        ok &= good

    starts = int(ctx.opt("uniqueness_starts", 0))
    if starts and rec.entries:
        lam = rec.fields[-1].lam
        ref = rec.fields[-1]
        rng = np.random.default_rng(ctx.config.seed)
        dom = ref.domain
        lo = max(f.t0, -1e3 * (1 + abs(lam))) if f.finite_threshold else -1e3 * (1 + abs(lam))
        spread = 0.0
        for _ in range(starts):
            g0 = rng.uniform(lo, 0.0, dom.n)
            g0[dom.boundary_index] = 0.0
            try:
                s = solve_minimal(f, dom, lam, SolveConfig(**{**ctx.config.solver, "guess": "supplied"}), guess=g0)
                spread = max(spread, float(np.max(np.abs(s.values - ref.values))))
            except ConvergenceError:
                spread = math.inf
        m["uniqueness_spread"] = spread
        m["uniqueness_bound"] = 10 * ctx.cfg.newton_tol
        ok &= spread <= 10 * ctx.cfg.newton_tol

    if ctx.opt("stability") and rec.entries:
        eig = [stability_eigenvalue(s, f) for s in rec.fields]
        m["stability_eigenvalues"] = eig
        ok &= all(e > 0 for e in eig)

    supk = ctx.opt("supK")
    if supk and rec.entries:
        vals = [e["supK_lambda_f"] for e in rec.entries]
        m["supK_lambda_f"] = vals
        # judged on the tail of the sweep: the quantity first grows with |λ|
        tail = vals[-int(ctx.opt("supK_tail", 3)):]
        if supk == "vanishing":
            ok &= bool(np.all(np.diff(tail) < 0) and tail[-1] < float(ctx.opt("supK_tol", 1e-2)))
        elif supk == "persistent":
            ok &= min(tail) >= 1.0
        else:
            raise ConfigError(f"supK must be 'vanishing' or 'persistent', got {supk!r}", f"options.{ctx.check}")
    return Verdict("branch", STATEMENTS["branch"], _status(ok), m, message=rec.error or "")


def check_energy(ctx: CheckContext) -> Verdict:
    f = ctx.f
    refine = bool(ctx.opt("refine", False))
    rows, norms = [], []
    if refine:
        fields = [solve_minimal(f, build_domain(refined_spec(ctx.dom_spec, lam)), lam, ctx.cfg) for lam in ctx.lambdas]
    else:
        rec = ctx.branch()
        fields = rec.fields
    for sol in fields:
        e = energy(f, sol)
        rows.append([e.lam, e.kinetic, e.potential, e.total, e.normalized, sol.domain.n])
        norms.append(e.normalized)
    ctx.csv("energy.csv", ("lambda", "kinetic", "potential", "J", "J_normalized", "nodes"), rows)
    ctx.plot("energy.svg", plotting.series_plot, -np.array([r[0] for r in rows]), {"J/sqrt(-λ)": norms},
             title="normalized energy", xlabel="-λ", ylabel="J/sqrt(-λ)", logx=True)
    m = {"J_normalized": norms, "anchor": f.anchor if math.isfinite(f.anchor) else str(f.anchor)}
    ok = bool(norms) and all(math.isfinite(x) for x in norms)
    target = ctx.opt("target")
    if target is not None:
        rel = abs(norms[-1] - float(target)) / abs(float(target))
        m.update(target=float(target), rel_error=rel, rel_tol=float(ctx.opt("rel_tol", 0.02)))
        ok &= rel <= m["rel_tol"]
    alt = ctx.opt("alt_target")
    if alt is not None:
        m["alt_target"] = float(alt)
        m["alt_rel_error"] = abs(norms[-1] - float(alt)) / abs(float(alt))
    if ctx.opt("cauchy"):
        steps = [abs(b - a) / abs(b) for a, b in zip(norms, norms[1:])]
        m["cauchy_steps"] = steps
        ok &= bool(steps) and steps[-1] <= float(ctx.opt("rel_tol", 0.02))
    return Verdict("energy", STATEMENTS["energy"], _status(ok), m)


def _limit_rows(ctx, fields, frames, profile, mask_fn=None, oracle=None):
    rows = []
    for sol, fr in zip(fields, frames):
        mask = mask_fn(sol.domain) if mask_fn else None
        res = verify_limit([sol], [fr], profile, compact_fraction=float(ctx.opt("compact_fraction", 0.8)),
                           mask=mask)
        row = res["rows"][0]
        e = energy(ctx.f, sol)
        row["J"], row["J_normalized"] = e.total, e.normalized
        if oracle is not None:
            x = sol.domain.radius() if isinstance(sol.domain, RadialBall) else sol.domain.coords
            u = oracle(sol.lam, x)
            K = sol.domain.interior & (mask if mask is not None else sol.domain.compact_mask(0.8))
            v, _ = profile.evaluate(sol.domain, fr)
            row["oracle_error_sup"] = float(np.max(np.abs((u[K] - fr.beta) / fr.alpha - v[K])))
        rows.append(row)
    return rows


def _limit_verdict(ctx, check, rows, extra: dict) -> Verdict:
    cols = ["lambda", "alpha", "beta", "eps", "error_sup", "error_grad", "J", "J_normalized"]
    if rows and "oracle_error_sup" in rows[0]:
        cols.append("oracle_error_sup")
    ctx.csv("limit.csv", cols, [[r[c] for c in cols] for r in rows])
    lams = [r["lambda"] for r in rows]
    err = [r["error_sup"] for r in rows]
    series = {"values": err, "gradients": [r["error_grad"] for r in rows]}
    if "oracle_error_sup" in cols:
        series["closed form"] = [r["oracle_error_sup"] for r in rows]
    ctx.plot("error.svg", plotting.error_vs_lambda, lams, series, title=STATEMENTS[check])
    slope = float(np.polyfit(np.log(-np.array(lams)), np.log(err), 1)[0]) if len(rows) >= 2 and min(err) > 0 \
        else math.nan
    m = {"errors": err, "grad_errors": [r["error_grad"] for r in rows], "fitted_slope": slope, **extra}
    dec = len(rows) < 2 or _decreasing(err)
    m["decreasing"] = dec
    tol = ctx.opt("tol")
    if tol is None:
        ok = dec
    else:
        # exact self-similar cases have no o(1) term, only mesh error below tol
        m["tol"] = float(tol)
        ok = err[-1] <= float(tol) and (dec or max(err) <= float(tol))
    if "oracle_error_sup" in cols:
        gap = max(abs(r["error_sup"] - r["oracle_error_sup"]) for r in rows)
        m["oracle_gap"] = gap
        m["oracle_gap_tol"] = float(ctx.opt("oracle_gap_tol", 1e-3))
        ok &= gap <= m["oracle_gap_tol"]
    return Verdict(check, STATEMENTS[check], _status(ok), m)


def _radius_mask(ctx):
    r_max = ctx.opt("r_max")
    if r_max is None:
        return None
    return lambda dom: dom.radius() <= float(r_max)


def check_theorem12(ctx: CheckContext) -> Verdict:
    f = ctx.f
    if not f.finite_threshold:
        raise ConfigError("theorem12 needs a finite threshold t0", f"options.{ctx.check}.nonlinearity")
    rec = ctx.branch()
    try:
        frames = [frame_for(f, s.lam, s) for s in rec.fields]
    except FrameError as exc:
        return Verdict("theorem12", STATEMENTS["theorem12"], "fail", {}, message=str(exc))
    regime = frames[-1].regime
    dom = ctx.domain()
    if regime == "large_solution":
        g = f.rescale.limit if f.rescale is not None else None
        if g is None:
            raise ConfigError("family has no analytic limit g", f"options.{ctx.check}")
        name = ctx.opt("profile_oracle")
        if name:
            profile = LimitProfile.closed_form(oracles.LIMITS[name], label=name)
        else:
            profile = LimitProfile.from_blowup(large_solve(g, dom, compact_fraction=0.8), label=g.describe())
    else:
        p = f.rescale.exponent if f.rescale is not None and f.rescale.exponent is not None else 1.0
        prof = shoot_entire(p, _dim(dom), float(ctx.opt("r_max_profile", 5.0)))
        profile = LimitProfile.from_entire(prof, y_max=float(ctx.opt("y_max", 3.0)))
    rows = _limit_rows(ctx, rec.fields, frames, profile, _radius_mask(ctx))
    return _limit_verdict(ctx, "theorem12", rows, {"regime": regime, "profile": profile.label})


def check_theorem15(ctx: CheckContext) -> Verdict:
    f = ctx.f
    if f.finite_threshold or not f.tail_limit > 0:
        raise ConfigError("theorem15 needs t0 = -inf and a positive tail limit", f"options.{ctx.check}")
    rec = ctx.branch()
    frames = [frame_for(f, s.lam, s) for s in rec.fields]
    exact = oracles.torsion_exact(ctx.dom_spec)
    if exact is not None:
        def ev(domain, frame):
            x = domain.coords if ctx.dom_spec["kind"] == "interval" else domain.radius()
            return -exact(x), np.ones(domain.n, dtype=bool)
        profile = LimitProfile(ev, "-torsion (analytic)")
    else:
        profile = LimitProfile.torsion_profile()
    rows = _limit_rows(ctx, rec.fields, frames, profile, _radius_mask(ctx))
    return _limit_verdict(ctx, "theorem15", rows, {"regime": "torsion", "profile": profile.label,
                                                   "c0": f.tail_limit})


def check_theorem16(ctx: CheckContext) -> Verdict:
    f = ctx.f
    if f.finite_threshold or f.tail_limit > 0:
        raise ConfigError("theorem16 needs t0 = -inf and tail limit 0", f"options.{ctx.check}")
    rec = ctx.branch()
    try:
        frames = [frame_for(f, s.lam, s) for s in rec.fields]
    except FrameError as exc:
        return Verdict("theorem16", STATEMENTS["theorem16"], "fail", {}, message=str(exc))
    q = ctx.opt("alpha_power")
    if q is not None:
        # fixed normalisation α = (-λ)^q, β = 0 in place of the fitted frame
        frames = [RescaleFrame(fr.lam, (-fr.lam) ** float(q), 0.0, fr.regime, shift=fr.shift) for fr in frames]
    regime = frames[-1].regime
    dom = ctx.domain()
    name = ctx.opt("profile_oracle")
    if name:
        profile = LimitProfile.closed_form(oracles.LIMITS[name], label=name)
    else:
        g = f.rescale.limit
        if regime == "bounded_limit":
            if g.kind != "inverse_power":
                raise ConfigError("bounded limit solve supports inverse-power limits", f"options.{ctx.check}")
            # Δv = g(v - A) with A = lim β/α moves the singularity of g to center + A
            A = frames[-1].shift
            g = LimitNonlinearity.inverse_power(g.p, center=g.center + A, scale=g.scale)
            if abs(g.center) < 1e-6:
                g = LimitNonlinearity.inverse_power(g.p, center=0.0, scale=g.scale)
            sol = bounded_solve(g, dom)
        else:
            sol = large_solve(g, dom)
        profile = LimitProfile.from_blowup(sol, label=g.describe())
    oracle = oracles.MINIMAL[ctx.opt("oracle")] if ctx.opt("oracle") else None
    rows = _limit_rows(ctx, rec.fields, frames, profile, _radius_mask(ctx), oracle)
    return _limit_verdict(ctx, "theorem16", rows, {"regime": regime, "profile": profile.label})


def _limit_g(spec: dict) -> LimitNonlinearity:
    kind = spec.get("kind")
    if kind == "power":
        return LimitNonlinearity.power(float(spec["p"]), shift=float(spec.get("shift", 0.0)),
                                       scale=float(spec.get("scale", 1.0)))
    if kind == "exponential":
        return LimitNonlinearity.exponential(scale=float(spec.get("scale", 1.0)))
    if kind == "inverse_power":
        return LimitNonlinearity.inverse_power(float(spec["p"]), center=float(spec.get("center", 0.0)),
                                               scale=float(spec.get("scale", 1.0)))
    raise ConfigError(f"unknown limit kind {kind!r}", "options.large.g")


def check_large(ctx: CheckContext) -> Verdict:
    g = _limit_g(ctx.opt("g", {}))
    dom = ctx.domain()
    m: dict = {"g": g.describe()}
    try:
        sol = large_solve(g, dom, levels=int(ctx.opt("levels", 24)), tol=float(ctx.opt("trunc_tol", 1e-8)),
                          method=ctx.opt("method", "auto"))
    except (LargeSolutionError, KellerOssermanError) as exc:
        # a refused solve is the expected outcome when KO fails
        expect_refusal = bool(ctx.opt("expect_refusal", False))
        return Verdict("large", STATEMENTS["large"], _status(expect_refusal), {"refused": True, **m},
                       message=str(exc))
    ok = sol.converged and not ctx.opt("expect_refusal", False)
    r = dom.radius()
    center = float(sol.values[int(np.argmin(np.where(dom.interior, r, np.inf)))])
    m.update(method=sol.method, center_value=center, levels=len(sol.levels), converged=sol.converged)
    header, rows = sol.rows()
    ctx.csv("levels.csv", header, rows)
    order = np.argsort(r) if dom.coords.ndim == 1 else None
    if order is not None:
        sel = order[np.isfinite(sol.values[order]) & (dom.coords[order] >= 0 if dom.kind == "interval" else True)]
        ctx.csv("profile.csv", ("r", "v"), list(zip(r[sel], sol.values[sel])))
    finite_d = [(M, d) for M, d in zip(sol.levels, sol.deltas) if np.isfinite(M) and np.isfinite(d) and d > 0]
    if finite_d:
        ctx.plot("deltas.svg", plotting.series_plot, [a for a, _ in finite_d], {"interior delta": [b for _, b in finite_d]},
                 title=g.describe(), xlabel="M", ylabel="delta", logx=True, logy=True)
    if ctx.opt("expected_center") is not None:
        exp_c = float(ctx.opt("expected_center"))
        m.update(expected_center=exp_c, center_error=abs(center - exp_c), center_tol=float(ctx.opt("center_tol", 1e-3)))
        ok &= m["center_error"] <= m["center_tol"]
    if ctx.opt("alt_center") is not None:
        m["alt_center"] = float(ctx.opt("alt_center"))
        m["alt_center_error"] = abs(center - m["alt_center"])
    name = ctx.opt("profile_oracle")
    if name:
        K = dom.interior & (r <= float(ctx.opt("r_max", 0.9)))
        dev = float(np.max(np.abs(sol.values[K] - oracles.LIMITS[name](r[K]))))
        m.update(profile_oracle=name, profile_error=dev, profile_tol=float(ctx.opt("profile_tol", 1e-3)))
        ok &= dev <= m["profile_tol"]
    cmp_spec = ctx.opt("compare_domain")
    if cmp_spec:
        odom = build_domain(cmp_spec, "options.large.compare_domain")
        other = large_solve(g, odom)
        # the 1D (radial) solution is interpolated onto the other mesh
        a, b = (sol, other) if dom.coords.ndim == 1 else (other, sol)
        vals, valid = LimitProfile.from_blowup(a).evaluate(b.domain, None)
        K = b.domain.interior & valid & (b.domain.radius() <= float(ctx.opt("compare_r_max", 0.8)))
        dev = float(np.max(np.abs(b.values[K] - vals[K])))
        m.update(compare_error=dev, compare_tol=float(ctx.opt("compare_tol", 5e-3)))
        ok &= dev <= m["compare_tol"]
    if ctx.opt("probe"):
        oracle = oracles.LIMITS.get(ctx.opt("probe_oracle", ""), None)
        rows = boundary_growth_probe(sol, ray_count=int(ctx.opt("rays", 8)), oracle=oracle)
        cols = list(rows[0])
        ctx.csv("probe.csv", cols, [[row[c] for c in cols] for row in rows])
        if oracle is not None:
            m["probe_max_error"] = max(row["error"] for row in rows)
    return Verdict("large", STATEMENTS["large"], _status(ok), m)


def check_entire(ctx: CheckContext) -> Verdict:
    cases = ctx.opt("cases", [{"p": 1, "N": 1}, {"p": 1, "N": 3}, {"p": 0, "N": 2}, {"p": 2, "N": 2}])
    r_max = float(ctx.opt("r_max", 5.0))
    tol = float(ctx.opt("tol", 1e-8))
    res_tol = float(ctx.opt("residual_tol", 1e-8))
    summary, ok = [], True
    for case in cases:
        p, N = float(case["p"]), int(case["N"])
        prof = shoot_entire(p, N, r_max)
        reach = prof.r_max
        # the residual is checked away from a finite blow-up radius
        rr = np.linspace(0.0, reach if not prof.overflow else 0.5 * reach, 201)
        resid = float(np.max(prof.ode_residual(rr[1:-1])))
        mono = bool(np.all(np.diff(prof.v) >= 0) and np.min(prof.v) >= 1.0 - 1e-15)
        row = {"p": p, "N": N, "r_reached": reach, "blowup_radius": prof.blowup_radius, "ode_residual": resid,
               "monotone": mono}
        good = mono and resid <= res_tol and (prof.overflow == (p > 1) or reach >= r_max)
        exact = oracles.entire_exact(p, N)
        if exact is not None:
            grid = np.linspace(0.0, min(reach, r_max), 501)
            err = float(np.max(np.abs(prof(grid) - exact(grid)) / np.maximum(1.0, np.abs(exact(grid)))))
            row["oracle_error"] = err
            good &= err <= tol
        rs = np.linspace(0.0, 0.999 * reach, 400)
        ctx.csv(f"p{p:g}_N{N}.csv", ("r", "v"), list(zip(rs, prof(rs))))
        row["pass"] = good
        ok &= good
        summary.append(row)
    cols = ("p", "N", "r_reached", "blowup_radius", "ode_residual", "monotone", "oracle_error", "pass")
    ctx.csv("summary.csv", cols, [[row.get(c, math.nan) if row.get(c) is not None else math.nan for c in cols]
                                  for row in summary])
    return Verdict("entire", STATEMENTS["entire"], _status(ok), {"cases": summary})


def check_ko(ctx: CheckContext) -> Verdict:
    exps = [float(p) for p in ctx.opt("exponents", [0, 1, 2, 3, 4, 5])]
    t1, tol = float(ctx.opt("t1", 1.0)), float(ctx.opt("tol", 1e-8))
    rows, ok = [], True
    cases = [(f"t^{p:g}", LimitNonlinearity.power(p), p > 1) for p in exps]
    if ctx.opt("exponential", True):
        cases.append(("e^t", LimitNonlinearity.exponential(), True))
    for label, g, expected in cases:
        try:
            res = keller_osserman(g, t1=t1, tol=tol)
            verdict, value, bound = res.verdict, res.value, res.error_bound
        except KellerOssermanError as exc:
            verdict, value, bound = f"error: {exc}", None, math.nan
        match = verdict == ("convergent" if expected else "divergent")
        ok &= match
        rows.append([label, verdict, value if value is not None else math.nan, bound,
                     "convergent" if expected else "divergent", match])
    ctx.csv("table.csv", ("g", "verdict", "value", "error_bound", "expected", "match"), rows)
    return Verdict("ko", STATEMENTS["ko"], _status(ok), {"table": [dict(zip(("g", "verdict", "value", "error_bound",
                                                                              "expected", "match"), r)) for r in rows]})


_ALPHAS = {
    "gap": lambda t0: (lambda b: b - t0),
    "one": lambda t0: (lambda b: 1.0),
    "minus_beta": lambda t0: (lambda b: -b),
}


def check_homogeneity(ctx: CheckContext) -> Verdict:
    cases = ctx.opt("cases", [
        {"family": "plasma_power", "params": {"p": 2.0, "t0": -1.0}, "alpha": "gap", "t": [0.05, 3.0]},
        {"family": "exponential", "params": {}, "alpha": "one", "t": [-3.0, 3.0]},
        {"family": "mems_inverse", "params": {"p": 3.0}, "alpha": "minus_beta", "t": [-3.0, 0.9]},
    ])
    tol = float(ctx.opt("tol", 1e-3))
    points = int(ctx.opt("points", 20))
    rows, metrics, ok = [], [], True
    for case in cases:
        f = catalog(case["family"], case.get("params", {}))
        alpha = _ALPHAS[case["alpha"]](f.t0)
        t = np.linspace(*case["t"], points)
        betas = np.array(case["betas"]) if "betas" in case else (
            f.t0 + np.geomspace(0.5, 1e-8, 10) if f.finite_threshold else -np.geomspace(1.0, 1e8, 10))
        try:
            tab = homogeneity_limit(f, alpha, t, betas)
        except HomogeneityError as exc:
            metrics.append({"family": case["family"], "error": str(exc), "pass": False})
            ok = False
            continue
        dev = tab.max_deviation()
        good = dev <= tol
        ok &= good
        metrics.append({"family": case["family"], "kind": tab.kind, "exponent": tab.exponent, "offset": tab.offset,
                        "max_deviation": dev, "pass": good})
        for ti, emp, pred in zip(t, tab.limit, tab.predicted_raw):
            rows.append([case["family"], tab.betas[-1], ti, emp, pred, abs(emp - pred)])
    ctx.csv("table.csv", ("family", "beta", "t", "ratio", "predicted", "deviation"), rows)
    return Verdict("homogeneity", STATEMENTS["homogeneity"], _status(ok), {"cases": metrics, "tol": tol})


def check_robin(ctx: CheckContext) -> Verdict:
    spec = ctx.dom_spec or {"kind": "ball", "radius": 1.0, "dim": 2, "n": 2001}
    dom = ctx.domain(spec)
    sol = large_solve(LimitNonlinearity.exponential(), dom)
    dev = robin_check_disk(sol, r_max=float(ctx.opt("r_max", 0.9)))
    tol = float(ctx.opt("tol", 1e-3))
    r = dom.radius()
    K = dom.interior & (r <= 0.9)
    ctx.csv("robin.csv", ("r", "v", "robin_form"),
            [[ri, vi, math.log(8) - 2 * math.log1p(-ri**2)] for ri, vi in zip(r[K], sol.values[K])][:: max(1, K.sum() // 400)])
    return Verdict("robin", STATEMENTS["robin"], _status(dev <= tol), {"deviation": dev, "tol": tol,
                                                                       "center": float(sol.values[np.argmin(r)])})


CHECK_FUNCS = {
    "branch": check_branch,
    "energy": check_energy,
    "theorem12": check_theorem12,
    "theorem15": check_theorem15,
    "theorem16": check_theorem16,
    "large": check_large,
    "entire": check_entire,
    "ko": check_ko,
    "homogeneity": check_homogeneity,
    "robin": check_robin,
}


def run_check(check: str, config: ExperimentConfig, outdir: Path, cache: dict) -> Verdict:
    t = time.perf_counter()
    ctx = CheckContext(check, config, outdir, cache)
    try:
        v = CHECK_FUNCS[check](ctx)
    except ConfigError:
        raise
    except (ConvergenceError, LargeSolutionError, FrameError, KellerOssermanError, HomogeneityError,
            ValueError, ArithmeticError) as exc:
        v = Verdict(check, STATEMENTS[check], "fail", {}, message=f"{type(exc).__name__}: {exc}")
    v.artifacts = list(ctx.artifacts)
    v.wall_time = time.perf_counter() - t
    return v

"""Asymptotic homogeneity of f near its threshold.

``homogeneity_limit`` tabulates the rescaled ratios

    raw:       r(b, t) = f(alpha(b) t + b) / f(b)
    anchored:  a(b, t) = f(alpha(b) t + t0) / f(b)     (finite t0)
               a(b, t) = f(alpha(b) t) / f(b)          (t0 = -inf)

along a sequence b -> t0 and classifies the limit.  For finite t0 with
tbar = lim (b - t0)/alpha(b) in (0, inf) the limit is a power,
raw g(t) = ((t + tbar)/tbar)^p and anchored (t/tbar)^p.  For t0 = -inf either
-b/alpha(b) -> inf and the limit is exponential, or sbar = lim -b/alpha(b)
is finite and the limit is an inverse power, raw g(t) = (sbar/(sbar - t))^p and
anchored (sbar/(-t))^p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .keller import KellerOssermanError, keller_osserman
from .nonlinearity import LimitNonlinearity, Nonlinearity

__all__ = ["HomogeneityError", "HomogeneityTable", "homogeneity_limit", "extract_g0"]

WINDOW_MARGIN = 1e-6


class HomogeneityError(ValueError):
    pass


@dataclass(frozen=True)
class HomogeneityTable:
    betas: np.ndarray
    t: np.ndarray
    raw: np.ndarray          # shape (len(betas), len(t))
    anchored: np.ndarray
    kind: str                # "power" | "exponential" | "inverse_power"
    exponent: float          # p for powers, rate for exponential
    offset: float            # tbar or sbar (nan for exponential)
    predicted_raw: np.ndarray
    predicted_anchored: np.ndarray

    @property
    def limit(self) -> np.ndarray:
        """Empirical raw limit: the row at the last (closest to t0) beta."""
        return self.raw[-1]

    @property
    def anchored_limit(self) -> np.ndarray:
        return self.anchored[-1]

    def max_deviation(self, anchored: bool = False) -> float:
        emp, pred = (self.anchored_limit, self.predicted_anchored) if anchored else (self.limit, self.predicted_raw)
        ok = np.isfinite(emp) & np.isfinite(pred)
        return float(np.max(np.abs(emp[ok] - pred[ok])))

    def predicted(self, t, anchored=False):
        t = np.asarray(t, dtype=float)
        return _prediction(self.kind, self.exponent, self.offset, t, anchored)


def _prediction(kind, p, offset, t, anchored):
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind == "power":
            base = t if anchored else t + offset
            return np.where(base > 0, (np.maximum(base, 0.0) / offset) ** p, 0.0 if p > 0 else 0.0)
        if kind == "exponential":
            return np.exp(p * t)
        gap = -t if anchored else offset - t
        return np.where(gap > 0, (offset / np.where(gap > 0, gap, 1.0)) ** p, np.inf)


def _fit_power(x, y):
    ok = (x > 0) & (y > 0) & np.isfinite(y)
    if ok.sum() < 2:
        raise HomogeneityError("not enough positive samples to fit a power")
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])


def homogeneity_limit(f: Nonlinearity, alpha: Callable[[float], float], t_grid: Sequence[float],
                      beta_seq: Sequence[float]) -> HomogeneityTable:
    """Tabulate f(alpha(b) t + b)/f(b) along ``beta_seq`` and classify the limit."""
    betas = np.asarray(beta_seq, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    if betas.size == 0 or t.size == 0:
        raise HomogeneityError("empty beta sequence or t grid")
    if np.unique(t).size < 2:
        raise HomogeneityError("classifying the limit needs at least two distinct t samples")
    alphas = np.array([float(alpha(b)) for b in betas])
    if np.any(alphas <= 0):
        raise HomogeneityError("alpha(beta) must be positive")
    log_fb = np.array([float(f.log_eval(b)) for b in betas])
    if not np.all(np.isfinite(log_fb)):
        raise HomogeneityError("f(beta) vanishes along the sequence")

    # admissible window: alpha t + beta < 0 (u is negative) and, for finite t0, > t0
    upper = np.max(-betas / alphas) - WINDOW_MARGIN
    lower = -np.max((betas - f.t0) / alphas) if f.finite_threshold else -np.inf
    if np.any(t >= upper) or np.any(t <= lower):
        raise HomogeneityError(f"t grid leaves the admissible window ({lower:.6g}, {upper:.6g})")

    if f.finite_threshold:
        gaps = betas - f.t0
        f_beta = np.array([float(f.excess(g)) for g in gaps])
        raw = np.array([f.excess(a * t + g) / fb for a, g, fb in zip(alphas, gaps, f_beta)])
        anchored = np.array([f.excess(a * t) / fb for a, fb in zip(alphas, f_beta)])
        tbar = (betas[-1] - f.t0) / alphas[-1]
        kind, offset = "power", tbar
        pos = t > 0
        if not pos.any():
            raise HomogeneityError("power classification needs t > 0 samples")
        # anchored row is f(alpha t + t0)/f(beta) -> (t/tbar)^p
        p = _fit_power(t[pos] / tbar, anchored[-1][pos])
    else:
        raw = np.exp(np.array([f.log_eval(a * t + b) - lb for a, b, lb in zip(alphas, betas, log_fb)]))
        # anchored samples outside f's domain (inverse powers, t > 0) become nan
        with np.errstate(over="ignore", invalid="ignore"):
            anchored = np.exp(np.array([f.log_eval(a * t) - lb for a, lb in zip(alphas, log_fb)]))
        sbar_seq = -betas / alphas
        growing = betas.size > 1 and sbar_seq[-1] > 10.0 * max(sbar_seq[0], 1e-300) and sbar_seq[-1] > 100.0
        if growing:
            kind, offset = "exponential", float("nan")
            p = float(np.polyfit(t, np.log(raw[-1]), 1)[0])
        else:
            kind, offset = "inverse_power", float(sbar_seq[-1])
            neg = t < 0
            if not neg.any():
                raise HomogeneityError("inverse-power classification needs t < 0 samples")
            p = _fit_power(-t[neg] / offset, 1.0 / anchored[-1][neg])
    if abs(p - round(p)) < 1e-6:
        p = float(round(p))
    return HomogeneityTable(
        betas=betas, t=t, raw=raw, anchored=anchored, kind=kind, exponent=p, offset=offset,
        predicted_raw=_prediction(kind, p, offset, t, anchored=False),
        predicted_anchored=_prediction(kind, p, offset, t, anchored=True),
    )


def default_betas(f: Nonlinearity, count: int = 12) -> np.ndarray:
    if f.finite_threshold:
        return f.t0 + (-f.t0) * np.geomspace(0.5, 1e-10, count)
    return -np.geomspace(1.0, 1e7, count)


def extract_g0(f: Nonlinearity, alpha: Callable[[float], float] | None = None, safety: float = 1.0,
               t_grid: Sequence[float] | None = None, t1: float = 1.0) -> LimitNonlinearity:
    """Non-decreasing lower envelope g0 of the rescaled f, with its Keller-Osserman verdict.

    With an analytic hint the envelope is ``safety * g`` for the hinted limit
    (exact for pure powers and the exponential).  Otherwise the envelope is
    the pointwise minimum of the rescaled ratios along a beta sequence,
    bounded below by a fitted power c t^p.
    """
    if not 0 < safety <= 1:
        raise HomogeneityError("safety must lie in (0, 1]")
    hint = f.rescale
    if alpha is None and hint is None:
        raise HomogeneityError("no rescaling data: pass alpha or use a catalog family")
    if alpha is None and hint is not None and hint.exponent is not None and f.finite_threshold:
        g0 = LimitNonlinearity.power(hint.exponent, scale=safety)
    elif alpha is None and hint is not None and hint.limit.kind == "exponential":
        g0 = LimitNonlinearity.exponential(scale=safety)
    else:
        alpha = alpha or hint.alpha
        t = np.asarray(t_grid if t_grid is not None else np.linspace(0.05, 4.0, 80), dtype=float)
        betas = default_betas(f)
        if f.finite_threshold:
            # anchored form f(alpha t + t0)/f(t0 + alpha), normalised so g(1) = 1
            rows = []
            for b in betas:
                a = float(alpha(b))
                rows.append(f.excess(a * t) / float(f.excess(a)))
            rows = np.array(rows)
        else:
            rows = np.array([np.exp(f.log_eval(alpha(b) * t + b) - f.log_eval(b)) for b in betas])
        envelope = np.min(rows, axis=0)
        # non-decreasing minorant
        envelope = np.minimum.accumulate(envelope[::-1])[::-1]
        if not np.any(envelope > 0):
            raise HomogeneityError("empirical envelope has no positive lower bound")
        pos = envelope > 0
        p = _fit_power(t[pos], envelope[pos])
        c = float(np.min(envelope[pos] / t[pos] ** p))
        if c <= 0:
            raise HomogeneityError("envelope not bounded below by a power")
        g0 = LimitNonlinearity.power(max(p, 0.0), scale=safety * c)
    try:
        verdict = keller_osserman(g0, t1=t1).convergent
    except KellerOssermanError:
        verdict = False
    from dataclasses import replace

    return replace(g0, ko_admissible=verdict)

"""Admissible nonlinearities f for -Δu = λ f(u), λ < 0, and their limit profiles.

A :class:`Nonlinearity` bundles the function, its threshold ``t0`` (the
infimum of the positivity set, possibly ``-inf``), an antiderivative and the
rescaling data used by the asymptotic analysis.  :class:`LimitNonlinearity`
describes the limit profiles ``g`` (powers, exponentials, inverse powers and
shifts of those) that appear in the rescaled problems ``Δv = g(v)``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate, interpolate

__all__ = [
    "NonlinearityError",
    "RescaleHint",
    "Nonlinearity",
    "LimitNonlinearity",
    "catalog",
    "FAMILIES",
]

ArrayFn = Callable[[np.ndarray], np.ndarray]


class NonlinearityError(ValueError):
    """Raised for unknown families or parameters violating the hypotheses on f."""


@dataclass(frozen=True)
class RescaleHint:
    """Analytic rescaling data.

    ``alpha(beta)`` is the amplitude scaling, ``limit`` the raw limit of
    ``f(alpha(beta) t + beta) / f(beta)`` as ``beta`` tends to ``t0``.
    ``regime`` names the expected asymptotic regime.
    """

    alpha: Callable[[float], float]
    limit: "LimitNonlinearity"
    regime: str
    exponent: float | None = None


@dataclass(frozen=True)
class Nonlinearity:
    """A non-decreasing f with f(0) > 0.

    For finite ``t0`` the family is defined through its *excess* form
    ``excess_fn(w) = f(t0 + w)``; the solvers work with ``w = u - t0`` so that
    values extremely close to ``t0`` stay representable.
    """

    name: str
    params: Mapping[str, float]
    t0: float
    tail_limit: float
    fn: ArrayFn
    deriv_fn: ArrayFn | None = None
    excess_fn: ArrayFn | None = None
    excess_deriv_fn: ArrayFn | None = None
    antiderivative_fn: ArrayFn | None = None
    excess_antiderivative_fn: ArrayFn | None = None
    log_fn: ArrayFn | None = None
    anchor: float = 0.0
    monotone: bool = True
    rescale: RescaleHint | None = None
    upper: float = math.inf
    spline_range: tuple[float, float] = (-60.0, 1.0)
    _spline: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.antiderivative_fn is None:
            object.__setattr__(self, "_spline", self._build_spline())

    # -- evaluation ---------------------------------------------------------
    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        return self.fn(t)

    def excess(self, w):
        """f(t0 + w) evaluated without forming t0 + w (finite t0 only)."""
        w = np.asarray(w, dtype=float)
        if self.excess_fn is not None:
            return self.excess_fn(w)
        return self.fn(self.t0 + w)

    def deriv(self, t):
        """Derivative, taking the left (one-sided) value at kinks."""
        t = np.asarray(t, dtype=float)
        if self.deriv_fn is not None:
            return self.deriv_fn(t)
        return _one_sided_difference(self.fn, t)

    def excess_deriv(self, w):
        w = np.asarray(w, dtype=float)
        if self.excess_deriv_fn is not None:
            return self.excess_deriv_fn(w)
        if self.excess_fn is not None:
            return _one_sided_difference(self.excess_fn, w)
        return self.deriv(self.t0 + w)

    def log_eval(self, t):
        t = np.asarray(t, dtype=float)
        if self.log_fn is not None:
            return self.log_fn(t)
        with np.errstate(divide="ignore"):
            return np.log(self.eval(t))

    @property
    def finite_threshold(self) -> bool:
        return math.isfinite(self.t0)

    # -- antiderivative -----------------------------------------------------
    def antiderivative(self, s):
        """F(s) = integral of f from ``anchor`` to ``s``."""
        s = np.asarray(s, dtype=float)
        if self.antiderivative_fn is not None:
            return self.antiderivative_fn(s)
        return self._numeric_antiderivative(s)

    def antiderivative_excess(self, w):
        """F(t0 + w) for finite t0, accurate for tiny w."""
        w = np.asarray(w, dtype=float)
        if self.excess_antiderivative_fn is not None:
            return self.excess_antiderivative_fn(w)
        return self.antiderivative(self.t0 + w if self.finite_threshold else w)

    def _build_spline(self):
        lo, hi = self.spline_range
        if self.finite_threshold:
            lo = max(lo, self.t0)
        hi = min(hi, self.upper - 1e-6)
        # kinks of f' (|t| families) sit at 0; keep it a node
        nodes = np.union1d(np.linspace(lo, hi, 2049), [0.0] if lo < 0 < hi else [])
        start = _quad(self.fn, self.anchor, nodes[0]) if self.anchor != nodes[0] else 0.0
        pieces = [_quad(self.fn, a, b) for a, b in zip(nodes[:-1], nodes[1:])]
        values = start + np.concatenate([[0.0], np.cumsum(pieces)])
        # quintic Hermite (F, f, f'): the derivative error stays O(h^4) on smooth stretches;
        # the kink node 0 of the |t| families keeps only (F, f)
        fv, dv = self.fn(nodes), self.deriv(nodes)
        data = [[F, y, d] if np.isfinite(d) and x != 0.0 else [F, y]
                for x, F, y, d in zip(nodes, values, fv, dv)]
        return interpolate.BPoly.from_derivatives(nodes, data)

    def _numeric_antiderivative(self, s):
        spline = self._spline
        lo, hi = float(spline.x[0]), float(spline.x[-1])
        out = np.empty_like(s)
        inside = (s >= lo) & (s <= hi)
        out[inside] = spline(s[inside])
        for idx in np.flatnonzero(~inside):
            x = float(s.flat[idx])
            if self.finite_threshold and x <= self.t0:
                out.flat[idx] = 0.0
            else:
                ref = lo if x < lo else hi
                out.flat[idx] = float(spline(ref)) + _quad(self.fn, ref, x)
        # far tails: quadrature round-off must not push F below zero
        return np.maximum(out, 0.0)

    # -- convenience --------------------------------------------------------
    def lipschitz(self, lo: float, hi: float, samples: int = 257) -> float:
        """Sampled Lipschitz bound of f on [lo, hi] (f' is non-negative)."""
        if self.finite_threshold:
            lo = max(lo, self.t0)
        t = np.linspace(lo, hi, samples)
        d = self.deriv(t)
        d = d[np.isfinite(d)]
        return float(d.max()) if d.size else 0.0

    def describe(self) -> str:
        args = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}({args})"


def _quad(fn, a, b):
    if a == b:
        return 0.0
    val, _ = integrate.quad(lambda x: float(fn(np.asarray(x))), a, b, epsabs=1e-10, epsrel=1e-12, limit=200)
    return val


def _one_sided_difference(fn, t, step=1e-7):
    t = np.asarray(t, dtype=float)
    h = step * np.maximum(1.0, np.abs(t))
    return (fn(t) - fn(t - h)) / h


@dataclass(frozen=True)
class LimitNonlinearity:
    """Limit profile g for the rescaled problems.

    kinds
    -----
    ``power``          g(t) = scale * ((t + shift)^+)^p
    ``exponential``    g(t) = scale * exp(t)
    ``inverse_power``  g(t) = scale / (center - t)^p   for t < center
    ``shifted``        g(t) = base(t - A)
    ``custom``         g(t) = func(t)
    """

    kind: str
    p: float = 1.0
    shift: float = 0.0
    scale: float = 1.0
    center: float = 0.0
    A: float = 0.0
    base: "LimitNonlinearity | None" = None
    func: ArrayFn | None = None
    ko_admissible: bool | None = None

    def __post_init__(self):
        if self.kind not in {"power", "exponential", "inverse_power", "shifted", "custom"}:
            raise NonlinearityError(f"unknown limit kind {self.kind!r}")
        if self.kind in {"power", "inverse_power"} and self.p < 0:
            raise NonlinearityError("exponent must be non-negative")
        if self.kind == "shifted" and self.base is None:
            raise NonlinearityError("shifted limit needs a base")
        if self.kind == "custom" and self.func is None:
            raise NonlinearityError("custom limit needs func")

    @classmethod
    def power(cls, p, shift=0.0, scale=1.0):
        return cls("power", p=float(p), shift=float(shift), scale=float(scale))

    @classmethod
    def exponential(cls, scale=1.0):
        return cls("exponential", scale=float(scale))

    @classmethod
    def inverse_power(cls, p, center=0.0, scale=1.0):
        return cls("inverse_power", p=float(p), center=float(center), scale=float(scale))

    @classmethod
    def shifted(cls, base, A):
        return cls("shifted", base=base, A=float(A))

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "power":
            base = np.maximum(t + self.shift, 0.0)
            if self.p == 0:
                return self.scale * (base > 0).astype(float)
            return self.scale * base**self.p
        if self.kind == "exponential":
            with np.errstate(over="ignore"):
                return self.scale * np.exp(t)
        if self.kind == "inverse_power":
            gap = self.center - t
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(gap > 0, self.scale / np.where(gap > 0, gap, 1.0) ** self.p, np.inf)
        if self.kind == "shifted":
            return self.base.eval(t - self.A)
        return np.asarray(self.func(t), dtype=float)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "power":
            base = np.maximum(t + self.shift, 0.0)
            if self.p == 0:
                return np.zeros_like(t)
            with np.errstate(divide="ignore", invalid="ignore"):
                d = self.scale * self.p * np.where(base > 0, base, 0.0) ** (self.p - 1)
            return np.where(base > 0, d, 0.0)
        if self.kind == "exponential":
            with np.errstate(over="ignore"):
                return self.scale * np.exp(t)
        if self.kind == "inverse_power":
            gap = self.center - t
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(gap > 0, self.scale * self.p / np.where(gap > 0, gap, 1.0) ** (self.p + 1), np.inf)
        if self.kind == "shifted":
            return self.base.deriv(t - self.A)
        return _one_sided_difference(self.eval, t)

    def integral(self, a, b):
        """Integral of g over [a, b]; closed form for power and exponential."""
        if b <= a:
            return 0.0
        if self.kind == "power" and self.p > 0:
            lo, hi = max(a + self.shift, 0.0), max(b + self.shift, 0.0)
            if hi - lo < 1e-4 * max(1.0, hi):
                return _gauss(self.eval, a, b)
            q = self.p + 1
            return self.scale * (hi**q - lo**q) / q
        if self.kind == "exponential":
            if b - a < 1e-4:
                return _gauss(self.eval, a, b)
            with np.errstate(over="ignore"):
                return float(self.scale * np.exp(a) * np.expm1(b - a))
        return _quad(self.eval, a, b)

    def describe(self) -> str:
        if self.kind == "power":
            s = f"t^{self.p:g}" if self.shift == 0 else f"(t+{self.shift:g})^{self.p:g}"
        elif self.kind == "exponential":
            s = "e^t"
        elif self.kind == "inverse_power":
            s = f"1/({self.center:g}-t)^{self.p:g}"
        elif self.kind == "shifted":
            s = f"{self.base.describe()}[t-({self.A:g})]"
        else:
            s = "custom"
        return s if self.scale == 1 else f"{self.scale:g}*{s}"

    def regularizer(self):
        """Change of variables w = T(v) under which singular solutions become smooth.

        Returns ``(kappa, mu, rhs, to_w, from_w)`` such that ``Δv = g(v)``
        becomes ``-kappa w Δw + mu |∇w|^2 = rhs``, or ``None`` when no
        closed-form transform is known for this kind.

        * exponential: w = exp(-v/2), large solutions have w ~ dist/sqrt(2 scale);
        * power p > 1: w = (v + shift)^(-s), s = (p-1)/2, again w ~ dist;
        * inverse power: w = (center - v)^s, s = (p+1)/2, the singular
          bounded solutions with v -> center at the boundary have w ~ dist.
        """
        if self.kind == "exponential":
            return 2.0, 2.0, self.scale, (lambda v: np.exp(-0.5 * np.asarray(v))), (lambda w: -2.0 * np.log(w))
        if self.kind == "power" and self.p > 1:
            s = 0.5 * (self.p - 1.0)
            a = self.shift
            return (
                1.0,
                1.0 + 1.0 / s,
                s * self.scale,
                lambda v: (np.asarray(v) + a) ** (-s),
                lambda w: np.asarray(w) ** (-1.0 / s) - a,
            )
        if self.kind == "inverse_power" and self.p > 0:
            s = 0.5 * (self.p + 1.0)
            c = self.center
            return (
                1.0,
                1.0 - 1.0 / s,
                s * self.scale,
                lambda v: np.maximum(c - np.asarray(v), 0.0) ** s,
                lambda w: c - np.asarray(w) ** (1.0 / s),
            )
        return None


def _gauss(fn, a, b, n=8):
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return float(half * np.sum(w * fn(mid + half * x)))


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def _pos(w):
    return np.maximum(w, 0.0)


def _plasma(p=1.0, t0=-1.0):
    p, t0 = float(p), float(t0)
    if p < 0:
        raise NonlinearityError("plasma_power needs p >= 0")
    if not t0 < 0:
        raise NonlinearityError("plasma_power needs t0 < 0 so that f(0) > 0")

    def g(w):
        w = np.asarray(w, dtype=float)
        if p == 0:
            return (w > 0).astype(float)
        return _pos(w) ** p

    def dg(w):
        w = np.asarray(w, dtype=float)
        if p == 0:
            return np.zeros_like(w)
        with np.errstate(divide="ignore", invalid="ignore"):
            d = p * np.where(w > 0, w, 1.0) ** (p - 1)
        return np.where(w > 0, d, 0.0)

    def F(w):
        return _pos(np.asarray(w, dtype=float)) ** (p + 1) / (p + 1)

    return dict(
        t0=t0,
        tail_limit=0.0,
        fn=lambda t: g(t - t0),
        deriv_fn=lambda t: dg(t - t0),
        excess_fn=g,
        excess_deriv_fn=dg,
        antiderivative_fn=lambda s: F(s - t0),
        anchor=t0,
        rescale=RescaleHint(alpha=lambda b: b - t0, limit=LimitNonlinearity.power(p, shift=1.0),
                            regime="large_solution" if p > 1 else "entire_profile", exponent=p),
        excess_antiderivative_fn=F,
    )


def _perturbed(p=1.0, q=2.0, t0=-1.0):
    p, q, t0 = float(p), float(q), float(t0)
    if not (0 < p < q):
        raise NonlinearityError("perturbed_power needs 0 < p < q")
    if not t0 < 0:
        raise NonlinearityError("perturbed_power needs t0 < 0")

    def g(w):
        w = _pos(np.asarray(w, dtype=float))
        return w**p + w**q

    def dg(w):
        w = np.asarray(w, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            ww = np.where(w > 0, w, 1.0)
            d = p * ww ** (p - 1) + q * ww ** (q - 1)
        return np.where(w > 0, d, 0.0)

    def F(w):
        w = _pos(np.asarray(w, dtype=float))
        return w ** (p + 1) / (p + 1) + w ** (q + 1) / (q + 1)

    return dict(
        t0=t0, tail_limit=0.0, fn=lambda t: g(t - t0), deriv_fn=lambda t: dg(t - t0),
        excess_fn=g, excess_deriv_fn=dg, antiderivative_fn=lambda s: F(s - t0), anchor=t0,
        rescale=RescaleHint(alpha=lambda b: b - t0, limit=LimitNonlinearity.power(p, shift=1.0),
                            regime="large_solution" if p > 1 else "entire_profile", exponent=p),
        excess_antiderivative_fn=F,
    )


def _log_power(p=2.0, t0=-0.1):
    p, t0 = float(p), float(t0)
    if p <= 0:
        raise NonlinearityError("log_power needs p > 0")
    w_star = math.exp(-2.0 / p)
    if not (-w_star < t0 < 0):
        raise NonlinearityError(f"log_power(p={p:g}) is non-decreasing only for t0 in ({-w_star:.6g}, 0)")
    cap = w_star**p * math.log(w_star) ** 2

    def g(w):
        w = np.asarray(w, dtype=float)
        ww = np.clip(w, 1e-300, w_star)
        val = ww**p * np.log(ww) ** 2
        return np.where(w <= 0, 0.0, np.where(w >= w_star, cap, val))

    def dg(w):
        w = np.asarray(w, dtype=float)
        ww = np.clip(w, 1e-300, w_star)
        lw = np.log(ww)
        val = ww ** (p - 1) * lw * (p * lw + 2.0)
        return np.where((w <= 0) | (w >= w_star), 0.0, val)

    return dict(
        t0=t0, tail_limit=0.0, fn=lambda t: g(t - t0), deriv_fn=lambda t: dg(t - t0),
        excess_fn=g, excess_deriv_fn=dg, anchor=t0,
        rescale=RescaleHint(alpha=lambda b: b - t0, limit=LimitNonlinearity.power(p, shift=1.0),
                            regime="large_solution" if p > 1 else "entire_profile", exponent=p),
    )


def _exponential():
    return dict(
        t0=-math.inf, tail_limit=0.0,
        fn=lambda t: np.exp(np.minimum(t, 700.0)),
        deriv_fn=lambda t: np.exp(np.minimum(t, 700.0)),
        antiderivative_fn=lambda s: np.exp(np.minimum(s, 700.0)),
        anchor=-math.inf,
        rescale=RescaleHint(alpha=lambda b: 1.0, limit=LimitNonlinearity.exponential(), regime="large_solution"),
        log_fn=lambda t: np.asarray(t, dtype=float),
    )


def _power_exp(p=2.0):
    p = float(p)
    if p <= 0:
        raise NonlinearityError("power_exp needs p > 0")

    def f(t):
        t = np.asarray(t, dtype=float)
        return np.exp(np.minimum(np.sign(t) * np.abs(t) ** p, 700.0))

    def df(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):       # f' = inf at 0 when p < 1
            return p * np.abs(t) ** (p - 1) * f(t)

    return dict(
        t0=-math.inf, tail_limit=0.0, fn=f, deriv_fn=df, anchor=-math.inf,
        rescale=RescaleHint(alpha=lambda b: 1.0 / (p * (-b) ** (p - 1)),
                            limit=LimitNonlinearity.exponential(), regime="large_solution"),
        log_fn=lambda t: np.sign(t) * np.abs(np.asarray(t, dtype=float)) ** p,
    )


def _poly_exp(p=1.0):
    p = float(p)
    if not (0 <= p <= 1):
        raise NonlinearityError("poly_exp (1+|t|)^p e^t is non-decreasing only for 0 <= p <= 1")

    def f(t):
        t = np.asarray(t, dtype=float)
        return (1.0 + np.abs(t)) ** p * np.exp(np.minimum(t, 700.0))

    def df(t):
        t = np.asarray(t, dtype=float)
        sgn = np.where(t > 0, 1.0, -1.0)
        return f(t) * (1.0 + sgn * p / (1.0 + np.abs(t)))

    return dict(
        t0=-math.inf, tail_limit=0.0, fn=f, deriv_fn=df, anchor=-math.inf,
        rescale=RescaleHint(alpha=lambda b: 1.0, limit=LimitNonlinearity.exponential(), regime="large_solution"),
        log_fn=lambda t: p * np.log1p(np.abs(np.asarray(t, dtype=float))) + np.asarray(t, dtype=float),
    )


def _mems(p=3.0):
    p = float(p)
    if p <= 1:
        raise NonlinearityError("mems_inverse needs p > 1")

    def f(t):
        t = np.asarray(t, dtype=float)
        gap = 1.0 - t
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(gap > 0, 1.0 / np.where(gap > 0, gap, 1.0) ** p, np.inf)

    def df(t):
        t = np.asarray(t, dtype=float)
        gap = 1.0 - t
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(gap > 0, p / np.where(gap > 0, gap, 1.0) ** (p + 1), np.inf)

    def F(s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(s < 1, (1.0 - s) ** (1.0 - p) / (p - 1.0), np.inf)

    return dict(
        t0=-math.inf, tail_limit=0.0, fn=f, deriv_fn=df, antiderivative_fn=F, anchor=-math.inf, upper=1.0,
        rescale=RescaleHint(alpha=lambda b: -b, limit=LimitNonlinearity.inverse_power(p, center=1.0),
                            regime="bounded_limit", exponent=p),
        log_fn=lambda t: -p * np.log1p(-np.asarray(t, dtype=float)),
    )


def _const_plus_exp(c0=1.0):
    c0 = float(c0)
    if c0 <= 0:
        raise NonlinearityError("const_plus_exp needs c0 > 0")

    def f(t):
        return c0 + np.exp(np.minimum(np.asarray(t, dtype=float), 700.0))

    return dict(
        t0=-math.inf, tail_limit=c0, fn=f,
        deriv_fn=lambda t: np.exp(np.minimum(np.asarray(t, dtype=float), 700.0)),
        antiderivative_fn=lambda s: c0 * np.asarray(s, dtype=float) + np.expm1(np.minimum(np.asarray(s, dtype=float), 700.0)),
        anchor=0.0,
        rescale=RescaleHint(alpha=lambda b: 1.0,
                            limit=LimitNonlinearity("custom", func=lambda t: np.full_like(np.asarray(t, dtype=float), 1.0)),
                            regime="torsion", exponent=0.0),
    )


FAMILIES: dict[str, tuple[Callable[..., dict], tuple[str, ...]]] = {
    "plasma_power": (_plasma, ("p", "t0")),
    "exponential": (_exponential, ()),
    "power_exp": (_power_exp, ("p",)),
    "poly_exp": (_poly_exp, ("p",)),
    "mems_inverse": (_mems, ("p",)),
    "perturbed_power": (_perturbed, ("p", "q", "t0")),
    "log_power": (_log_power, ("p", "t0")),
    "const_plus_exp": (_const_plus_exp, ("c0",)),
}


def catalog(name: str, params: Sequence[float] | Mapping[str, float] = ()) -> Nonlinearity:
    """Build a catalog nonlinearity by family name.

    ``params`` is either a positional list (in the family's declared order)
    or a mapping of parameter names.

    >>> f = catalog("plasma_power", [1.0, -1.0])
    >>> float(f(0.0)), f.t0
    (1.0, -1.0)
    """
    try:
        builder, names = FAMILIES[name]
    except KeyError:
        raise NonlinearityError(f"unknown nonlinearity family {name!r}; known: {sorted(FAMILIES)}") from None
    if isinstance(params, Mapping):
        unknown = set(params) - set(names)
        if unknown:
            raise NonlinearityError(f"{name}: unknown parameters {sorted(unknown)}")
        kwargs = {k: float(v) for k, v in params.items()}
    else:
        params = list(params)
        if len(params) > len(names):
            raise NonlinearityError(f"{name} takes at most {len(names)} parameters {names}")
        kwargs = {k: float(v) for k, v in zip(names, params)}
    spec = builder(**kwargs)
    defaults = {k: v.default for k, v in _signature_defaults(builder).items()}
    resolved = {k: kwargs.get(k, defaults.get(k)) for k in names}
    f = Nonlinearity(name=name, params=resolved, **spec)
    if not float(f(0.0)) > 0:
        raise NonlinearityError(f"{name}: f(0) must be positive")
    return f


def _signature_defaults(fn):
    import inspect

    return {k: v for k, v in inspect.signature(fn).parameters.items() if v.default is not inspect.Parameter.empty}


def with_anchor(f: Nonlinearity, anchor: float) -> Nonlinearity:
    """Copy of ``f`` whose antiderivative vanishes at ``anchor`` instead."""
    shift = float(f.antiderivative(np.asarray(anchor))) if math.isfinite(anchor) else 0.0
    base = f.antiderivative
    return dataclasses.replace(f, antiderivative_fn=lambda s: base(s) - shift,
                               excess_antiderivative_fn=None, anchor=anchor)

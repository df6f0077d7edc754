"""Computational domains, Laplacian stencils and the torsion function.

Three kinds of domain are supported, all on uniform meshes:

* :class:`Interval` -- (a, b) with n nodes, standard three-point stencil;
* :class:`RadialBall` -- radial functions on the ball of radius R in R^N,
  discretised in flux (finite-volume) form, which is exact on r^2 and keeps
  the operator an M-matrix in every dimension;
* :class:`Grid2D` -- a masked Cartesian grid given by a level set
  ``phi < 0``.  Curved boundaries are handled by a Shortley-Weller stencil
  with boundary nodes placed on the true boundary (exact on quadratics), or by
  a nearest-node rule where outside grid points carry the boundary data.

Every domain stores all nodes (interior and boundary) in one flat array.  The
Laplacian is an ``n x n`` sparse matrix with empty boundary rows; boundary
values enter interior rows through the off-diagonal columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy import ndimage, optimize

__all__ = [
    "DomainError",
    "Domain",
    "Interval",
    "RadialBall",
    "Grid2D",
    "disk2d",
    "square2d",
    "SolutionField",
    "discrete_laplacian",
    "torsion",
    "sphere_area",
]


class DomainError(ValueError):
    pass


def sphere_area(N: int) -> float:
    """Surface area of the unit sphere S^{N-1} in R^N (2 for N = 1)."""
    return 2.0 * math.pi ** (N / 2) / math.gamma(N / 2)


class Domain:
    """Common interface; subclasses fill in the mesh and operators."""

    kind: str
    dim: int
    h: float
    coords: np.ndarray
    boundary: np.ndarray

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def interior(self) -> np.ndarray:
        return ~self.boundary

    @property
    def interior_index(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary)

    @property
    def boundary_index(self) -> np.ndarray:
        return np.flatnonzero(self.boundary)

    def laplacian(self) -> sp.csr_matrix:
        return self._L

    def split_laplacian(self):
        """(L_II, L_IB): interior-interior and interior-boundary blocks."""
        return self._LII, self._LIB

    def first_derivatives(self) -> list[sp.csr_matrix]:
        """Centred first-derivative operators (one per axis), rows on interior nodes only."""
        return self._D

    def radius(self) -> np.ndarray:
        """|x| (distance to the centre) at every node."""
        raise NotImplementedError

    def distance_to_boundary(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def inradius(self) -> float:
        return float(np.max(self.distance_to_boundary()))

    def compact_mask(self, fraction: float) -> np.ndarray:
        """Nodes with dist(x, boundary) >= (1 - fraction) * inradius."""
        if not 0 < fraction < 1:
            raise DomainError("compact fraction must lie in (0, 1)")
        mask = self.interior & (self.distance_to_boundary() >= (1.0 - fraction) * self.inradius - 1e-12)
        if not mask.any():
            raise DomainError("empty compact subset")
        return mask

    def weights(self) -> np.ndarray:
        """Quadrature weights for integrals over the domain."""
        return self._w

    def integrate(self, values) -> float:
        return float(np.dot(self._w, values))

    def kinetic(self, u) -> float:
        """0.5 * integral |grad u|^2."""
        raise NotImplementedError

    def gradient_norm(self, u) -> np.ndarray:
        """|grad u| by centred differences; NaN where the stencil is not centred."""
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError

    def _finish(self, L: sp.spmatrix, D: list[sp.spmatrix], w: np.ndarray):
        L = sp.csr_matrix(L)
        L.eliminate_zeros()
        ii, bb = self.interior_index, self.boundary_index
        self._L = L
        self._LII = sp.csc_matrix(L[ii][:, ii])
        self._LIB = sp.csr_matrix(L[ii][:, bb])
        self._D = [sp.csr_matrix(d) for d in D]
        self._w = np.asarray(w, dtype=float)


def _three_point(n, h):
    main = np.full(n, -2.0 / h**2)
    off = np.full(n - 1, 1.0 / h**2)
    L = sp.diags([off, main, off], [-1, 0, 1], format="lil")
    L[0, :] = 0
    L[n - 1, :] = 0
    return L


class Interval(Domain):
    kind = "interval"
    dim = 1

    def __init__(self, a: float = -1.0, b: float = 1.0, n: int = 2001):
        if not b > a:
            raise DomainError("interval needs b > a")
        if n < 5:
            raise DomainError("interval needs at least 3 interior nodes")
        self.a, self.b, self.nodes = float(a), float(b), int(n)
        self.coords = np.linspace(self.a, self.b, self.nodes)
        self.h = (self.b - self.a) / (self.nodes - 1)
        self.boundary = np.zeros(self.nodes, dtype=bool)
        self.boundary[[0, -1]] = True
        D = sp.diags([-np.ones(n - 1), np.ones(n - 1)], [-1, 1], format="lil") / (2 * self.h)
        D[0, :] = 0
        D[n - 1, :] = 0
        w = np.full(n, self.h)
        w[[0, -1]] = 0.5 * self.h
        self._finish(_three_point(n, self.h), [D], w)

    @property
    def center(self):
        return 0.5 * (self.a + self.b)

    def radius(self):
        return np.abs(self.coords - self.center)

    def distance_to_boundary(self):
        return np.minimum(self.coords - self.a, self.b - self.coords)

    def kinetic(self, u):
        du = np.diff(u) / self.h
        return 0.5 * float(np.sum(du**2) * self.h)

    def gradient_norm(self, u):
        g = np.full(self.n, np.nan)
        g[1:-1] = np.abs(u[2:] - u[:-2]) / (2 * self.h)
        return g

    def describe(self):
        return {"kind": "interval", "a": self.a, "b": self.b, "n": self.nodes, "h": self.h}


class RadialBall(Domain):
    """Radial functions on B_R in R^N; node 0 is the centre.

    The operator is the flux form of v'' + (N-1)/r v',

        (Lv)_i = [r_{i+1/2}^{N-1} (v_{i+1}-v_i) - r_{i-1/2}^{N-1} (v_i-v_{i-1})] / (h V_i),
        V_i = (r_{i+1/2}^N - r_{i-1/2}^N) / N,

    whose centre row reduces to 2N (v_1 - v_0)/h^2, i.e. N v''(0).
    """

    kind = "radial_ball"

    def __init__(self, radius: float = 1.0, dim: int = 2, n: int = 2001):
        if radius <= 0:
            raise DomainError("radius must be positive")
        if int(dim) != dim or dim < 1:
            raise DomainError("dimension must be a positive integer")
        if n < 4:
            raise DomainError("radial ball needs at least 3 interior nodes")
        self.R, self.dim, self.nodes = float(radius), int(dim), int(n)
        self.h = self.R / (n - 1)
        r = np.linspace(0.0, self.R, n)
        self.coords = r
        self.boundary = np.zeros(n, dtype=bool)
        self.boundary[-1] = True
        N, h = self.dim, self.h
        rp = np.minimum(r + 0.5 * h, self.R)
        rm = np.maximum(r - 0.5 * h, 0.0)
        vol = (rp**N - rm**N) / N
        up = rp[:-1] ** (N - 1) / (h * vol[:-1])
        lo = rm[1:] ** (N - 1) / (h * vol[1:])
        L = sp.diags([lo, -(np.append(up, 0.0) + np.insert(lo, 0, 0.0)), up], [-1, 0, 1], format="lil")
        L[n - 1, :] = 0
        D = sp.diags([-np.ones(n - 1), np.ones(n - 1)], [-1, 1], format="lil") / (2 * h)
        D[0, :] = 0  # v'(0) = 0 by symmetry
        D[n - 1, :] = 0
        self._flux_w = sphere_area(N) * (r[:-1] + 0.5 * h) ** (N - 1) * h
        w = sphere_area(N) * r ** (N - 1) * h
        if N == 1:
            w = np.full(n, 2.0 * h)
            w[0] = h
        w[-1] *= 0.5
        self._finish(L, [D], w)

    def radius(self):
        return self.coords

    def distance_to_boundary(self):
        return self.R - self.coords

    def kinetic(self, u):
        du = np.diff(u) / self.h
        return 0.5 * float(np.dot(self._flux_w, du**2))

    def gradient_norm(self, u):
        g = np.full(self.n, np.nan)
        g[0] = 0.0
        g[1:-1] = np.abs(u[2:] - u[:-2]) / (2 * self.h)
        return g

    def describe(self):
        return {"kind": "ball", "radius": self.R, "dim": self.dim, "n": self.nodes, "h": self.h}


@dataclass(frozen=True)
class _Link:
    node: int
    axis: int
    left: int
    right: int
    hl: float
    hr: float


class Grid2D(Domain):
    """Masked Cartesian grid for the planar domain {phi < 0}.

    ``boundary_mode`` is ``"shortley_weller"`` (boundary nodes on the true
    boundary, second order) or ``"nearest"`` (outside grid neighbours carry
    the boundary data, first order at curved boundaries).
    """

    kind = "grid2d"
    dim = 2

    def __init__(self, levelset: Callable, bbox: tuple[float, float, float, float], h: float,
                 distance: Callable | None = None, center=(0.0, 0.0), boundary_mode: str = "shortley_weller",
                 label: str = "grid2d", meta: dict | None = None):
        if h <= 0:
            raise DomainError("h must be positive")
        if boundary_mode not in {"shortley_weller", "nearest"}:
            raise DomainError(f"unknown boundary mode {boundary_mode!r}")
        x0, x1, y0, y1 = map(float, bbox)
        self.h, self.label, self.boundary_mode = float(h), label, boundary_mode
        self.center = np.asarray(center, dtype=float)
        self._phi, self._dist, self.meta = levelset, distance, dict(meta or {})
        nx = int(round((x1 - x0) / h)) + 1
        ny = int(round((y1 - y0) / h)) + 1
        xs, ys = x0 + h * np.arange(nx), y0 + h * np.arange(ny)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        tol = 1e-10 * h
        phi = levelset(X, Y)
        inside = phi < -tol
        if inside.sum() < 9:
            raise DomainError("mask has fewer than 9 interior nodes")
        _, ncomp = ndimage.label(inside)
        if ncomp != 1:
            raise DomainError(f"mask is not connected ({ncomp} components)")
        # pad check: the bounding box must contain the domain with one layer to spare
        if inside[0].any() or inside[-1].any() or inside[:, 0].any() or inside[:, -1].any():
            raise DomainError("bounding box clips the domain")

        idx = -np.ones(inside.shape, dtype=int)
        ij = np.argwhere(inside)
        idx[inside] = np.arange(len(ij))
        coords = [np.column_stack([X[inside], Y[inside]])]
        ghost: dict[tuple, int] = {}
        ghost_xy: list[tuple[float, float]] = []
        n_int = len(ij)

        def ghost_node(px, py):
            key = (round(px / h, 9), round(py / h, 9))
            if key not in ghost:
                ghost[key] = n_int + len(ghost_xy)
                ghost_xy.append((px, py))
            return ghost[key]

        links = []
        for k, (i, j) in enumerate(ij):
            px, py = X[i, j], Y[i, j]
            for axis, (di, dj) in enumerate(((1, 0), (0, 1))):
                side = []
                for s in (-1, 1):
                    ii, jj = i + s * di, j + s * dj
                    if inside[ii, jj]:
                        side.append((idx[ii, jj], h))
                        continue
                    if boundary_mode == "nearest" or abs(phi[ii, jj]) <= tol:
                        side.append((ghost_node(X[ii, jj], Y[ii, jj]), h))
                        continue
                    ex, ey = s * di * h, s * dj * h
                    theta = optimize.brentq(lambda t: float(levelset(px + t * ex, py + t * ey)), 0.0, 1.0,
                                            xtol=1e-14, rtol=1e-14)
                    side.append((ghost_node(px + theta * ex, py + theta * ey), theta * h))
                (l, hl), (r, hr) = side
                links.append(_Link(k, axis, l, r, hl, hr))

        self.coords = np.vstack(coords + [np.asarray(ghost_xy, dtype=float).reshape(-1, 2)])
        n = self.coords.shape[0]
        self.boundary = np.zeros(n, dtype=bool)
        self.boundary[n_int:] = True
        self.grid_shape = inside.shape
        self.grid_index = idx
        self.grid_origin = (x0, y0)

        rows, cols, vals = [], [], []
        drows = [[], []]
        dcols = [[], []]
        dvals = [[], []]
        for ln in links:
            hl, hr = ln.hl, ln.hr
            a_l = 2.0 / (hl * (hl + hr))
            a_r = 2.0 / (hr * (hl + hr))
            rows += [ln.node] * 3
            cols += [ln.left, ln.node, ln.right]
            vals += [a_l, -(a_l + a_r), a_r]
            # first derivative exact on quadratics for uneven spacing
            c = 1.0 / (hl * hr * (hl + hr))
            drows[ln.axis] += [ln.node] * 3
            dcols[ln.axis] += [ln.left, ln.node, ln.right]
            dvals[ln.axis] += [-hr * hr * c, (hr * hr - hl * hl) * c, hl * hl * c]
        L = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        D = [sp.coo_matrix((dvals[a], (drows[a], dcols[a])), shape=(n, n)).tocsr() for a in range(2)]
        self._links = links
        w = np.zeros(n)
        w[:n_int] = h * h
        self._finish(L, D, w)

    def radius(self):
        return np.hypot(self.coords[:, 0] - self.center[0], self.coords[:, 1] - self.center[1])

    def distance_to_boundary(self):
        if self._dist is not None:
            return np.maximum(self._dist(self.coords[:, 0], self.coords[:, 1]), 0.0)
        from scipy.spatial import cKDTree

        tree = cKDTree(self.coords[self.boundary])
        d, _ = tree.query(self.coords)
        return d

    def kinetic(self, u):
        """Edge-midpoint sum over grid edges (and cut edges to boundary nodes)."""
        u = np.asarray(u, dtype=float)
        total = 0.0
        seen = set()
        h = self.h
        for ln in self._links:
            for other, d in ((ln.left, ln.hl), (ln.right, ln.hr)):
                key = (min(ln.node, other), max(ln.node, other))
                if key in seen:
                    continue
                seen.add(key)
                # edge carries a strip of width h; cut edges have length d
                total += ((u[other] - u[ln.node]) / d) ** 2 * d * h
        return 0.5 * total

    def gradient_norm(self, u):
        g = np.full(self.n, np.nan)
        gx, gy = (D @ u for D in self._D)
        centred = np.zeros(self.n, dtype=bool)
        centred[self.interior_index] = True
        for ln in self._links:
            if ln.hl != self.h or ln.hr != self.h:
                centred[ln.node] = False
        g[centred] = np.hypot(gx[centred], gy[centred])
        return g

    def to_image(self, values, fill=np.nan):
        """Values of the interior nodes on the bounding-box grid (for plotting)."""
        img = np.full(self.grid_shape, fill)
        mask = self.grid_index >= 0
        img[mask] = np.asarray(values)[self.grid_index[mask]]
        return img

    def describe(self):
        return {"kind": self.label, "h": self.h, "boundary_mode": self.boundary_mode, "n": self.n, **self.meta}


def disk2d(radius: float = 1.0, h: float = 0.01, boundary_mode: str = "shortley_weller") -> Grid2D:
    R = float(radius)
    pad = 2 * h
    m = math.ceil((R + pad) / h)
    lim = m * h
    return Grid2D(lambda x, y: np.hypot(x, y) - R, (-lim, lim, -lim, lim), h,
                  distance=lambda x, y: R - np.hypot(x, y), boundary_mode=boundary_mode,
                  label="disk2d", meta={"radius": R})


def square2d(side: float = 1.0, h: float = 0.01, boundary_mode: str = "shortley_weller") -> Grid2D:
    """The square (0, side)^2."""
    s = float(side)
    if abs(s / h - round(s / h)) > 1e-9:
        raise DomainError("side must be a multiple of h")

    def phi(x, y):
        return np.maximum(np.maximum(-x, x - s), np.maximum(-y, y - s))

    def dist(x, y):
        return np.minimum(np.minimum(x, s - x), np.minimum(y, s - y))

    return Grid2D(phi, (-h, s + h, -h, s + h), h, distance=dist, center=(0.5 * s, 0.5 * s),
                  boundary_mode=boundary_mode, label="square2d", meta={"side": s})


def discrete_laplacian(domain: Domain) -> sp.csr_matrix:
    return domain.laplacian()


@dataclass
class SolutionField:
    """Grid values of a solution with its solve metadata.

    ``excess`` holds ``u - t0`` when the solver worked in that variable; it
    keeps full relative accuracy where ``u`` is within rounding of ``t0``.
    """

    domain: Domain
    values: np.ndarray
    lam: float
    residual_norm: float = 0.0
    newton_iters: int = 0
    converged: bool = True
    t0: float = -math.inf
    excess: np.ndarray | None = None
    method: str = "newton"
    info: dict = field(default_factory=dict)

    @property
    def min_value(self) -> float:
        return float(np.min(self.values[self.domain.interior]))

    @property
    def argmin(self) -> int:
        """Node of the minimum, located through the excess so it survives rounding of u."""
        ii = self.domain.interior_index
        return int(ii[np.argmin(self.gap()[ii])])

    def gap(self) -> np.ndarray:
        """u - t0 (accurate) for finite t0, else u."""
        if self.excess is not None:
            return self.excess
        return self.values - self.t0 if math.isfinite(self.t0) else self.values

    def summary(self) -> dict:
        x = self.domain.coords[self.argmin]
        return {
            "lambda": self.lam,
            "min_u": self.min_value,
            "min_gap": float(np.min(self.gap()[self.domain.interior])),
            "argmin": float(np.linalg.norm(x)) if np.ndim(x) else float(x),
            "residual": self.residual_norm,
            "iters": self.newton_iters,
            "converged": self.converged,
        }


def torsion(domain: Domain) -> SolutionField:
    """Discrete solution of -Δφ = 1 in the domain, φ = 0 on the boundary."""
    LII, _ = domain.split_laplacian()
    ii = domain.interior_index
    try:
        phi_i = spla.spsolve(-LII, np.ones(len(ii)))
    except Exception as exc:  # pragma: no cover - singular only for broken meshes
        raise DomainError(f"torsion solve failed: {exc}") from exc
    if not np.all(np.isfinite(phi_i)):
        raise DomainError("torsion solve failed")
    phi = np.zeros(domain.n)
    phi[ii] = phi_i
    res = float(np.max(np.abs(domain.laplacian()[ii] @ phi + 1.0)))
    return SolutionField(domain, phi, lam=0.0, residual_norm=res, newton_iters=0, method="linear")

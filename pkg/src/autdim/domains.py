"""Bounded model domains in C^n and the Hausdorff metric on their boundaries.

Every domain is an immutable dataclass.  Points are 1-D complex numpy arrays
of length ``n``; scalars are accepted wherever ``n == 1``.  The module-level
functions (``contains``, ``dist_to_boundary``, ...) are the public surface;
the methods on the classes do the per-variant work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree

from .errors import DimensionError, OutsideDomainError, UnboundedDomainError

ANALYTIC_MESH_TOL = 1e-9
SAMPLED_MESH_TOL = 1e-4
_DEDUP_TOL = 1e-12


def as_point(z, n: Optional[int] = None) -> np.ndarray:
    """Coerce a scalar or sequence to a finite complex coordinate vector."""
    p = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    if p.size == 0:
        raise DimensionError("a point needs at least one coordinate")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"non-finite coordinates: {p}")
    if n is not None and p.size != n:
        raise DimensionError(f"expected a point of C^{n}, got {p.size} coordinates")
    return p


def _n_on_circle(radius: float, density: float) -> int:
    # the 1e-9 guards against 2*pi/(2*pi/8) evaluating to 8.000000001
    return max(3, math.ceil(2 * math.pi * radius / density - 1e-9))


def _circle(center: complex, radius: float, density: float) -> np.ndarray:
    k = np.arange(_n_on_circle(radius, density))
    return center + radius * np.exp(2j * np.pi * k / k.size)


class Domain:
    """Common interface; subclasses are frozen dataclasses."""

    variant = "Domain"
    mesh_tol = ANALYTIC_MESH_TOL
    bounded = True

    @property
    def dim(self) -> int:
        return 1

    def contains(self, p: np.ndarray) -> bool:
        raise NotImplementedError

    def dist(self, p: np.ndarray) -> float:
        raise NotImplementedError

    def samples(self, density: float):
        raise UnboundedDomainError(f"{self.variant} has no finite boundary sample")

    def farthest(self, center: np.ndarray, density: float) -> float:
        pts, _ = self.samples(density)
        return float(np.max(np.linalg.norm(pts - center, axis=1)))

    def params(self) -> dict:
        return {}

    def default_density(self) -> float:
        return 1e-2


@dataclass(frozen=True)
class UnitDisk(Domain):
    variant = "UnitDisk"

    def contains(self, p):
        return bool(abs(p[0]) < 1.0)

    def dist(self, p):
        return 1.0 - abs(p[0])

    def samples(self, density):
        pts = _circle(0.0, 1.0, density)
        return pts[:, None], pts[:, None].copy()

    def farthest(self, center, density):
        return 1.0 + abs(center[0])


@dataclass(frozen=True)
class Ball(Domain):
    center: tuple = (0j,)
    radius: float = 1.0
    variant = "Ball"

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(complex(c) for c in np.atleast_1d(self.center)))
        if not self.radius > 0:
            raise ValueError("Ball radius must be positive")

    @property
    def dim(self):
        return len(self.center)

    def contains(self, p):
        return bool(np.linalg.norm(p - np.asarray(self.center)) < self.radius)

    def dist(self, p):
        return self.radius - float(np.linalg.norm(p - np.asarray(self.center)))

    def samples(self, density):
        c = np.asarray(self.center)
        R = self.radius
        if self.dim == 1:
            pts = _circle(0.0, R, density)[:, None]
        elif self.dim == 2:
            # Hopf coordinates: (R cos(eta) e^{ia}, R sin(eta) e^{ib})
            n_eta = max(2, math.ceil(0.5 * math.pi * R / density - 1e-9))
            chunks = []
            for eta in np.linspace(0.0, 0.5 * math.pi, n_eta + 1):
                r1, r2 = R * math.cos(eta), R * math.sin(eta)
                a = np.exp(2j * np.pi * np.arange(na := (_n_on_circle(r1, density) if r1 > 1e-12 else 1)) / na)
                b = np.exp(2j * np.pi * np.arange(nb := (_n_on_circle(r2, density) if r2 > 1e-12 else 1)) / nb)
                A, B = np.meshgrid(r1 * a, r2 * b, indexing="ij")
                chunks.append(np.stack([A.ravel(), B.ravel()], axis=1))
            pts = np.concatenate(chunks)
        else:
            raise DimensionError("boundary sampling is implemented for n <= 2")
        return pts + c, pts / R

    def farthest(self, center, density):
        return self.radius + float(np.linalg.norm(center - np.asarray(self.center)))

    def params(self):
        return {"center": [[c.real, c.imag] for c in self.center], "radius": self.radius}

    def default_density(self):
        return self.radius * (1e-2 if self.dim == 1 else 0.1)


@dataclass(frozen=True)
class UpperHalfPlane(Domain):
    variant = "UpperHalfPlane"
    bounded = False

    def contains(self, p):
        return bool(p[0].imag > 0)

    def dist(self, p):
        return float(p[0].imag)


@dataclass(frozen=True)
class Strip(Domain):
    """The horizontal strip 0 < Im z < 1."""

    variant = "Strip"
    bounded = False

    def contains(self, p):
        return bool(0 < p[0].imag < 1)

    def dist(self, p):
        return float(min(p[0].imag, 1 - p[0].imag))


@dataclass(frozen=True)
class Annulus(Domain):
    r_in: float = 0.5
    r_out: float = 1.0
    variant = "Annulus"

    def __post_init__(self):
        if not 0 < self.r_in < self.r_out:
            raise ValueError("Annulus needs 0 < r_in < r_out")

    def contains(self, p):
        return bool(self.r_in < abs(p[0]) < self.r_out)

    def dist(self, p):
        return float(min(abs(p[0]) - self.r_in, self.r_out - abs(p[0])))

    def samples(self, density):
        outer = _circle(0.0, self.r_out, density)
        inner = _circle(0.0, self.r_in, density)
        pts = np.concatenate([outer, inner])
        nrm = np.concatenate([outer / self.r_out, -inner / self.r_in])
        return pts[:, None], nrm[:, None]

    def farthest(self, center, density):
        return self.r_out + abs(center[0])

    def params(self):
        return {"r_in": self.r_in, "r_out": self.r_out}


@dataclass(frozen=True)
class Ellipse(Domain):
    """(x/a)^2 + (y/b)^2 < 1."""

    a: float = 2.0
    b: float = 1.0
    variant = "Ellipse"

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("Ellipse semi-axes must be positive")

    def contains(self, p):
        z = p[0]
        return bool((z.real / self.a) ** 2 + (z.imag / self.b) ** 2 < 1)

    def _extremize_dist(self, z: complex, sign: float) -> float:
        # sign=+1 finds the nearest boundary point, -1 the farthest
        def f(theta):
            return sign * abs(self.a * math.cos(theta) + 1j * self.b * math.sin(theta) - z)

        grid = np.linspace(0, 2 * np.pi, 2049)
        vals = sign * np.abs(self.a * np.cos(grid) + 1j * self.b * np.sin(grid) - z)
        k = int(np.argmin(vals))
        step = grid[1] - grid[0]
        res = minimize_scalar(f, bounds=(grid[k] - step, grid[k] + step), method="bounded",
                              options={"xatol": 1e-13})
        return sign * min(float(res.fun), float(vals[k]))

    def dist(self, p):
        return self._extremize_dist(complex(p[0]), 1.0)

    def samples(self, density):
        n = _n_on_circle(max(self.a, self.b), density)
        t = 2 * np.pi * np.arange(n) / n
        pts = self.a * np.cos(t) + 1j * self.b * np.sin(t)
        nrm = np.cos(t) / self.a + 1j * np.sin(t) / self.b
        return pts[:, None], (nrm / np.abs(nrm))[:, None]

    def farthest(self, center, density):
        return self._extremize_dist(complex(center[0]), -1.0)

    def params(self):
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True)
class DiskMinusDisk(Domain):
    """{|z| < 1, |z - c| > rho}: the sets Q and Q_j."""

    c: complex = 0.5
    rho: float = 0.5
    variant = "DiskMinusDisk"

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        if not self.rho > 0:
            raise ValueError("removed radius must be positive")
        if abs(self.c) - self.rho > 1:
            raise ValueError("the removed disk must meet the closed unit disk")
        if self.rho >= abs(self.c) + 1:
            raise ValueError("the removed disk covers the unit disk")

    @property
    def tangent(self) -> bool:
        return abs(abs(self.c) + self.rho - 1) < 1e-12 and self.rho < 1

    @property
    def hole_inside(self) -> bool:
        """The removed disk lies in the closed unit disk (the set is not simply connected unless tangent)."""
        return abs(self.c) + self.rho <= 1 + 1e-12

    def contains(self, p):
        z = p[0]
        return bool(abs(z) < 1 and abs(z - self.c) > self.rho)

    def crossings(self) -> list[complex]:
        """Intersection points of the two boundary circles (empty unless they cross or touch)."""
        d = abs(self.c)
        if d == 0 or d > 1 + self.rho or d < abs(1 - self.rho):
            return []
        x = (1 - self.rho ** 2 + d ** 2) / (2 * d)
        h = math.sqrt(max(0.0, 1 - x * x))
        u = self.c / d
        pts = [u * complex(x, h), u * complex(x, -h)]
        return pts[:1] if h < 1e-12 else pts

    def _on_outer_arc(self, q):
        return abs(q - self.c) >= self.rho - 1e-14

    def _on_inner_arc(self, q):
        return abs(q) <= 1 + 1e-14

    def dist(self, p):
        z = complex(p[0])
        ends = self.crossings()
        best = math.inf
        q = z / abs(z) if abs(z) > 0 else None
        if q is None or self._on_outer_arc(q):
            best = min(best, 1 - abs(z))
        v = z - self.c
        q = self.c + self.rho * v / abs(v) if abs(v) > 0 else None
        if q is None or self._on_inner_arc(q):
            best = min(best, abs(v) - self.rho)
        for e in ends:
            best = min(best, abs(z - e))
        return float(best)

    def samples(self, density):
        outer = _circle(0.0, 1.0, density)
        outer = outer[np.abs(outer - self.c) >= self.rho - 1e-14]
        inner = _circle(self.c, self.rho, density)
        inner = inner[np.abs(inner) <= 1 + 1e-14]
        if outer.size and inner.size:
            # the tangency point sits on both circles; keep it once
            near = np.flatnonzero(np.abs(inner) > 1 - 1e-9)
            if near.size:
                dup = np.min(np.abs(inner[near][:, None] - outer[None, :]), axis=1) < _DEDUP_TOL
                inner = np.delete(inner, near[dup])
        pts = np.concatenate([outer, inner])
        nrm = np.concatenate([outer, (self.c - inner) / self.rho])
        return pts[:, None], nrm[:, None]

    def farthest(self, center, density):
        z = complex(center[0])
        cands = list(self.crossings())
        if abs(z) > 0:
            cands.append(-z / abs(z))
        else:
            cands.append(-self.c / abs(self.c) if abs(self.c) > 0 else 1.0)
        v = self.c - z
        cands.append(self.c + self.rho * (v / abs(v) if abs(v) > 0 else 1.0))
        ok = [q for q in cands if self._on_outer_arc(q) and self._on_inner_arc(q)]
        best = max((abs(q - z) for q in ok), default=0.0)
        return max(best, Domain.farthest(self, center, density))

    def params(self):
        return {"c": [self.c.real, self.c.imag], "rho": self.rho}

    def default_density(self):
        return 1e-3


@dataclass(frozen=True)
class ProductMinusDiagonal(Domain):
    """{(z, w): z in base, |w| < 1, w != z} -- the sets D and D_j."""

    base: Domain = field(default_factory=DiskMinusDisk)
    variant = "ProductMinusDiagonal"

    def __post_init__(self):
        if self.base.dim != 1 or not self.base.bounded:
            raise ValueError("base of ProductMinusDiagonal must be a bounded planar domain")

    @property
    def dim(self):
        return 2

    def contains(self, p):
        z, w = p
        return bool(self.base.contains(p[:1]) and abs(w) < 1 and w != z)

    def dist(self, p):
        z, w = p
        return float(min(self.base.dist(p[:1]), 1 - abs(w), abs(z - w) / math.sqrt(2)))

    def _planar_grid(self, dom: Domain, density: float) -> np.ndarray:
        bpts, _ = dom.samples(density)
        R = float(np.max(np.abs(bpts)))
        xs = np.arange(-R, R + density, density)
        X, Y = np.meshgrid(xs, xs)
        grid = (X + 1j * Y).ravel()
        inside = np.array([dom.contains(np.array([g])) for g in grid], dtype=bool)
        return np.concatenate([grid[inside], bpts[:, 0]])

    def samples(self, density):
        # fiberwise boundary pieces only; the deleted diagonal is not sampled
        bpts, bnrm = self.base.samples(density)
        disk = self._planar_grid(UnitDisk(), density)
        circle = _circle(0.0, 1.0, density)
        qgrid = self._planar_grid(self.base, density)
        A = np.stack(np.broadcast_arrays(bpts[:, 0][:, None], disk[None, :]), axis=-1).reshape(-1, 2)
        An = np.stack(np.broadcast_arrays(bnrm[:, 0][:, None], 0 * disk[None, :]), axis=-1).reshape(-1, 2)
        B = np.stack(np.broadcast_arrays(qgrid[:, None], circle[None, :]), axis=-1).reshape(-1, 2)
        Bn = np.stack(np.broadcast_arrays(0 * qgrid[:, None], circle[None, :]), axis=-1).reshape(-1, 2)
        return np.concatenate([A, B]), np.concatenate([An, Bn])

    def farthest(self, center, density):
        z, w = center
        return math.hypot(self.base.farthest(center[:1], density), 1 + abs(w))

    def params(self):
        return {"base": domain_to_json(self.base)}

    def default_density(self):
        return 0.1


@dataclass(frozen=True)
class Sampled(Domain):
    """Generic domain given by a membership oracle and an oriented boundary mesh."""

    oracle: Callable = None
    points: np.ndarray = None
    normals: np.ndarray = None
    mesh_tol: float = SAMPLED_MESH_TOL
    variant = "Sampled"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        if pts.ndim == 1:
            pts = pts[:, None]
        nrm = np.asarray(self.normals, dtype=complex).reshape(pts.shape)
        nrm = nrm / np.linalg.norm(nrm, axis=1, keepdims=True)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "normals", nrm)

    @property
    def dim(self):
        return self.points.shape[1]

    def contains(self, p):
        return bool(self.oracle(p))

    def dist(self, p):
        return float(np.min(np.linalg.norm(self.points - p, axis=1)))

    def samples(self, density):
        return self.points.copy(), self.normals.copy()

    def params(self):
        raise TypeError("Sampled domains carry a Python oracle and cannot be serialized")


@dataclass(frozen=True)
class RadiiPair:
    r: float
    R: float
    center: np.ndarray


# -- public operations ---------------------------------------------------------


def _check_dim(d: Domain, z) -> np.ndarray:
    return as_point(z, d.dim)


def contains(d: Domain, z) -> bool:
    return d.contains(_check_dim(d, z))


def dist_to_boundary(d: Domain, z) -> float:
    p = _check_dim(d, z)
    if not d.contains(p):
        raise OutsideDomainError(f"{p} is not in {d.variant}")
    return d.dist(p)


def boundary_samples(d: Domain, density: Optional[float] = None):
    """Boundary points (m, n) and outward unit normals (m, n) with arc spacing <= density."""
    if not d.bounded:
        raise UnboundedDomainError(f"{d.variant} is unbounded")
    if density is None:
        density = d.default_density()
    if not density > 0:
        raise ValueError("density must be positive")
    return d.samples(density)


def inner_outer_radii(d: Domain, center, density: Optional[float] = None) -> RadiiPair:
    if not d.bounded:
        raise UnboundedDomainError(f"radii are undefined for the unbounded {d.variant}")
    c = _check_dim(d, center)
    r = dist_to_boundary(d, c)
    R = d.farthest(c, density or d.default_density()) * (1 + d.mesh_tol)
    return RadiiPair(r=r, R=R, center=c)


def hausdorff_distance(d1: Domain, d2: Domain, density: Optional[float] = None) -> float:
    """Hausdorff distance between boundary samples, computed with k-d trees."""
    if d1.dim != d2.dim:
        raise DimensionError("domains live in different dimensions")
    if density is None:
        density = min(d1.default_density(), d2.default_density())
    p1, _ = boundary_samples(d1, density)
    p2, _ = boundary_samples(d2, density)
    a = np.concatenate([p1.real, p1.imag], axis=1)
    b = np.concatenate([p2.real, p2.imag], axis=1)
    d12 = cKDTree(b).query(a)[0].max()
    d21 = cKDTree(a).query(b)[0].max()
    return float(max(d12, d21))


# -- JSON literals -------------------------------------------------------------

_VARIANTS = {cls.variant: cls for cls in
             (UnitDisk, Ball, UpperHalfPlane, Strip, Annulus, Ellipse, DiskMinusDisk, ProductMinusDiagonal)}


def domain_to_json(d: Domain) -> dict:
    return {"variant": d.variant, "params": d.params()}


def _cx(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return complex(v)


def domain_from_json(doc: dict) -> Domain:
    variant = doc["variant"]
    p = doc.get("params", {})
    if variant not in _VARIANTS:
        raise ValueError(f"unknown domain variant {variant!r}")
    if variant == "Ball":
        center = p.get("center", [[0, 0]])
        if center and not isinstance(center[0], (list, tuple, str)):
            center = [center]
        return Ball(center=tuple(_cx(c) for c in center), radius=float(p.get("radius", 1.0)))
    if variant == "Annulus":
        return Annulus(float(p["r_in"]), float(p["r_out"]))
    if variant == "Ellipse":
        return Ellipse(float(p["a"]), float(p["b"]))
    if variant == "DiskMinusDisk":
        return DiskMinusDisk(_cx(p["c"]), float(p["rho"]))
    if variant == "ProductMinusDiagonal":
        return ProductMinusDiagonal(domain_from_json(p["base"]))
    return _VARIANTS[variant]()

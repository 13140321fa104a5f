"""Lower-bound estimates of dim Aut for planar domains and the convergence experiments.

A holomorphic field X generates a flow preserving D exactly when Re X is
tangent to the boundary, i.e. Re(X(z) conj(nu(z))) = 0 on the boundary.  For
X = sum_k c_k z^k this is real-linear in (Re c_k, Im c_k); the real nullity
of the sampled system bounds dim Aut from below within polynomial fields of
the chosen degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import gallery
from .domains import Annulus, Domain, Ellipse, UnitDisk, boundary_samples, hausdorff_distance
from .errors import AmbiguousDimError, PreconditionError, UnderdeterminedError
from .fields import VectorFieldPoly
from .estimates import ball_sup

DEFAULT_TOL = 1e-8
MIN_GAP = 10.0


@dataclass(frozen=True)
class TangencySystem:
    matrix: np.ndarray
    degree: int
    samples: np.ndarray
    normals: np.ndarray


def tangency_matrix(d: Domain, degree: int = 2, density: Optional[float] = None,
                    normal_scale: float = 1.0) -> TangencySystem:
    """Rows Re(X(z_k) conj(nu_k)); columns interleave (Re c_j, Im c_j) for j = 0..degree."""
    if d.dim != 1:
        raise PreconditionError("the tangency estimator is planar only")
    if degree < 0:
        raise ValueError("degree must be non-negative")
    pts, nus = boundary_samples(d, density)
    if len(pts) < 4 * (degree + 1):
        raise UnderdeterminedError(f"{len(pts)} samples for {degree + 1} complex unknowns")
    z = pts[:, 0]
    nu = normal_scale * nus[:, 0]
    powers = z[:, None] ** np.arange(degree + 1)[None, :]
    base = powers * np.conj(nu)[:, None]
    M = np.empty((len(z), 2 * (degree + 1)))
    M[:, 0::2] = base.real
    M[:, 1::2] = -base.imag
    return TangencySystem(M, degree, pts, nus)


@dataclass(frozen=True)
class DimReport:
    estimated_dim: int
    singular_values: tuple
    gap_ratio: float
    tolerance: float
    degree: int
    null_basis: tuple = field(default=(), compare=False)

    def to_json(self) -> dict:
        return {"estimatedDim": self.estimated_dim, "singularValues": list(self.singular_values),
                "gapRatio": self.gap_ratio, "tolerance": self.tolerance, "degreeCap": self.degree,
                "kind": "lower bound within polynomial fields of the stated degree"}


def _null_fields(Vt: np.ndarray, k: int, degree: int) -> tuple:
    out = []
    for row in Vt[len(Vt) - k:]:
        coeffs = row[0::2] + 1j * row[1::2]
        out.append(VectorFieldPoly.planar(coeffs))
    return tuple(out)


def aut_dim_estimate(d: Domain, degree: int = 2, tol: float = DEFAULT_TOL,
                     density: Optional[float] = None) -> DimReport:
    system = tangency_matrix(d, degree, density)
    _, sv, Vt = np.linalg.svd(system.matrix, full_matrices=False)
    smax = sv[0]
    if smax == 0:
        raise AmbiguousDimError("the tangency matrix vanishes", tuple(sv))
    small = sv < tol * smax
    k = int(np.count_nonzero(small))
    kept = sv[~small]
    if k == 0:
        gap = float(sv[-1] / (tol * smax))
    elif kept.size == 0:
        gap = math.inf
    else:
        dropped = sv[small][0]
        gap = math.inf if dropped == 0 else float(kept[-1] / dropped)
    if gap < MIN_GAP:
        raise AmbiguousDimError(f"spectral gap {gap:.3g} is below {MIN_GAP}", tuple(sv))
    return DimReport(k, tuple(float(s) for s in sv), gap, tol, degree, _null_fields(Vt, k, degree))


# -- experiments ---------------------------------------------------------------------


@dataclass(frozen=True)
class SemicontinuityRow:
    param: float
    hausdorff: float
    dim: int
    sigma_min: float
    gap_ratio: float


@dataclass(frozen=True)
class SemicontinuityTable:
    name: str
    rows: tuple
    limit_dim: int
    limit_report: DimReport

    @property
    def holds(self) -> bool:
        tail = self.rows[len(self.rows) // 2:]
        return max(r.dim for r in tail) <= self.limit_dim

    def columns(self) -> tuple:
        return ("param", "hausdorff", "dim", "sigma_min", "gapRatio")

    def as_rows(self) -> list:
        return [(r.param, r.hausdorff, r.dim, r.sigma_min, r.gap_ratio) for r in self.rows]

    def to_json(self) -> dict:
        return {"name": self.name, "limitDim": self.limit_dim, "semicontinuityHolds": self.holds,
                "rows": [dict(zip(self.columns(), row)) for row in self.as_rows()]}


def semicontinuity_experiment(family: Sequence[tuple], limit: Domain, degree: int = 2,
                              tol: float = DEFAULT_TOL, name: str = "family",
                              density: Optional[float] = None) -> SemicontinuityTable:
    """``family`` lists (parameter, domain) pairs ordered towards the limit."""
    if not family:
        raise ValueError("empty family")
    limit_report = aut_dim_estimate(limit, degree, tol, density)
    rows = []
    for param, dom in family:
        try:
            rep = aut_dim_estimate(dom, degree, tol, density)
        except AmbiguousDimError as exc:
            raise AmbiguousDimError(f"member {param}: {exc}", exc.spectrum) from exc
        rows.append(SemicontinuityRow(float(param), hausdorff_distance(dom, limit, density), rep.estimated_dim,
                                      rep.singular_values[-1], rep.gap_ratio))
    table = SemicontinuityTable(name, tuple(rows), limit_report.estimated_dim, limit_report)
    if not table.holds:
        raise AssertionError(f"{name}: member dimension exceeds the limit dimension")
    return table


def ellipse_family(eps_list=(0.5, 0.2, 0.1, 0.05)) -> tuple:
    return tuple((e, Ellipse(1 + e, 1.0)) for e in eps_list), UnitDisk()


def annulus_family(j_list=range(3, 9)) -> tuple:
    return tuple((j, Annulus(0.3 - 2.0 ** -j, 1.0)) for j in j_list), Annulus(0.3, 1.0)


def q_family(j_list=range(3, 9)) -> tuple:
    return tuple((j, gallery.q_part(j)) for j in j_list), gallery.q_part(gallery.LIMIT)


FAMILIES = {"ellipse": ellipse_family, "annulus": annulus_family, "q": q_family}


# -- convergence of generators ----------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceReport:
    js: tuple
    sup_deviations: tuple
    norms: tuple
    K: dict

    def decreasing(self) -> bool:
        dev = self.sup_deviations
        return all(b <= a for a, b in zip(dev, dev[1:]))

    def columns(self) -> tuple:
        return ("j", "supDeviation", "normB")

    def as_rows(self) -> list:
        return [(-1 if j is None else j, dv, nb) for j, dv, nb in zip(self.js, self.sup_deviations, self.norms)]

    def to_json(self) -> dict:
        return {"js": [None if j is None else j for j in self.js], "supDeviations": list(self.sup_deviations),
                "normsOnB": list(self.norms), "K": self.K}


def disk_cloud(center: complex, radius: float, rings: int = 8, per_ring: int = 64) -> np.ndarray:
    pts = [center]
    for k in range(1, rings + 1):
        r = radius * k / rings
        pts.extend(center + r * np.exp(2j * np.pi * np.arange(per_ring) / per_ring))
    return np.asarray(pts, dtype=complex)


def field_convergence_experiment(j_list, B=(-0.5, 0.25), K=(-0.5, 0.1), s: float = 0.05) -> ConvergenceReport:
    """sup_K |X_j - X_lim| for the circle generators of D_j and the translation generator of D, all with sup_B |.| = 1."""
    bc, br = complex(B[0]), float(B[1])
    kc, kr = complex(K[0]), float(K[1])
    cloud = disk_cloud(kc, kr)[:, None]
    doms = [gallery.q_part(j) for j in j_list] + [gallery.q_part(gallery.LIMIT)]
    for dom in doms:
        if dom.dist(np.array([bc])) <= br:
            raise PreconditionError(f"B is not inside {dom.params()}")
        if min(dom.dist(p) for p in cloud) < 3 * s:
            raise PreconditionError(f"K is closer than 3s to the boundary of {dom.params()}")

    def normalized(j):
        X = gallery.circle_field(j)
        nb = ball_sup(X, bc, br)
        return X.scale(1 / nb), nb

    X_lim, _ = normalized(gallery.LIMIT)
    ref = X_lim(cloud)
    devs, norms = [], []
    for j in j_list:
        Xj, nb = normalized(j)
        devs.append(float(np.max(np.abs(Xj(cloud) - ref))))
        norms.append(nb)
    return ConvergenceReport(tuple(j_list), tuple(devs), tuple(norms),
                             {"center": [kc.real, kc.imag], "radius": kr, "points": len(cloud)})

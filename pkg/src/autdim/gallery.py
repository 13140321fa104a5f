"""Closed-form domains and automorphism groups of the degenerating family D_j -> D.

Q_j = {|z| < 1, |z - c_j| > 1/2} with c_j = 1/2 - 2^-j, Q its tangent limit,
D_j and D the products with the disk minus the diagonal.  D carries the
real translation group g_t conjugated by phi; D_j carries a circle action
obtained by conjugating rotations with the Mobius map that makes the two
boundary circles of Q_j concentric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .conformal import PHI, Mobius
from .domains import Domain, DiskMinusDisk, ProductMinusDiagonal, as_point
from .errors import DiagonalError, EscapeError, OutsideDomainError, PoleError, TangencyError
from .fields import VectorFieldPoly
from .flow import GroupAction, flow

LIMIT = None


def phi(w):
    """-i(w + 1)/(w - 1): disk onto the upper half-plane, Q onto the strip 0 < Im < 1."""
    w = np.asarray(w, dtype=complex)
    if np.any(w == 1):
        raise PoleError("phi has a pole at w = 1")
    out = PHI(w)
    return complex(out) if out.ndim == 0 else out


def phi_inv(zeta):
    zeta = np.asarray(zeta, dtype=complex)
    out = PHI.inverse()(zeta)
    return complex(out) if out.ndim == 0 else out


def g_t(w, t: float):
    """(2w + i(w-1)t) / (2 + i(w-1)t) = phi^-1(phi(w) + t)."""
    w = np.asarray(w, dtype=complex)
    den = 2 + 1j * (w - 1) * t
    if np.any(den == 0):
        raise PoleError(f"g_t has a pole at t={t}")
    out = (2 * w + 1j * (w - 1) * t) / den
    return complex(out) if out.ndim == 0 else out


def limit_field() -> VectorFieldPoly:
    """d/dt g_t(w) at t = 0, which is -(i/2)(w - 1)^2."""
    return VectorFieldPoly.planar([-0.5j, 1j, -0.5j])


def q_part(j: Optional[int]) -> DiskMinusDisk:
    if j is LIMIT:
        return DiskMinusDisk(0.5, 0.5)
    if j < 2:
        raise ValueError("the family starts at j = 2")
    return DiskMinusDisk(0.5 - 2.0 ** -j, 0.5)


@dataclass(frozen=True)
class Example1Family:
    j: Optional[int]
    q_part: DiskMinusDisk
    product: ProductMinusDiagonal

    @property
    def is_limit(self) -> bool:
        return self.j is LIMIT


def example1(j: Optional[int]) -> Example1Family:
    q = q_part(j)
    return Example1Family(j, q, ProductMinusDiagonal(q))


def F_t(p, t: float, check: bool = True) -> np.ndarray:
    """(g_t(z), g_t(w)) on D."""
    z, w = as_point(p, 2)
    out = np.array([g_t(z, t), g_t(w, t)])
    if check:
        D = example1(LIMIT).product
        if out[0] == out[1] or abs(out[0] - out[1]) < 1e-15:
            raise DiagonalError(f"F_t image {out} is on the deleted diagonal")
        if not D.contains(out):
            raise OutsideDomainError(f"F_t image {out} left D")
    return out


def translation_action(product: bool = True) -> GroupAction:
    """The R-action of D (or of Q when ``product`` is False) in closed form."""
    fam = example1(LIMIT)
    X = limit_field()
    if product:
        return GroupAction.closed_form(lambda Z, t: g_t(Z, t), VectorFieldPoly.diagonal(X),
                                       fam.product, name="F_t")
    return GroupAction.closed_form(lambda Z, t: g_t(Z, t), X, fam.q_part, name="g_t")


# -- circle action on D_j ----------------------------------------------------------


def symmetric_point(c: complex, rho: float) -> complex:
    """The point inside the removed disk that is symmetric for both boundary circles."""
    k = abs(c)
    u = c / k if k else 1.0
    if k + rho >= 1 - 1e-12:
        raise TangencyError("the boundary circles touch; there is no concentric model")
    if k == 0:
        return 0j
    s = 1 + k * k - rho * rho
    disc = s * s - 4 * k * k
    roots = [(s - math.sqrt(disc)) / (2 * k), (s + math.sqrt(disc)) / (2 * k)]
    p = next(x for x in roots if abs(x - k) < rho)
    return complex(u * p)


def concentric_map(j: int) -> Mobius:
    """Disk automorphism sending the circle pair of Q_j to concentric circles about 0."""
    if j is LIMIT:
        raise TangencyError("Q is bounded by tangent circles")
    q = q_part(j)
    p = symmetric_point(q.c, q.rho)
    return Mobius(1, -p, -p.conjugate(), 1)


def inner_modulus(j: int) -> float:
    """Radius of the image of the removed disk under the concentric map."""
    q = q_part(j)
    mu = concentric_map(j)
    return float(abs(mu(q.c + q.rho)))


def rotation_map(j: int, t: float):
    mu = concentric_map(j)
    mu_inv = mu.inverse()
    rot = complex(math.cos(t), math.sin(t))
    return lambda Z: mu_inv(rot * mu(np.asarray(Z, dtype=complex)))


def annulus_rotation_action(j: int, t: float):
    """The map (z, w) -> (A_t z, A_t w) of D_j; A_t is a rotation in concentric coordinates."""
    A = rotation_map(j, t)
    return lambda P: A(np.atleast_2d(np.asarray(P, dtype=complex)))


def circle_field(j: Optional[int]) -> VectorFieldPoly:
    """Generator i mu/mu' of the circle action on Q_j; the translation field for the limit."""
    if j is LIMIT:
        return limit_field()
    mu = concentric_map(j)
    p = -mu.b
    pc = p.conjugate()
    s = 1 - abs(p) ** 2
    return VectorFieldPoly.planar([-1j * p / s, 1j * (1 + abs(p) ** 2) / s, -1j * pc / s])


def circle_action(j: int, product: bool = True) -> GroupAction:
    fam = example1(j)
    X = circle_field(j)

    def act(Z, t):
        return rotation_map(j, t)(Z)

    if product:
        return GroupAction.closed_form(act, VectorFieldPoly.diagonal(X), fam.product, name=f"S1 on D_{j}")
    return GroupAction.closed_form(act, X, fam.q_part, name=f"S1 on Q_{j}")


def base_point(j: Optional[int]) -> np.ndarray:
    """Default orbit start: (-1/2, 0) on D; on D_j an orbit through the middle of the neck near 1."""
    if j is LIMIT:
        return np.array([-0.5, 0.0], dtype=complex)
    mu = concentric_map(j)
    neck = 1 - 2.0 ** (-j - 1)
    z0 = mu.inverse()(-mu(neck))
    return np.array([z0, -mu.b], dtype=complex)


# -- orbit classification ----------------------------------------------------------


@dataclass(frozen=True)
class OrbitReport:
    classification: str
    min_boundary_dist: float
    recurrence_gap: float
    horizon: float
    trace: Optional[tuple] = None

    def to_json(self) -> dict:
        return {"classification": self.classification, "minBoundaryDist": self.min_boundary_dist,
                "recurrenceGap": self.recurrence_gap, "horizon": self.horizon}


def orbit_classifier(d: Domain, a: GroupAction, z0, Tmax: float, eps_c: float = 1e-5,
                     eps_r: float = 1e-3, eps_esc: float = 1e-3, n_steps: int = 1000,
                     keep_trace: bool = False) -> OrbitReport:
    """Sample the orbit on |t| <= Tmax and classify it as Compact, Noncompact or Undetermined."""
    p0 = as_point(z0, d.dim)
    if not d.contains(p0):
        raise OutsideDomainError(f"{p0} is not in {d.variant}")
    ts = np.linspace(-Tmax, Tmax, 2 * n_steps + 1)
    try:
        if a.is_closed_form:
            pts = np.array([a.map(p0[None, :], t)[0] for t in ts])
        else:
            pts = _flow_grid(a, p0, ts, d)
    except (EscapeError, PoleError):
        return OrbitReport("Noncompact", 0.0, math.inf, Tmax)
    inside = [d.contains(q) for q in pts]
    if not all(inside):
        return OrbitReport("Noncompact", 0.0, math.inf, Tmax, (ts, pts) if keep_trace else None)
    min_bd = float(min(d.dist(q) for q in pts))
    far = np.abs(ts) >= 1.0
    gap = float(np.min(np.linalg.norm(pts[far] - p0, axis=1))) if np.any(far) else math.inf
    if min_bd >= eps_c and gap <= eps_r:
        label = "Compact"
    elif min_bd < eps_esc:
        label = "Noncompact"
    else:
        label = "Undetermined"
    return OrbitReport(label, min_bd, gap, Tmax, (ts, pts) if keep_trace else None)


def _flow_grid(a: GroupAction, p0, ts, d):
    mid = len(ts) // 2
    out = np.empty((len(ts), p0.size), dtype=complex)
    out[mid] = p0
    for direction in (1, -1):
        k = mid
        while 0 < k + direction < len(ts) or (direction == 1 and k + 1 < len(ts)):
            nxt = k + direction
            if not 0 <= nxt < len(ts):
                break
            out[nxt] = flow(a.field, out[k], ts[nxt] - ts[k], a.tol, d)
            k = nxt
    return out

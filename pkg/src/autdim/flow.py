"""One-parameter group actions: closed forms and integrated holomorphic flows.

The integrator is a Dormand-Prince 5(4) pair with absolute error control on the
complex state.  Several points can be pushed through one integration so that
they share a step sequence; finite-difference Jacobians taken that way are
smooth in the initial point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .domains import Domain, as_point
from .errors import EscapeError, PreconditionError, StiffnessError
from .fields import VectorFieldPoly

DEFAULT_TOL = 1e-10
MAX_STEPS = 1_000_000
EXIT_RESOLUTION = 1e-6

_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


def _dp_step(rhs, y, h, k1):
    ks = [k1]
    for row in _A[1:]:
        yi = y + h * sum(a * k for a, k in zip(row, ks) if a != 0.0)
        ks.append(rhs(yi))
    y5 = y + h * sum(b * k for b, k in zip(_B5, ks) if b != 0.0)
    err = h * sum(e * k for e, k in zip(_B5 - _B4, ks) if e != 0.0)
    return y5, float(np.max(np.abs(err))), ks[-1]


def _all_inside(domain: Optional[Domain], y: np.ndarray) -> bool:
    if domain is None:
        return bool(np.all(np.isfinite(y)))
    return all(domain.contains(row) for row in y) and bool(np.all(np.isfinite(y)))


def integrate(rhs: Callable, y0: np.ndarray, t: float, tol: float = DEFAULT_TOL,
              domain: Optional[Domain] = None, max_steps: int = MAX_STEPS) -> np.ndarray:
    """Integrate y' = rhs(y) from 0 to t; y has shape (m, n) and every row must stay in ``domain``."""
    y = np.array(y0, dtype=complex)
    if t == 0:
        return y
    direction = 1.0 if t > 0 else -1.0
    T = abs(t)
    s = 0.0
    h = 1e-2
    k1 = rhs(y)
    for _ in range(max_steps):
        if s >= T:
            return y
        if h < 1e-14 * max(1.0, T):
            raise StiffnessError(f"step size underflow at t={direction * s:.6g}")
        step = min(h, T - s)
        y_new, err, k_last = _dp_step(rhs, y, direction * step, k1)
        if err <= tol:
            if not _all_inside(domain, y_new):
                raise EscapeError(direction * (s + _exit_fraction(rhs, y, direction * step, k1, domain) * step))
            y, k1 = y_new, k_last
            s = T if T - s - step < 1e-15 * T else s + step
        fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * (tol / err) ** 0.2))
        h = step * fac
    raise StiffnessError(f"exceeded {max_steps} steps")


def _exit_fraction(rhs, y, h, k1, domain) -> float:
    """Bisect the last step so the exit time is bracketed to EXIT_RESOLUTION."""
    lo, hi = 0.0, 1.0
    while (hi - lo) * abs(h) > EXIT_RESOLUTION:
        mid = 0.5 * (lo + hi)
        y_mid, _, _ = _dp_step(rhs, y, mid * h, k1)
        if _all_inside(domain, y_mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _field_rhs(X) -> Callable:
    if isinstance(X, VectorFieldPoly):
        return lambda y: X(y)
    return lambda y: np.array([X(row) for row in y])


def flow_batch(X, Z, t: float, tol: float = DEFAULT_TOL, d: Optional[Domain] = None) -> np.ndarray:
    """Flow several points of C^n at once (shared step sequence)."""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    if d is not None:
        for row in Z:
            if not d.contains(row):
                raise PreconditionError(f"{row} is not in {d.variant}")
    return integrate(_field_rhs(X), Z, t, tol, d)


def flow(X, z, t: float, tol: float = DEFAULT_TOL, d: Optional[Domain] = None) -> np.ndarray:
    """g(z, t) for the field X, with escape detection when a domain is given."""
    p = as_point(z, X.dim if isinstance(X, VectorFieldPoly) else None)
    if t == 0:
        return p.copy()
    return flow_batch(X, p[None, :], t, tol, d)[0]


def trajectory(X, z, T: float, n_out: int = 200, tol: float = DEFAULT_TOL,
               d: Optional[Domain] = None):
    """Sample the orbit at n_out + 1 equally spaced times in [0, T]."""
    p = as_point(z)
    times = np.linspace(0.0, T, n_out + 1)
    pts = [p]
    for a, b in zip(times[:-1], times[1:]):
        pts.append(flow(X, pts[-1], b - a, tol, d))
    return times, np.array(pts)


# -- group actions -------------------------------------------------------------


@dataclass(frozen=True)
class GroupAction:
    """g(z, t): either a closed-form family (``map``) or the flow of ``field``.

    ``map`` takes a (m, n) array and a real t and returns the (m, n) images.
    """

    field: Optional[object] = None
    map: Optional[Callable] = None
    domain: Optional[Domain] = None
    tol: float = DEFAULT_TOL
    name: str = ""

    @classmethod
    def closed_form(cls, map, field=None, domain=None, name="") -> "GroupAction":
        return cls(field=field, map=map, domain=domain, name=name)

    @classmethod
    def from_field(cls, field, domain=None, tol=DEFAULT_TOL, name="") -> "GroupAction":
        return cls(field=field, domain=domain, tol=tol, name=name)

    @property
    def is_closed_form(self) -> bool:
        return self.map is not None

    def batch(self, Z, t: float, d: Optional[Domain] = None) -> np.ndarray:
        d = d or self.domain
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        if self.map is None:
            return flow_batch(self.field, Z, t, self.tol, d)
        out = np.atleast_2d(np.asarray(self.map(Z, t), dtype=complex))
        if d is not None and not _all_inside(d, out):
            raise EscapeError(t)
        return out

    def __call__(self, z, t: float, d: Optional[Domain] = None) -> np.ndarray:
        return self.batch(as_point(z)[None, :], t, d)[0]


def group_property_residual(a: GroupAction, z, t: float, s: float, d: Optional[Domain] = None) -> float:
    """|g(z, t+s) - g(g(z, t), s)|."""
    p = as_point(z)
    return float(np.linalg.norm(a(p, t + s, d) - a(a(p, t, d), s, d)))


def infinitesimal_residual(a: GroupAction, z, t: float, d: Optional[Domain] = None,
                           h: float = 1e-5) -> float:
    """|X(g(z,t)) - J(z,t) X(z)| with J from central differences."""
    if a.field is None:
        raise PreconditionError("the action carries no generating field")
    p = as_point(z)
    n = p.size
    E = np.eye(n)
    stack = np.concatenate([p[None, :], p + h * E, p - h * E])
    images = a.batch(stack, t, d)
    J = (images[1:n + 1] - images[n + 1:]).T / (2 * h)
    X = _field_rhs(a.field)
    lhs = X(images[:1])[0]
    rhs = J @ X(p[None, :])[0]
    return float(np.linalg.norm(lhs - rhs))


# -- complexified flow ------------------------------------------------------------


@dataclass(frozen=True)
class ComplexTimePoint:
    zeta: complex
    tau: float = np.inf

    def __post_init__(self):
        object.__setattr__(self, "zeta", complex(self.zeta))
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if not abs(self.zeta.imag) < self.tau:
            raise PreconditionError(f"|Im zeta| = {abs(self.zeta.imag)} is not below tau = {self.tau}")


def _as_ctp(zeta) -> ComplexTimePoint:
    return zeta if isinstance(zeta, ComplexTimePoint) else ComplexTimePoint(zeta)


def complexify(X: VectorFieldPoly, z, zeta, tol: float = DEFAULT_TOL,
               d: Optional[Domain] = None) -> np.ndarray:
    """G(z, t + is) = g(h(z, s), t) where h flows the field iX."""
    zeta = _as_ctp(zeta).zeta
    p = as_point(z, X.dim)
    if d is not None and not d.contains(p):
        raise PreconditionError(f"{p} is not in {d.variant}")
    q = flow(X.scale(1j), p, zeta.imag, tol, d) if zeta.imag != 0 else p
    return flow(X, q, zeta.real, tol, d) if zeta.real != 0 else q


def cr_residual(X: VectorFieldPoly, z, zeta, d: Optional[Domain] = None, h: float = 1e-4,
                tol: float = 1e-13) -> float:
    """|dG/dt - X(G)| + |dG/ds - iX(G)| by central differences in t and s."""
    ctp = _as_ctp(zeta)
    zt = ctp.zeta
    G = lambda w: complexify(X, z, w, tol, d)
    G0 = G(zt)
    dt = (G(zt + h) - G(zt - h)) / (2 * h)
    ds = (G(zt + 1j * h) - G(zt - 1j * h)) / (2 * h)
    XG = X(G0)
    return float(np.linalg.norm(dt - XG) + np.linalg.norm(ds - 1j * XG))

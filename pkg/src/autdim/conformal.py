"""Composable chains of elementary one-variable holomorphic maps."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domains import (Ball, DiskMinusDisk, Domain, Strip, UnitDisk, UpperHalfPlane,
                      boundary_samples)
from .errors import NoClosedFormError


@dataclass(frozen=True)
class Mobius:
    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if abs(self.a * self.d - self.b * self.c) < 1e-300:
            raise ValueError("Mobius map must have ad - bc != 0")

    def __call__(self, z):
        return (self.a * z + self.b) / (self.c * z + self.d)

    def deriv(self, z):
        return (self.a * self.d - self.b * self.c) / (self.c * z + self.d) ** 2

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "Mobius") -> "Mobius":
        """self o other."""
        return Mobius(self.a * other.a + self.b * other.c, self.a * other.b + self.b * other.d,
                      self.c * other.a + self.d * other.c, self.c * other.b + self.d * other.d)


@dataclass(frozen=True)
class Exp:
    scale: complex = 1.0

    def __call__(self, z):
        return np.exp(self.scale * z)

    def deriv(self, z):
        return self.scale * np.exp(self.scale * z)


@dataclass(frozen=True)
class Log:
    """Principal logarithm of (z - center)."""

    center: complex = 0.0

    def __call__(self, z):
        return np.log(z - self.center)

    def deriv(self, z):
        return 1.0 / (z - self.center)


@dataclass(frozen=True)
class Power:
    """Principal branch of z ** exponent."""

    exponent: float

    def __call__(self, z):
        return np.power(np.asarray(z, dtype=complex), self.exponent)

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        return self.exponent * np.power(z, self.exponent - 1)


@dataclass(frozen=True)
class Affine:
    m: complex = 1.0
    q: complex = 0.0

    def __call__(self, z):
        return self.m * z + self.q

    def deriv(self, z):
        return self.m + 0 * z


@dataclass(frozen=True)
class ConformalChain:
    steps: tuple = ()

    def __call__(self, z):
        for s in self.steps:
            z = s(z)
        return z

    def deriv(self, z):
        d = 1.0 + 0j * np.asarray(z)
        for s in self.steps:
            d = d * s.deriv(z)
            z = s(z)
        return d

    def then(self, *steps) -> "ConformalChain":
        return ConformalChain(self.steps + tuple(steps))

    def check(self, samples, tol: float = 1e-12) -> None:
        """Sampling check of injectivity and a non-vanishing derivative along the chain."""
        z = np.asarray(samples, dtype=complex).ravel()
        for i, s in enumerate(self.steps):
            w = s(z)
            scale = np.maximum(1.0, np.maximum(np.abs(w)[:, None], np.abs(w)[None, :]))
            gap = np.abs(w[:, None] - w[None, :]) / scale + np.eye(w.size)
            if np.min(gap) < tol:
                raise ValueError(f"step {i} ({s}) is not injective on the sample")
            # derivatives of the steps legitimately decay near infinity, so only exact zeros count
            dz = np.abs(s.deriv(z))
            if not np.all(np.isfinite(dz)) or np.min(dz) == 0:
                raise ValueError(f"step {i} ({s}) has a vanishing derivative on the sample")
            z = w


CAYLEY = Mobius(1, -1j, 1, 1j)            # upper half-plane -> disk
RIGHT_HALF_TO_DISK = Mobius(1, -1, 1, 1)  # Re > 0 -> disk
PHI = Mobius(-1j, -1j, 1, -1)             # the map -i(w+1)/(w-1): disk -> upper half-plane


def strip_chain() -> ConformalChain:
    return ConformalChain((Exp(math.pi), CAYLEY))


def _tangent_chain(d: DiskMinusDisk) -> ConformalChain:
    u = d.c / abs(d.c)
    k = abs(d.c)
    height = k / (1 - k)  # PHI sends the inner circle to Im = height
    return ConformalChain((Affine(1 / u), PHI, Affine(1 / height))).then(*strip_chain().steps)


def _crescent_chain(d: DiskMinusDisk) -> ConformalChain:
    p1, p2 = d.crossings()
    m = Mobius(1, -p1, 1, -p2)
    pts, _ = boundary_samples(d, 0.01)
    pts = pts[:, 0]
    on_outer = pts[np.isclose(np.abs(pts), 1.0)]
    on_inner = pts[~np.isclose(np.abs(pts), 1.0)]

    def far_from_ends(arc):
        return arc[np.argmax(np.minimum(np.abs(arc - p1), np.abs(arc - p2)))]

    q_out, q_in = far_from_ends(on_outer), far_from_ends(on_inner)
    a1, a2 = cmath.phase(m(q_out)), cmath.phase(m(q_in))
    probe = 0.5 * (q_out + q_in)
    if not d.contains(np.array([probe])):
        raise NoClosedFormError("could not locate the crescent interior")
    ai = cmath.phase(m(probe))
    lo, hi = a1, a2
    span = (hi - lo) % (2 * math.pi)
    if (ai - lo) % (2 * math.pi) > span:
        lo, hi = a2, a1
        span = (hi - lo) % (2 * math.pi)
    mid = lo + span / 2
    rot = cmath.exp(-1j * mid)
    return ConformalChain((m, Affine(rot), Power(math.pi / span), RIGHT_HALF_TO_DISK))


def chain_to_disk(d: Domain) -> ConformalChain:
    """Registered conformal chain from a simply connected planar model domain onto the unit disk."""
    if isinstance(d, UnitDisk):
        return ConformalChain()
    if isinstance(d, Ball) and d.dim == 1:
        return ConformalChain((Affine(1 / d.radius, -d.center[0] / d.radius),))
    if isinstance(d, UpperHalfPlane):
        return ConformalChain((CAYLEY,))
    if isinstance(d, Strip):
        return strip_chain()
    if isinstance(d, DiskMinusDisk):
        if d.tangent:
            return _tangent_chain(d)
        if not d.hole_inside:
            return _crescent_chain(d)
    raise NoClosedFormError(f"no conformal chain onto the disk is registered for {d.variant}")


def registered_chain(d: Domain) -> Optional[ConformalChain]:
    try:
        return chain_to_disk(d)
    except NoClosedFormError:
        return None

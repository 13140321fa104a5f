"""Holomorphic polynomial vector fields on C^n."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np


def all_exponents(n: int, degree: int) -> tuple:
    out = []
    for k in range(degree + 1):
        out.extend(e for e in itertools.product(range(k, -1, -1), repeat=n) if sum(e) == k)
    return tuple(out)


def monomials(points, exponents) -> np.ndarray:
    """Matrix of monomials z^e, shape (m, len(exponents)), for points of shape (m, n)."""
    P = np.atleast_2d(np.asarray(points, dtype=complex))
    E = np.asarray(exponents)
    return np.prod(P[:, None, :] ** E[None, :, :], axis=2)


@dataclass(frozen=True)
class VectorFieldPoly:
    """X(z) = sum_e z^e * coeffs[e, :], one column of coefficients per coordinate."""

    exponents: tuple
    coeffs: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.coeffs, dtype=complex)
        if C.ndim == 1:
            C = C[:, None]
        if C.shape[0] != len(self.exponents):
            raise ValueError("one coefficient row per exponent is required")
        if not np.all(np.isfinite(C)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "exponents", tuple(tuple(int(k) for k in e) for e in self.exponents))
        object.__setattr__(self, "coeffs", C)

    @classmethod
    def planar(cls, coeffs) -> "VectorFieldPoly":
        """X(z) = coeffs[0] + coeffs[1] z + coeffs[2] z^2 + ..."""
        coeffs = list(coeffs)
        return cls(tuple((k,) for k in range(len(coeffs))), np.asarray(coeffs, dtype=complex)[:, None])

    @classmethod
    def from_terms(cls, n: int, terms: list) -> "VectorFieldPoly":
        """``terms[k]`` maps exponent tuples to the coefficients of the k-th component."""
        if len(terms) != n:
            raise ValueError("one term dictionary per coordinate")
        exps = sorted({tuple(e) for t in terms for e in t}, key=lambda e: (sum(e), tuple(-x for x in e)))
        C = np.zeros((len(exps), n), dtype=complex)
        for k, t in enumerate(terms):
            for e, c in t.items():
                C[exps.index(tuple(e)), k] += c
        return cls(tuple(exps), C)

    @classmethod
    def diagonal(cls, planar: "VectorFieldPoly", n: int = 2) -> "VectorFieldPoly":
        """The field (X(z_1), ..., X(z_n)) acting on each coordinate by the same planar field."""
        terms = []
        for k in range(n):
            t = {}
            for e, c in zip(planar.exponents, planar.coeffs[:, 0]):
                ek = [0] * n
                ek[k] = e[0]
                t[tuple(ek)] = c
            terms.append(t)
        return cls.from_terms(n, terms)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        nz = np.any(self.coeffs != 0, axis=1)
        return max((sum(e) for e, keep in zip(self.exponents, nz) if keep), default=0)

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.ndim <= 1:
            return (monomials(z.reshape(1, -1), self.exponents) @ self.coeffs)[0]
        return monomials(z, self.exponents) @ self.coeffs

    def scale(self, lam: complex) -> "VectorFieldPoly":
        return VectorFieldPoly(self.exponents, lam * self.coeffs)

    def __mul__(self, lam):
        return self.scale(lam)

    __rmul__ = __mul__

    def __add__(self, other: "VectorFieldPoly") -> "VectorFieldPoly":
        if other.dim != self.dim:
            raise ValueError("fields live in different dimensions")
        terms = [{} for _ in range(self.dim)]
        for f in (self, other):
            for e, row in zip(f.exponents, f.coeffs):
                for k in range(self.dim):
                    terms[k][e] = terms[k].get(e, 0) + row[k]
        return VectorFieldPoly.from_terms(self.dim, terms)

    def to_json(self) -> dict:
        return {"exponents": [list(e) for e in self.exponents],
                "coeffs": [[[c.real, c.imag] for c in row] for row in self.coeffs]}


def rotation_field() -> VectorFieldPoly:
    """iz: generator of the rotations of the disk."""
    return VectorFieldPoly.planar([0, 1j])


def hyperbolic_field() -> VectorFieldPoly:
    """1 - z^2: generator of the real translations z -> tanh(t + artanh z)."""
    return VectorFieldPoly.planar([1, 0, -1])


def disk_field(alpha: complex, beta: float = 0.0) -> VectorFieldPoly:
    """alpha + i beta z - conj(alpha) z^2: the general complete field of the disk."""
    alpha = complex(alpha)
    return VectorFieldPoly.planar([alpha, 1j * beta, -alpha.conjugate()])

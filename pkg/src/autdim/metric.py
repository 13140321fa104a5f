"""Poincare and Caratheodory distances and lengths.

Exact values come from conformal chains (planar simply connected models) or
from the ball formula; everything else gets bounds: a derivative-free search
over normalized polynomial maps into the disk from below, inscribed-ball
chains from above.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .conformal import chain_to_disk
from .domains import (Ball, Domain, as_point, boundary_samples, contains, dist_to_boundary,
                      inner_outer_radii)
from .errors import DegenerateInputError, NoClosedFormError, OutsideDomainError

SAFETY_FACTOR = 1.001
DEFAULT_DEGREE = 4
DEFAULT_BUDGET = 4000
DEFAULT_RESTARTS = 8


def poincare_distance(a: complex, b: complex) -> float:
    """Poincare distance in the unit disk, normalized so that rho(0, x) = artanh(x)."""
    a, b = complex(a), complex(b)
    if abs(a) >= 1 or abs(b) >= 1:
        raise OutsideDomainError("Poincare distance needs points of the open unit disk")
    m = abs((a - b) / (1 - a.conjugate() * b))
    return float(math.atanh(m))


def _ball_pseudo(a: np.ndarray, b: np.ndarray) -> float:
    """|phi_a(b)| for the unit ball, written without the 1 - (...) cancellation."""
    ab = np.vdot(a, b)  # <b, a> = sum b_k conj(a_k)
    num = np.linalg.norm(a - b) ** 2 - (np.linalg.norm(a) ** 2 * np.linalg.norm(b) ** 2 - abs(ab) ** 2)
    return math.sqrt(max(num, 0.0)) / abs(1 - ab)


def ball_caratheodory(ball: Ball, z, w) -> float:
    c = np.asarray(ball.center)
    a = (as_point(z, ball.dim) - c) / ball.radius
    b = (as_point(w, ball.dim) - c) / ball.radius
    if ball.dim == 1:
        return poincare_distance(a[0], b[0])
    return float(math.atanh(_ball_pseudo(a, b)))


def ball_caratheodory_length(ball: Ball, w, Y) -> float:
    c = np.asarray(ball.center)
    u = (as_point(w, ball.dim) - c) / ball.radius
    Y = as_point(Y, ball.dim) / ball.radius
    s = 1 - np.linalg.norm(u) ** 2
    return float(math.sqrt(np.linalg.norm(Y) ** 2 / s + abs(np.vdot(u, Y)) ** 2 / s ** 2))


def model_caratheodory(d: Domain, z, w) -> float:
    """Exact Caratheodory distance on domains with a closed form (balls, planar chains)."""
    pz, pw = as_point(z, d.dim), as_point(w, d.dim)
    for p in (pz, pw):
        if not d.contains(p):
            raise OutsideDomainError(f"{p} is not in {d.variant}")
    if isinstance(d, Ball):
        return ball_caratheodory(d, pz, pw)
    if d.dim != 1:
        raise NoClosedFormError(f"no closed form for {d.variant} in C^{d.dim}")
    chain = chain_to_disk(d)
    return poincare_distance(complex(chain(pz[0])), complex(chain(pw[0])))


def caratheodory_length_model(d: Domain, w, Y) -> float:
    pw = as_point(w, d.dim)
    if not d.contains(pw):
        raise OutsideDomainError(f"{pw} is not in {d.variant}")
    if isinstance(d, Ball):
        return ball_caratheodory_length(d, pw, Y)
    if d.dim != 1:
        raise NoClosedFormError(f"no closed form for {d.variant} in C^{d.dim}")
    Y = as_point(Y, 1)[0]
    chain = chain_to_disk(d)
    u = complex(chain(pw[0]))
    return float(abs(chain.deriv(pw[0])) * abs(Y) / (1 - abs(u) ** 2))


# -- polynomial candidates --------------------------------------------------------


def monomial_exponents(n: int, degree: int) -> tuple:
    """Exponent tuples of total degree 1..degree, graded then lexicographically descending."""
    out = []
    for k in range(1, degree + 1):
        out.extend(e for e in itertools.product(range(k, -1, -1), repeat=n) if sum(e) == k)
    return tuple(out)


def _monomials(points: np.ndarray, base: np.ndarray, exponents) -> np.ndarray:
    diff = np.atleast_2d(points) - base
    E = np.asarray(exponents)
    return np.prod(diff[:, None, :] ** E[None, :, :], axis=2)


@dataclass(frozen=True)
class ExtremalCandidate:
    """f = h / M with h(zeta) = sum_k coeffs[k] * (zeta - base_point)^exponents[k]."""

    exponents: tuple
    coeffs: np.ndarray
    normalizer: float
    base_point: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))
        object.__setattr__(self, "base_point", np.atleast_1d(np.asarray(self.base_point, dtype=complex)))
        if any(sum(e) == 0 and c != 0 for e, c in zip(self.exponents, self.coeffs)):
            raise ValueError("h must vanish at the base point")
        if not self.normalizer > 0:
            raise ValueError("normalizer must be positive")

    @property
    def degree(self) -> int:
        return max((sum(e) for e, c in zip(self.exponents, self.coeffs) if c != 0), default=0)

    def h(self, points) -> np.ndarray:
        return _monomials(np.asarray(points, dtype=complex).reshape(-1, self.base_point.size),
                          self.base_point, self.exponents) @ self.coeffs

    def __call__(self, points) -> np.ndarray:
        return self.h(points) / self.normalizer

    def to_csv_rows(self) -> list:
        n = self.base_point.size
        header = [f"e{k + 1}" for k in range(n)] + ["re", "im"]
        rows = [list(e) + [c.real, c.imag] for e, c in zip(self.exponents, self.coeffs)]
        return [header] + rows


def extremal_gradient(c: ExtremalCandidate, w) -> np.ndarray:
    """Exact gradient of f = h/M at w; pair with Y via sum(grad * Y) (no conjugation)."""
    n = c.base_point.size
    diff = as_point(w, n) - c.base_point
    grad = np.zeros(n, dtype=complex)
    for e, coef in zip(c.exponents, c.coeffs):
        if coef == 0:
            continue
        for k in range(n):
            if e[k] == 0:
                continue
            lowered = list(e)
            lowered[k] -= 1
            grad[k] += coef * e[k] * np.prod(diff ** np.asarray(lowered))
    return grad / c.normalizer


@dataclass(frozen=True)
class MetricBounds:
    lower: float
    upper: float
    witness: Optional[ExtremalCandidate] = None
    warning: bool = False

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper,
                "witnessDegree": self.witness.degree if self.witness is not None else None}


# -- search ---------------------------------------------------------------------


def _search_density(d: Domain) -> float:
    return 0.1 if d.dim > 1 else min(d.default_density(), 1e-2)


def _fine_density(d: Domain, density: float) -> float:
    return density / (2 if d.dim > 1 else 4)


def _optimize_ratio(target: np.ndarray, V: np.ndarray, x0_list, budget: int):
    """Maximize |target . c| / max|V c| over complex c with Nelder-Mead restarts."""
    k = target.size

    def negratio(x):
        c = x[:k] + 1j * x[k:]
        M = np.max(np.abs(V @ c))
        if not M > 0 or not np.isfinite(M):
            return np.inf
        return -abs(target @ c) / M

    per = max(50, budget // len(x0_list))
    best = None
    for x0 in x0_list:
        res = minimize(negratio, x0, method="Nelder-Mead",
                       options={"maxfev": per, "xatol": 1e-12, "fatol": 1e-14, "adaptive": True})
        if best is None or res.fun < best.fun:
            best = res
    c = best.x[:k] + 1j * best.x[k:]
    return c, -best.fun


def _starts(lin: np.ndarray, k: int, restarts: int, seed: int):
    rng = np.random.default_rng(seed)
    first = np.zeros(k, dtype=complex)
    first[: lin.size] = lin
    starts = [np.concatenate([first.real, first.imag])]
    for _ in range(restarts - 1):
        x = rng.standard_normal(2 * k)
        x[: lin.size] += starts[0][: lin.size]
        x[k: k + lin.size] += starts[0][k: k + lin.size]
        starts.append(x)
    return starts


def _normalized(d, coeffs, exponents, base, value_fn, density):
    """Certify the normalizer on a finer boundary sample and rotate the value to be real positive."""
    fine, _ = boundary_samples(d, _fine_density(d, density))
    coarse, _ = boundary_samples(d, density)
    sup = max(np.max(np.abs(_monomials(fine, base, exponents) @ coeffs)),
              np.max(np.abs(_monomials(coarse, base, exponents) @ coeffs)))
    val = value_fn(coeffs)
    if abs(val) > 0:
        coeffs = coeffs * (abs(val) / val)
    return ExtremalCandidate(exponents, coeffs, float(sup * SAFETY_FACTOR), base)


def inscribed_chain_upper(d: Domain, w, z) -> float:
    """Upper bound sum artanh(|p_{k+1} - p_k| / r_k) along the segment w -> z through inscribed balls."""
    pw, pz = as_point(w, d.dim), as_point(z, d.dim)
    total, p = 0.0, pw
    while True:
        if not d.contains(p):
            return math.inf
        r = d.dist(p)
        gap = np.linalg.norm(pz - p)
        if gap < 0.5 * r:
            return total + math.atanh(gap / r)
        q = p + (pz - p) * (0.5 * r / gap)
        total += math.atanh(0.5)
        p = q


def _upper(d: Domain, w, z) -> float:
    try:
        return model_caratheodory(d, w, z)
    except NoClosedFormError:
        return inscribed_chain_upper(d, w, z)


def extremal_search(d: Domain, w, z, degree: int = DEFAULT_DEGREE, budget: int = DEFAULT_BUDGET,
                    seed: int = 0, restarts: int = DEFAULT_RESTARTS,
                    density: Optional[float] = None) -> MetricBounds:
    """Lower bound for c_D(w, z) from the best polynomial map into the disk vanishing at w."""
    pw, pz = as_point(w, d.dim), as_point(z, d.dim)
    if np.array_equal(pw, pz):
        raise DegenerateInputError("extremal search needs distinct points")
    if degree < 1:
        raise ValueError("degree must be at least 1")
    for p in (pw, pz):
        if not contains(d, p):
            raise OutsideDomainError(f"{p} is not in {d.variant}")
    density = density or _search_density(d)
    exps = monomial_exponents(d.dim, degree)
    pts, _ = boundary_samples(d, density)
    V = _monomials(pts, pw, exps)
    target = _monomials(pz, pw, exps)[0]
    c, ratio = _optimize_ratio(target, V, _starts(np.conj(pz - pw), len(exps), restarts, seed), budget)
    upper = _upper(d, pw, pz)
    if not ratio > 0:
        warnings.warn("extremal search found no feasible candidate", RuntimeWarning)
        return MetricBounds(0.0, upper, None, warning=True)
    cand = _normalized(d, c, exps, pw, lambda cc: target @ cc, density)
    lower = math.atanh(min(abs(target @ cand.coeffs) / cand.normalizer, 1 - 1e-16))
    return _bounds(lower, upper, cand)


def extremal_length_search(d: Domain, w, Y, degree: int = DEFAULT_DEGREE, budget: int = DEFAULT_BUDGET,
                           seed: int = 0, restarts: int = DEFAULT_RESTARTS,
                           density: Optional[float] = None) -> MetricBounds:
    """Lower bound for C_D(w, Y) = max Re (grad f(w), Y) over normalized polynomial maps."""
    pw = as_point(w, d.dim)
    Yv = as_point(Y, d.dim)
    if not np.any(Yv):
        raise DegenerateInputError("Y must be non-zero")
    if not contains(d, pw):
        raise OutsideDomainError(f"{pw} is not in {d.variant}")
    density = density or _search_density(d)
    exps = monomial_exponents(d.dim, degree)
    pts, _ = boundary_samples(d, density)
    V = _monomials(pts, pw, exps)
    target = np.array([Yv[e.index(1)] if sum(e) == 1 else 0 for e in exps], dtype=complex)
    c, ratio = _optimize_ratio(target, V, _starts(np.conj(Yv), len(exps), restarts, seed), budget)
    try:
        upper = caratheodory_length_model(d, pw, Yv)
    except NoClosedFormError:
        upper = float(np.linalg.norm(Yv)) / dist_to_boundary(d, pw)
    if not ratio > 0:
        warnings.warn("extremal search found no feasible candidate", RuntimeWarning)
        return MetricBounds(0.0, upper, None, warning=True)
    cand = _normalized(d, c, exps, pw, lambda cc: target @ cc, density)
    lower = float(abs(target @ cand.coeffs) / cand.normalizer)
    return _bounds(lower, upper, cand)


def _bounds(lower, upper, cand) -> MetricBounds:
    if lower > upper:
        if lower - upper > 1e-9:
            raise RuntimeError(f"search value {lower} exceeds the certified upper bound {upper}; "
                               "the boundary sample is too coarse")
        lower = upper
    return MetricBounds(lower, upper, cand)


def sandwich_bounds(d: Domain, w, Y) -> MetricBounds:
    """|Y|/R <= C_D(w, Y) <= |Y|/r for B(w, r) in D in B(w, R)."""
    Yv = as_point(Y, d.dim)
    norm = float(np.linalg.norm(Yv))
    if norm == 0:
        raise DegenerateInputError("Y must be non-zero")
    radii = inner_outer_radii(d, w)
    return MetricBounds(norm / radii.R, norm / radii.r)

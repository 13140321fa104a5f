"""Numerical verifiers for the quantitative estimates behind semicontinuity.

Each ``check_*`` returns a signed margin: positive means the inequality holds
with that much slack.  ``run_battery`` evaluates them over the standard test
domains and folds the margins into ``LemmaReport`` records.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial import cKDTree

from . import gallery
from .conformal import ConformalChain, Mobius, chain_to_disk
from .domains import (Ball, Domain, Ellipse, UnitDisk, as_point, dist_to_boundary,
                      inner_outer_radii)
from .errors import DisconnectedError, InfeasibleError, PreconditionError, RankError
from .fields import VectorFieldPoly, disk_field, hyperbolic_field, rotation_field
from .flow import GroupAction, flow, group_property_residual
from .metric import (ExtremalCandidate, ball_caratheodory_length, caratheodory_length_model,
                     extremal_gradient, extremal_length_search, extremal_search, model_caratheodory,
                     sandwich_bounds)

MARGIN_FLOOR = -1e-9
LEMMA_IDS = ("Id", "De", "One", "Ne", "MDeriv", "Gram")


@dataclass
class LemmaReport:
    lemma_id: str
    samples: int
    worst_margin: float
    witness: dict = field(default_factory=dict)
    certified: bool = True

    @property
    def status(self) -> str:
        if self.worst_margin >= MARGIN_FLOOR:
            return "Passed"
        return "Failed" if self.certified else "Inconclusive"

    def to_json(self) -> dict:
        return {"lemmaId": self.lemma_id, "samples": self.samples, "worstMargin": self.worst_margin,
                "status": self.status, "witness": self.witness}


def fold(lemma_id: str, margins: Sequence[float], witnesses: Sequence[dict],
         certified: bool = True) -> LemmaReport:
    k = int(np.argmin(margins))
    return LemmaReport(lemma_id, len(margins), float(margins[k]), witnesses[k], certified)


# -- Lemma: invariant metrics and group actions ---------------------------------------


def check_invariant_triangle(d: Domain, a: GroupAction, w, z, t: float) -> float:
    """d(z, g(z,t)) - |d(g(w,t), z) - d(w,z)| with the closed-form Caratheodory distance."""
    gw, gz = a(w, t, d), a(z, t, d)
    lhs = abs(model_caratheodory(d, gw, z) - model_caratheodory(d, w, z))
    rhs = model_caratheodory(d, z, gz)
    return float(rhs - lhs)


# -- Lemma: gradient of extremal functions -----------------------------------------------


def extremal_step(r: float, R: float) -> float:
    """The admissible step r^2 / (16 R)."""
    return r * r / (16 * R)


def check_extremal_gradient_bound(d: Domain, w, Y, s: float, degree: int = 3, seed: int = 0,
                                  budget: int = 4000) -> float:
    """Re(grad f_s(w), Y) - 1/(4R) with f_s the searched extremal map for (w, w + sY)."""
    pw = as_point(w, d.dim)
    Yv = as_point(Y, d.dim)
    if abs(np.linalg.norm(Yv) - 1) > 1e-12:
        raise PreconditionError("Y must be a unit vector")
    radii = inner_outer_radii(d, pw)
    eps = extremal_step(radii.r, radii.R)
    # R carries the (1 + mesh_tol) inflation, so s = r^2/(16R) at the exact radii must still pass
    if not 0 < s <= eps * (1 + 2 * d.mesh_tol + 1e-12):
        raise PreconditionError(f"s = {s} is outside (0, {eps}]")
    bounds = extremal_search(d, pw, pw + s * Yv, degree=degree, budget=budget, seed=seed)
    if bounds.witness is None:
        return -1.0 / (4 * radii.R)
    grad = extremal_gradient(bounds.witness, pw)
    return float(np.real(np.sum(grad * Yv)) - 1.0 / (4 * radii.R))


# -- Lemma: propagation of sup norms ---------------------------------------------------------


def delta_for(a: float, r: float, R: float, n_angles: int = 1025, iterations: int = 60) -> float:
    """Largest delta < a/2 (bisection) satisfying the direction condition at radius r + delta.

    For w on the sphere |w| = r + delta and a unit direction V there must be a
    unit Y with |V - Y| < a/(32R) and w + sY in B(0, r) for some |s| < a^2/(128R).
    The condition is invariant under unitary maps, so it depends only on the
    angle between V and -w; that angle is sampled on ``n_angles`` points of [0, pi].
    """
    if not (a > 0 and r > 0 and R > 0):
        raise PreconditionError("a, r, R must be positive")
    if not R > 2 * r:
        raise PreconditionError("need R > 2r")
    if not r + a < R:
        raise PreconditionError("need B(0, r + a) inside B(0, R)")
    eps = a * a / (128 * R) * (1 - 1e-12)
    b = a / (32 * R)
    cone = 2 * math.asin(min(1.0, b / 2)) * (1 - 1e-12)
    alphas = np.linspace(0.0, math.pi, n_angles)
    beta = np.minimum(np.maximum(alphas - cone, 0.0), np.maximum(math.pi - alphas - cone, 0.0))

    def feasible(delta):
        rho = r + delta
        s = np.clip(rho * np.cos(beta), 0.0, eps)
        return bool(np.all(rho * rho - 2 * s * rho * np.cos(beta) + s * s < r * r))

    lo, hi = 0.0, 0.5 * a
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    if lo == 0.0:
        raise InfeasibleError("no admissible delta at this resolution",
                              {"a": a, "r": r, "R": R, "eps": eps, "b": b})
    return lo


def ball_sup(X, center, radius: float, h: Optional[float] = None) -> float:
    """sup |X| over a closed ball, from its boundary sphere and a few interior shells."""
    c = np.atleast_1d(np.asarray(center, dtype=complex))
    n = c.size
    h = h or radius / (64 if n == 1 else 16)
    pts = [c[None, :]]
    for frac in (0.25, 0.5, 0.75, 1.0):
        sphere, _ = Ball(tuple(c), frac * radius).samples(h)
        pts.append(sphere)
    P = np.concatenate(pts)
    vals = X(P) if isinstance(X, VectorFieldPoly) else np.array([X(p) for p in P])
    return float(np.max(np.linalg.norm(np.atleast_2d(vals), axis=1)))


def _verify_action(d: Domain, a: GroupAction, center, r: float, tol: float = 1e-6) -> None:
    c = as_point(center, d.dim)
    for k, t in enumerate((-0.5, 0.3, 0.8)):
        p = c + 0.5 * r * np.exp(2j * math.pi * k / 3) * np.eye(d.dim)[0]
        res = group_property_residual(a, p, t, 0.4, d)
        if res > tol:
            raise PreconditionError(f"action fails the group law at {p} (residual {res:.3g})")


def check_norm_propagation(d: Domain, X, r: float, a: float, R: float, action: GroupAction,
                           center=None) -> float:
    """(32R/a) sup_{B(c,r)} |X| - sup_{B(c, r + delta)} |X| with delta = delta_for(a, r, R)."""
    c = np.zeros(d.dim, dtype=complex) if center is None else as_point(center, d.dim)
    if not dist_to_boundary(d, c) > r + a:
        raise PreconditionError("B(c, r + a) is not compactly inside the domain")
    if not inner_outer_radii(d, c).R <= R * (1 + 1e-8):
        raise PreconditionError("the domain is not inside B(c, R)")
    _verify_action(d, action, c, r)
    delta = delta_for(a, r, R)
    return float(32 * R / a * ball_sup(X, c, r) - ball_sup(X, c, r + delta))


# -- Lemma: compact sets -------------------------------------------------------------------


@dataclass(frozen=True)
class ChainCover:
    points: np.ndarray
    delta: float
    N: int
    paths: dict = field(default_factory=dict, compare=False)


def _cloud(K) -> np.ndarray:
    P = np.asarray(K, dtype=complex)
    return P[:, None] if P.ndim == 1 else P


def _real(P):
    return np.concatenate([P.real, P.imag], axis=1)


def chain_cover(Ksamples, delta: float) -> ChainCover:
    """Breadth-first chains from the origin with consecutive gaps < delta; N is the longest chain."""
    P = _cloud(Ksamples)
    origin = np.flatnonzero(np.all(P == 0, axis=1))
    if origin.size == 0:
        raise PreconditionError("the sample cloud must contain the origin")
    tree = cKDTree(_real(P))
    start = int(origin[0])
    parent = {start: None}
    queue = deque([start])
    while queue:
        k = queue.popleft()
        for nb in tree.query_ball_point(_real(P[k:k + 1])[0], delta * (1 - 1e-12)):
            if nb not in parent:
                parent[nb] = k
                queue.append(nb)
    if len(parent) < len(P):
        raise DisconnectedError(f"{len(P) - len(parent)} samples are unreachable at scale {delta}")
    depth = {}
    for k in parent:
        n, q = 1, k
        while parent[q] is not None:
            q = parent[q]
            n += 1
        depth[k] = n
    return ChainCover(P, delta, max(depth.values()), parent)


def connectivity_scale(Ksamples) -> float:
    """Smallest scale at which the cloud is connected (longest minimum-spanning-tree edge)."""
    P = _real(_cloud(Ksamples))
    if len(P) < 2:
        return 0.0
    D = np.linalg.norm(P[:, None] - P[None, :], axis=2)
    return float(minimum_spanning_tree(D).toarray().max())


def chain_count(Ksamples, delta: float) -> int:
    """N for spacing delta, walking the segments between neighbouring samples when delta is finer than the cloud."""
    eta = connectivity_scale(Ksamples)
    if delta > eta:
        return chain_cover(Ksamples, delta).N
    cover = chain_cover(Ksamples, eta * (1 + 1e-9))
    P = cover.points
    worst = 1
    for k in cover.paths:
        n, q = 1, k
        while cover.paths[q] is not None:
            prev = cover.paths[q]
            n += math.ceil(np.linalg.norm(P[q] - P[prev]) / delta * (1 + 1e-12))
            q = prev
        worst = max(worst, n)
    return worst


def check_compact_bound(d: Domain, X, Ksamples, s: float, r: float, center=None) -> float:
    """c^(N-1) sup_{B(c,r)} |X| - sup_K |X| with c = 64R/s and N from a delta(s, s, 2R)-chain."""
    K = _cloud(Ksamples)
    c0 = np.zeros(d.dim, dtype=complex) if center is None else as_point(center, d.dim)
    for p in K:
        if not d.contains(p) or d.dist(p) < 3 * s:
            raise PreconditionError(f"the 3s-neighbourhood of K leaves the domain near {p}")
    if not dist_to_boundary(d, c0) >= 2 * r:
        raise PreconditionError("B(c, 2r) is not inside the domain")
    R = inner_outer_radii(d, c0).R
    if not R > 2 * r > 2 * s:
        raise PreconditionError("need R > 2r > 2s")
    c = 32 * (2 * R) / s
    N = chain_count(K - c0, delta_for(s, s, 2 * R))
    sup_ball = ball_sup(X, c0, r)
    sup_K = float(np.max(np.linalg.norm(np.atleast_2d(X(K)), axis=1)))
    if sup_ball == 0:
        return -sup_K
    log_bound = (N - 1) * math.log(c) + math.log(sup_ball)
    if log_bound > 700:
        return math.inf
    return float(math.exp(log_bound) - sup_K)


# -- derivative of the pseudo-distance along the flow ----------------------------------------------


def disk_extremal_map(d: Domain, w: complex, z: complex) -> ConformalChain:
    """Chain into the disk sending w to 0 and z to a positive real number."""
    base = chain_to_disk(d)
    u, v = complex(base(w)), complex(base(z))
    m = Mobius(1, -u, -u.conjugate(), 1)
    img = m(v)
    rot = abs(img) / img
    return base.then(Mobius(rot, -rot * u, -u.conjugate(), 1))


def check_m_derivative(f, X, w, z, d: Domain, h: float = 1e-5, tol: float = 1e-14) -> float:
    """|d/dt m^2(0) - (-2p(1-p^2) Re(grad f(w), X(w)))| with m the pseudo-distance to p = f(z)."""
    pw, pz = as_point(w), as_point(z)
    if isinstance(f, ExtremalCandidate):
        fv = lambda q: complex(f(q)[0])
        grad = extremal_gradient(f, pw)
    else:
        fv = lambda q: complex(f(complex(q[0])))
        grad = np.array([complex(f.deriv(complex(pw[0])))])
    if abs(fv(pw)) > 1e-12:
        raise PreconditionError("f must vanish at w")
    p = fv(pz)
    if abs(p.imag) > 1e-12 or not 0 < p.real < 1:
        raise PreconditionError(f"f(z) = {p} is not real in (0, 1)")
    p = p.real

    def m2(t):
        zeta = fv(flow(X, pw, t, tol, d))
        return abs((zeta - p) / (1 - p * zeta)) ** 2

    fd = (m2(h) - m2(-h)) / (2 * h)
    predicted = -2 * p * (1 - p * p) * float(np.real(np.sum(grad * X(pw))))
    return float(abs(fd - predicted))


# -- L2 normalization on a ball --------------------------------------------------------------


def ball_quadrature(center, radius: float, order: int = 32):
    """Nodes (m, n) and weights for integrals over a ball in C^1 or C^2.

    Gauss-Legendre in the radius (and in u = sin^2 eta for C^2), the periodic
    trapezoid rule in every angle; exact for polynomials in z, conj(z) of
    total degree below ``order``.
    """
    c = np.atleast_1d(np.asarray(center, dtype=complex))
    x, wx = np.polynomial.legendre.leggauss(order)
    rho = 0.5 * radius * (x + 1)
    wr = 0.5 * radius * wx
    ang = 2 * np.pi * np.arange(order) / order
    wa = np.full(order, 2 * np.pi / order)
    if c.size == 1:
        Rr, A = np.meshgrid(rho, ang, indexing="ij")
        W = np.outer(wr * rho, wa)
        nodes = (Rr * np.exp(1j * A)).ravel()[:, None] + c
        return nodes, W.ravel()
    if c.size == 2:
        u = 0.5 * (x + 1)
        wu = 0.5 * wx
        Rr, U, A, B = np.meshgrid(rho, u, ang, ang, indexing="ij")
        W = np.einsum("i,j,k,l->ijkl", wr * rho ** 3, 0.5 * wu, wa, wa)
        z1 = Rr * np.sqrt(1 - U) * np.exp(1j * A)
        z2 = Rr * np.sqrt(U) * np.exp(1j * B)
        return np.stack([z1.ravel(), z2.ravel()], axis=1) + c, W.ravel()
    raise ValueError("quadrature is implemented for n <= 2")


def ball_volume(n: int, radius: float) -> float:
    return math.pi ** n * radius ** (2 * n) / math.factorial(n)


@dataclass(frozen=True)
class GramBasis:
    fields: tuple
    ball: tuple
    order: int
    gram: np.ndarray

    def defect(self) -> float:
        return float(np.max(np.abs(self.gram - np.eye(len(self.fields)))))


def l2_gram(fields, nodes, weights) -> np.ndarray:
    vals = np.stack([np.atleast_2d(X(nodes)) for X in fields])  # (k, m, n)
    return np.einsum("amn,bmn,m->ab", vals, vals.conj(), weights)


def gram_normalize(fields: Sequence[VectorFieldPoly], ball, order: int = 32) -> GramBasis:
    """Gram-Schmidt in L^2(ball) so that int (X^m, conj X^l) dV = Kronecker delta."""
    center, radius = ball
    nodes, weights = ball_quadrature(center, radius, order)
    G = l2_gram(fields, nodes, weights)
    out = []
    for k, X in enumerate(fields):
        Y = X
        for _ in range(2):
            for Z in out:
                ip = l2_gram([Y, Z], nodes, weights)[0, 1]
                Y = Y + Z.scale(-ip)
        norm2 = float(np.real(l2_gram([Y], nodes, weights)[0, 0]))
        if norm2 <= 1e-20 * max(1.0, float(np.real(G[k, k]))) or norm2 <= 1e-24:
            raise RankError(f"field {k + 1} depends on the previous ones", k + 1)
        out.append(Y.scale(1 / math.sqrt(norm2)))
    ev = np.linalg.eigvalsh(G)
    if ev[0] <= 0 or ev[-1] / ev[0] > 1e12:
        raise RankError("Gram matrix is numerically singular", len(fields))
    return GramBasis(tuple(out), (np.atleast_1d(np.asarray(center, dtype=complex)), radius), order,
                     l2_gram(out, nodes, weights))


# -- the standard battery --------------------------------------------------------------------


def _random_points(d: Domain, rng, count: int, margin: float = 0.02, box: float = 1.0) -> list:
    pts = []
    while len(pts) < count:
        z = complex(rng.uniform(-box, box), rng.uniform(-box, box))
        if d.contains(np.array([z])) and d.dist(np.array([z])) > margin:
            pts.append(z)
    return pts


def disk_actions() -> list:
    D = UnitDisk()
    rot = GroupAction.closed_form(lambda Z, t: Z * np.exp(1j * t), rotation_field(), D, "rotation")
    hyp = GroupAction.closed_form(lambda Z, t: np.tanh(t + np.arctanh(Z)), hyperbolic_field(), D, "1-z^2")
    gen = GroupAction.from_field(disk_field(0.3 + 0.2j), D, tol=1e-12, name="a-conj(a)z^2")
    return [rot, hyp, gen]


def battery_invariant_triangle(rng, per_case: int = 15) -> LemmaReport:
    cases = [(UnitDisk(), a) for a in disk_actions()]
    cases.append((gallery.q_part(gallery.LIMIT), gallery.translation_action(product=False)))
    margins, wit = [], []
    for d, a in cases:
        for w, z in zip(_random_points(d, rng, per_case), _random_points(d, rng, per_case)):
            t = float(rng.uniform(-2, 2))
            margins.append(check_invariant_triangle(d, a, w, z, t))
            wit.append({"domain": d.variant, "action": a.name, "w": w, "z": z, "t": t})
    return fold("Id", margins, wit)


def battery_extremal_gradient(rng, seed: int) -> LemmaReport:
    cases = [(UnitDisk(), 0j), (UnitDisk(), 0.3 + 0j), (Ball((0j, 0j), 1.0), np.zeros(2)),
             (Ellipse(2.0, 1.0), 0j), (gallery.q_part(gallery.LIMIT), -0.5 + 0j)]
    margins, wit = [], []
    for d, w in cases:
        Y = rng.standard_normal(d.dim) + 1j * rng.standard_normal(d.dim)
        Y = Y / np.linalg.norm(Y)
        radii = inner_outer_radii(d, w)
        s = extremal_step(radii.r, radii.R)
        margins.append(check_extremal_gradient_bound(d, w, Y, s, degree=2 if d.dim > 1 else 3, seed=seed))
        wit.append({"domain": d.variant, "w": np.atleast_1d(w).tolist(), "Y": Y.tolist(), "s": s})
    return fold("De", margins, wit, certified=False)


def battery_norm_propagation() -> LemmaReport:
    margins, wit = [], []
    D = UnitDisk()
    for a in disk_actions():
        margins.append(check_norm_propagation(D, a.field, 0.25, 0.25, 1.0, a))
        wit.append({"domain": "UnitDisk", "field": a.name, "r": 0.25, "a": 0.25, "R": 1.0})
    q3 = gallery.q_part(3)
    act = gallery.circle_action(3, product=False)
    margins.append(check_norm_propagation(q3, act.field, 0.15, 0.15, 2.0, act, center=-0.5))
    wit.append({"domain": "Q_3", "field": act.name, "r": 0.15, "a": 0.15, "R": 2.0, "center": -0.5})
    return fold("One", margins, wit)


def battery_compact_bound() -> LemmaReport:
    margins, wit = [], []
    seg = np.arange(0, 0.5 + 1e-12, 0.05) + 0j
    for a in disk_actions():
        margins.append(check_compact_bound(UnitDisk(), a.field, seg, 0.1, 0.25))
        wit.append({"domain": "UnitDisk", "field": a.name, "K": "[0, 0.5]", "s": 0.1, "r": 0.25})
    K = -0.5 + 1j * np.arange(0, 0.2 + 1e-12, 0.02)
    margins.append(check_compact_bound(gallery.q_part(3), gallery.circle_field(3), K, 0.05, 0.1, center=-0.5))
    wit.append({"domain": "Q_3", "field": "circle", "K": "-1/2 + i[0, 0.2]", "s": 0.05, "r": 0.1})
    return fold("Ne", margins, wit)


M_DERIV_TOL = 1e-6


def battery_m_derivative(rng, per_case: int = 5) -> LemmaReport:
    margins, wit = [], []
    D = UnitDisk()
    Q = gallery.q_part(gallery.LIMIT)
    cases = [(D, a.field, a.name) for a in disk_actions()] + [(Q, gallery.limit_field(), "translation")]
    for d, X, name in cases:
        for w, z in zip(_random_points(d, rng, per_case, 0.1), _random_points(d, rng, per_case, 0.1)):
            f = disk_extremal_map(d, w, z)
            res = check_m_derivative(f, X, w, z, d)
            margins.append(M_DERIV_TOL - res)
            wit.append({"domain": d.variant, "field": name, "w": w, "z": z, "residual": res})
    return fold("MDeriv", margins, wit)


def battery_gram() -> LemmaReport:
    margins, wit = [], []
    fields = [a.field for a in disk_actions()]
    for radius in (1.0, 0.5):
        basis = gram_normalize(fields, (0j, radius))
        vol = ball_volume(1, radius)
        sup_gap = min(ball_sup(X, 0j, radius) for X in basis.fields) - vol ** -0.5
        margins.append(min(M_DERIV_TOL - basis.defect(), sup_gap))
        wit.append({"ball": [0, radius], "gramDefect": basis.defect(), "supMinusVolPow": sup_gap})
    return fold("Gram", margins, wit)


def _ball_points(rng, count: int, radius: float = 0.9) -> list:
    pts = []
    while len(pts) < count:
        v = rng.standard_normal(4)
        v *= radius * rng.random() ** 0.25 / np.linalg.norm(v)
        pts.append(np.array([v[0] + 1j * v[1], v[2] + 1j * v[3]]))
    return pts


def battery_sandwich(rng, samples: int = 50, seed: int = 0) -> LemmaReport:
    """|Y|/R <= C_D(w, Y) <= |Y|/r at random (w, Y) spread over disk, ball, ellipse and Q.

    Closed-form lengths are used where available; on the ellipse the searched
    lower bound stands in for C_D, so a negative lower margin there is only
    Inconclusive.
    """
    D, ball, E, Q = UnitDisk(), Ball((0j, 0j), 1.0), Ellipse(2.0, 1.0), gallery.q_part(gallery.LIMIT)
    per = samples // 4
    cases = ([(D, w) for w in _random_points(D, rng, per)]
             + [(ball, w) for w in _ball_points(rng, per)]
             + [(E, w) for w in _random_points(E, rng, samples - 3 * per, box=2.0)]
             + [(Q, w) for w in _random_points(Q, rng, per)])
    margins, wit, certified = [], [], []
    for d, w in cases:
        Y = rng.standard_normal(d.dim) + 1j * rng.standard_normal(d.dim)
        Y *= rng.uniform(0.5, 2.0) / np.linalg.norm(Y)
        sw = sandwich_bounds(d, w, Y)
        if isinstance(d, Ball):
            C, exact = ball_caratheodory_length(d, w, Y), True
        elif isinstance(d, Ellipse):
            C, exact = extremal_length_search(d, w, Y, degree=3, seed=seed).lower, False
        else:
            C, exact = caratheodory_length_model(d, w, Y), True
        margins.append(min(C - sw.lower, sw.upper - C))
        certified.append(exact)
        wit.append({"domain": d.variant, "w": np.atleast_1d(w).tolist(), "Y": Y.tolist(), "C": C,
                    "lower": sw.lower, "upper": sw.upper})
    k = int(np.argmin(margins))
    return LemmaReport("Sandwich", len(margins), float(margins[k]), wit[k], certified[k])


def run_battery(seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    return [
        battery_invariant_triangle(rng),
        battery_extremal_gradient(rng, seed),
        battery_norm_propagation(),
        battery_compact_bound(),
        battery_m_derivative(rng),
        battery_gram(),
    ]

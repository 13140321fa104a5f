import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from autdim import gallery
from autdim.domains import hausdorff_distance
from autdim.errors import DiagonalError, PoleError, TangencyError
from autdim.flow import GroupAction, group_property_residual, infinitesimal_residual
from autdim.metric import model_caratheodory

Q = gallery.q_part(gallery.LIMIT)


def _random_product_points(d, n, rng):
    pts = []
    while len(pts) < n:
        p = rng.uniform(-1, 1, 4)
        z = np.array([p[0] + 1j * p[1], p[2] + 1j * p[3]])
        if d.contains(z):
            pts.append(z)
    return np.array(pts)


def test_phi_examples():
    assert gallery.phi(0) == pytest.approx(1j)
    assert gallery.phi(-1) == pytest.approx(0)
    v = gallery.phi(-0.5)
    assert v == pytest.approx(1j / 3) and 0 < v.imag < 1
    with pytest.raises(PoleError):
        gallery.phi(1)


@given(st.floats(-0.99, 0.99), st.floats(-0.99, 0.99))
def test_phi_inverse(x, y):
    w = complex(x, y)
    if abs(w) < 0.99:
        assert gallery.phi_inv(gallery.phi(w)) == pytest.approx(w, abs=1e-9)


def test_g_t_examples():
    assert gallery.g_t(0.3 + 0.2j, 0.0) == pytest.approx(0.3 + 0.2j)
    for t in (-3.0, 0.5, 7.0):
        assert gallery.g_t(1, t) == pytest.approx(1)


def test_g_t_group_law_grid():
    ws = [-0.5, -0.5 + 0.2j, -0.1 - 0.3j]
    ts = [-2.0, -0.5, 0.3, 1.7]
    for w in ws:
        for t in ts:
            for s in ts:
                assert abs(gallery.g_t(gallery.g_t(w, t), s) - gallery.g_t(w, s + t)) <= 1e-12


def test_g_t_is_phi_conjugate():
    w = -0.4 + 0.1j
    assert gallery.g_t(w, 0.8) == pytest.approx(gallery.phi_inv(gallery.phi(w) + 0.8))


def test_limit_field_is_derivative():
    w, h = -0.5 + 0.1j, 1e-6
    fd = (gallery.g_t(w, h) - gallery.g_t(w, -h)) / (2 * h)
    assert gallery.limit_field()(np.array([w]))[0] == pytest.approx(fd, abs=1e-8)


def test_F_t_examples():
    p = np.array([-0.5, 0.0], dtype=complex)
    assert np.allclose(gallery.F_t(p, 0.0), p)
    img = gallery.F_t(p, 1.0)
    assert Q.contains(img[:1]) and abs(img[1]) < 1 and img[0] != img[1]
    z, z2 = -0.5 + 0.1j, -0.3 - 0.2j
    d0 = model_caratheodory(Q, z, z2)
    for t in (0.5, 2.0):
        assert model_caratheodory(Q, gallery.g_t(z, t), gallery.g_t(z2, t)) == pytest.approx(d0, abs=1e-9)


def test_F_t_diagonal_rejected():
    with pytest.raises(DiagonalError):
        gallery.F_t(np.array([-0.5, -0.5]), 0.3)


def test_family_membership():
    fam = gallery.example1(4)
    assert fam.product.contains(np.array([-0.5, 0.2]))
    assert not fam.product.contains(np.array([-0.5, -0.5]))
    assert not fam.product.contains(np.array([0.45, 0.2]))
    assert gallery.example1(None).is_limit


def test_concentric_model():
    for j in (3, 6, 10):
        q = gallery.q_part(j)
        mu = gallery.concentric_map(j)
        outer = mu(np.exp(1j * np.linspace(0, 6, 7)))
        inner = mu(q.c + q.rho * np.exp(1j * np.linspace(0, 6, 7)))
        assert np.allclose(np.abs(outer), 1)
        assert np.allclose(np.abs(inner), gallery.inner_modulus(j))
    with pytest.raises(TangencyError):
        gallery.concentric_map(gallery.LIMIT)


def test_annulus_rotation_examples():
    P = np.array([[-0.5, 0.1j], [0.2 - 0.6j, -0.3]])
    assert np.allclose(gallery.annulus_rotation_action(5, 0.0)(P), P, atol=1e-15)
    assert np.allclose(gallery.annulus_rotation_action(5, 2 * math.pi)(P), P, atol=1e-12)


@pytest.mark.parametrize("t", [0.5, 1.0, 3.0])
def test_annulus_rotation_preserves_membership(t):
    rng = np.random.default_rng(int(10 * t))
    d = gallery.example1(4).product
    P = _random_product_points(d, 1000, rng)
    img = gallery.annulus_rotation_action(4, t)(P)
    assert all(d.contains(q) for q in img)
    back = gallery.annulus_rotation_action(4, -t)(img)
    assert np.max(np.abs(back - P)) <= 1e-10


def test_translation_automorphy():
    rng = np.random.default_rng(5)
    d = gallery.example1(gallery.LIMIT).product
    P = _random_product_points(d, 1000, rng)
    for t in (-2.0, 0.7):
        img = gallery.g_t(P, t)
        assert all(d.contains(q) for q in img)
        assert np.max(np.abs(gallery.g_t(img, -t) - P)) <= 1e-10


def test_circle_action_group_law_and_generator():
    a = gallery.circle_action(5)
    p = gallery.base_point(5)
    for t, s in [(0.3, 0.7), (-1.0, 2.5), (4.0, -0.2)]:
        assert group_property_residual(a, p, t, s) <= 1e-10
    assert infinitesimal_residual(a, p, 0.8) <= 1e-6
    h = 1e-6
    z = np.array([-0.5 + 0.1j])
    fd = (gallery.rotation_map(5, h)(z) - gallery.rotation_map(5, -h)(z)) / (2 * h)
    assert gallery.circle_field(5)(z)[0] == pytest.approx(fd[0], abs=1e-8)


def test_hausdorff_convergence_of_family():
    for j in range(3, 11):
        h = hausdorff_distance(gallery.q_part(j), Q, 1e-3)
        assert 2.0 ** -j / 2 <= h <= 2.0 ** -j * 2


def test_orbit_examples():
    j = 4
    rep = gallery.orbit_classifier(gallery.example1(j).product, gallery.circle_action(j), gallery.base_point(j),
                                   8 * math.pi)
    assert rep.classification == "Compact"
    lim = gallery.orbit_classifier(gallery.example1(None).product, gallery.translation_action(),
                                   np.array([-0.5, 0.0]), 50.0)
    assert lim.classification == "Noncompact"
    ident = GroupAction.closed_form(lambda Z, t: Z)
    triv = gallery.orbit_classifier(Q, ident, -0.5, 5.0)
    assert triv.classification == "Compact" and triv.recurrence_gap == 0


def test_classifier_separation():
    eps_c = 1e-5
    for j in (3, 8, 12):
        rep = gallery.orbit_classifier(gallery.example1(j).product, gallery.circle_action(j),
                                       gallery.base_point(j), 4 * math.pi)
        assert rep.classification == "Compact"
        assert rep.min_boundary_dist >= 10 * eps_c
    lim = gallery.orbit_classifier(gallery.example1(None).product, gallery.translation_action(),
                                   gallery.base_point(None), 50.0)
    assert lim.classification == "Noncompact" and lim.min_boundary_dist < 1e-3


def test_escape_counts_as_noncompact():
    from autdim.fields import VectorFieldPoly
    from autdim.domains import UnitDisk
    a = GroupAction.from_field(VectorFieldPoly.planar([1]), UnitDisk())
    rep = gallery.orbit_classifier(UnitDisk(), a, 0.5, 2.0, n_steps=20)
    assert rep.classification == "Noncompact" and rep.min_boundary_dist == 0

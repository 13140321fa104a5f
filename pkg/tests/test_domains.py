import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from autdim.domains import (Annulus, Ball, DiskMinusDisk, Ellipse, ProductMinusDiagonal, Sampled, Strip,
                            UnitDisk, UpperHalfPlane, boundary_samples, contains, dist_to_boundary,
                            domain_from_json, domain_to_json, hausdorff_distance, inner_outer_radii)
from autdim.errors import DimensionError, OutsideDomainError, UnboundedDomainError
from autdim import gallery

Q = DiskMinusDisk(0.5, 0.5)

disk_points = st.builds(lambda r, a: r * np.exp(1j * a), st.floats(0, 0.99), st.floats(0, 2 * math.pi))


def test_contains_examples():
    assert contains(UnitDisk(), 0)
    assert contains(Q, -0.5)
    assert not contains(ProductMinusDiagonal(Q), (-0.5, -0.5))
    assert contains(ProductMinusDiagonal(Q), (-0.5, 0))


def test_contains_dimension_mismatch():
    with pytest.raises(DimensionError):
        contains(UnitDisk(), (0, 0))


def test_dist_examples():
    assert dist_to_boundary(UnitDisk(), 0) == 1
    assert dist_to_boundary(Ball((0j, 0j), 2.0), (1, 0)) == pytest.approx(1)
    assert dist_to_boundary(Q, -0.5) == pytest.approx(0.5)
    with pytest.raises(OutsideDomainError):
        dist_to_boundary(UnitDisk(), 1.5)


@given(disk_points)
def test_disk_distance_is_radial(z):
    assert dist_to_boundary(UnitDisk(), z) == pytest.approx(1 - abs(z), abs=1e-12)


def test_radii_examples():
    rp = inner_outer_radii(UnitDisk(), 0)
    assert (rp.r, rp.R) == pytest.approx((1, 1))
    rp = inner_outer_radii(Ellipse(2, 1), 0)
    assert (rp.r, rp.R) == pytest.approx((1, 2), abs=1e-8)
    rp = inner_outer_radii(Q, -0.5)
    assert (rp.r, rp.R) == pytest.approx((0.5, 1.5), abs=1e-8)
    for d in (UpperHalfPlane(), Strip()):
        with pytest.raises(UnboundedDomainError):
            inner_outer_radii(d, 0.5j)


@pytest.mark.parametrize("d,center", [(UnitDisk(), 0.2), (Ellipse(2, 1), 0.5j), (Q, -0.5), (Annulus(0.3, 1), 0.6)])
def test_radii_sandwich_samples(d, center):
    rp = inner_outer_radii(d, center)
    pts, _ = boundary_samples(d)
    dist = np.abs(pts[:, 0] - center)
    assert np.all(dist >= rp.r - 1e-12) and np.all(dist <= rp.R)


def test_disk_samples_example():
    pts, nus = boundary_samples(UnitDisk(), 2 * math.pi / 8)
    expected = np.exp(2j * math.pi * np.arange(8) / 8)
    assert len(pts) == 8
    assert np.allclose(np.sort_complex(pts[:, 0]), np.sort_complex(expected))
    assert np.allclose(pts, nus)


def test_inner_normals_point_into_removed_disk():
    pts, nus = boundary_samples(Q, 0.05)
    inner = np.abs(pts[:, 0] - 0.5) < 0.5 + 1e-12
    inner &= np.abs(pts[:, 0]) < 1 - 1e-9
    assert inner.any()
    toward = 0.5 - pts[inner, 0]
    assert np.allclose(nus[inner, 0], toward / np.abs(toward))


def test_ellipse_normals():
    pts, nus = boundary_samples(Ellipse(2, 1), 0.05)
    g = pts[:, 0].real / 4 + 1j * pts[:, 0].imag
    assert np.allclose(nus[:, 0], g / np.abs(g))


def test_tangency_point_sampled_once():
    pts, _ = boundary_samples(Q, 0.01)
    assert np.sum(np.abs(pts[:, 0] - 1) < 1e-12) == 1


def _normal_flip_cases():
    for d in (UnitDisk(), Ball((0j, 0j), 1.0), Annulus(0.3, 1), Ellipse(2, 1), gallery.q_part(3), Q,
              DiskMinusDisk(0.9, 0.5), ProductMinusDiagonal(gallery.q_part(3))):
        yield d


@pytest.mark.parametrize("d", list(_normal_flip_cases()), ids=lambda d: repr(d)[:40])
def test_normals_flip_membership(d):
    pts, nus = boundary_samples(d, 0.2 if d.dim == 2 else 0.02)
    eps = d.mesh_tol
    checked = 0
    for p, nu in zip(pts, nus):
        if isinstance(d, DiskMinusDisk) and d.tangent and abs(p[0] - 1) < 1e-6:
            continue
        if isinstance(d, DiskMinusDisk) and not d.tangent and any(abs(p[0] - c) < 1e-6 for c in d.crossings()):
            continue
        if isinstance(d, ProductMinusDiagonal):
            # fibre corners: both coordinates on a boundary at once
            if d.base.dist(p[:1]) < 1e-6 and abs(abs(p[1]) - 1) < 1e-6:
                continue
            if abs(p[0] - 1) < 1e-6:
                continue
        assert d.contains(p - eps * nu), p
        assert not d.contains(p + eps * nu), p
        checked += 1
    assert checked > 0


def test_hausdorff_examples():
    assert hausdorff_distance(UnitDisk(), UnitDisk()) == 0
    assert hausdorff_distance(Ball((0j,), 1.0), Ball((0j,), 1.5), 1e-3) == pytest.approx(0.5, abs=1e-3)
    for j in (3, 6, 10):
        assert hausdorff_distance(gallery.q_part(j), Q, 1e-3) == pytest.approx(2.0 ** -j, rel=1e-3)


def test_hausdorff_symmetric_and_triangle():
    ds = [UnitDisk(), Ellipse(1.2, 1), Ellipse(1.5, 0.8), Annulus(0.2, 1.1)]
    h = 0.01
    for a in ds:
        for b in ds:
            assert hausdorff_distance(a, b, h) == pytest.approx(hausdorff_distance(b, a, h), abs=1e-15)
            for c in ds:
                assert hausdorff_distance(a, c, h) <= hausdorff_distance(a, b, h) + hausdorff_distance(b, c, h) + 2 * h


def test_hausdorff_decreasing_in_j():
    gaps = [hausdorff_distance(gallery.q_part(j), Q, 1e-3) for j in range(2, 13)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_unbounded_samples_rejected():
    with pytest.raises(UnboundedDomainError):
        boundary_samples(Strip())


@pytest.mark.parametrize("d", [UnitDisk(), Ball((0.1 + 0j, 0j), 2.0), Annulus(0.3, 1.0), Ellipse(2.0, 1.0),
                               Q, ProductMinusDiagonal(gallery.q_part(4)), Strip(), UpperHalfPlane()])
def test_json_roundtrip(d):
    assert domain_from_json(domain_to_json(d)) == d


def test_sampled_domain():
    t = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    pts = 0.8 * np.exp(1j * t)
    d = Sampled(lambda p: abs(p[0]) < 0.8, pts, pts)
    assert d.contains(np.array([0.1j]))
    assert dist_to_boundary(d, 0) == pytest.approx(0.8)
    with pytest.raises(TypeError):
        domain_to_json(d)


@settings(max_examples=30)
@given(st.floats(0.05, 0.45), st.floats(0.5, 0.95))
def test_annulus_membership(r_in, rad):
    d = Annulus(r_in, 1.0)
    assert contains(d, rad) == (r_in < rad < 1)

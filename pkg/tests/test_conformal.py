import cmath

import numpy as np
import pytest
from hypothesis import given, strategies as st

from autdim.conformal import (CAYLEY, PHI, Affine, ConformalChain, Exp, Log, Mobius, Power, chain_to_disk,
                              registered_chain, strip_chain)
from autdim.domains import Annulus, DiskMinusDisk, Ellipse, Strip, UnitDisk, UpperHalfPlane
from autdim.errors import NoClosedFormError

Q = DiskMinusDisk(0.5, 0.5)


def _interior(d, n=400, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        z = complex(*rng.uniform(-1, 1, 2))
        if d.contains(np.array([z])):
            out.append(z)
    return np.array(out)


def test_mobius_inverse_and_compose():
    m = Mobius(2, 1j, 0.5, 3)
    z = np.array([0.1, -0.3j, 0.7 + 0.2j])
    assert np.allclose(m.inverse()(m(z)), z)
    assert np.allclose(m.compose(m.inverse())(z), z)


def test_mobius_rejects_degenerate():
    with pytest.raises(ValueError):
        Mobius(1, 2, 2, 4)


@pytest.mark.parametrize("step", [Mobius(1, -0.3, -0.3, 1), Exp(np.pi), Log(0), Power(0.5), Affine(2j, 1)])
def test_step_derivatives(step):
    z = 0.4 + 0.3j
    h = 1e-6
    fd = (step(z + h) - step(z - h)) / (2 * h)
    assert abs(step.deriv(z) - fd) < 1e-7


def test_phi_and_cayley():
    assert PHI(0) == pytest.approx(1j)
    assert PHI(-0.5) == pytest.approx(1j / 3)
    assert abs(CAYLEY(1j)) < 1e-15


@pytest.mark.parametrize("d", [UnitDisk(), UpperHalfPlane(), Strip(), Q, DiskMinusDisk(0.9, 0.5),
                               DiskMinusDisk(0.4, 0.6)])
def test_chain_maps_into_disk(d):
    chain = chain_to_disk(d)
    if d.bounded:
        z = _interior(d)
    else:
        rng = np.random.default_rng(1)
        z = rng.uniform(-3, 3, 400) + 1j * rng.uniform(0.01, 0.99, 400)
    w = chain(z)
    assert np.all(np.abs(w) < 1)
    chain.check(z[:200])


def test_chain_derivative_matches_fd():
    chain = chain_to_disk(Q)
    z = -0.5 + 0.1j
    h = 1e-6
    fd = (chain(z + h) - chain(z - h)) / (2 * h)
    assert abs(chain.deriv(z) - fd) < 1e-6


@given(st.floats(-5, 5), st.floats(0.01, 0.99))
def test_strip_chain_inside(x, y):
    assert abs(strip_chain()(complex(x, y))) < 1


@pytest.mark.parametrize("d", [Annulus(0.3, 1), Ellipse(2, 1), DiskMinusDisk(0.3, 0.5)])
def test_no_closed_form(d):
    with pytest.raises(NoClosedFormError):
        chain_to_disk(d)
    assert registered_chain(d) is None


def test_then_appends_steps():
    c = ConformalChain((Affine(2, 0),)).then(Affine(1, 1))
    assert c(1) == pytest.approx(3)
    assert c.deriv(1) == pytest.approx(2)


def test_power_principal_branch():
    assert Power(0.5)(-1 + 0j) == pytest.approx(cmath.sqrt(-1 + 0j))

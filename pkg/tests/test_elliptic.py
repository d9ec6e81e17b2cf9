import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from sov6v.elliptic import (ThetaParams, ThetaSpaceSpec, basis_det_constant, elliptic_poly_det,
                            elliptic_poly_det_formula, frobenius_det, frobenius_kernel, interpolate,
                            interpolation_weights, lattice_distance, on_lattice, quasi_periodicity_residuals,
                            theta1, theta_aux, theta_k, vartheta, vartheta_matrix)
from sov6v.errors import IndependenceViolation, PoleOnLattice

from helpers import random_points

# frozen from mpmath.jtheta at 30 digits (nome exp(i*pi*omega))
THETA1_AT_03_02 = 0.273304112096232286103607242581 + 0.174719675602086109646492306315j
VARTHETA_1_3 = 0.169718726030479551623678305857 - 0.833184287685672859407958187847j
Y0_AT_01 = 0.0415062282432602642711222647665
X0_AT_07_01 = 0.412568268335262060899756225641 + 0.0590789684006266784296830110846j

finite = dict(allow_nan=False, allow_infinity=False)
points = st.complex_numbers(max_magnitude=4.0, **finite).filter(lambda z: abs(z.imag) < 1.2)


def test_theta1_frozen_value():
    assert abs(theta1(0.3 + 0.2j, 1j) - THETA1_AT_03_02) < 1e-14


def test_theta1_matches_product_formula():
    z, om = 0.7 - 0.15j, 0.2 + 1.1j
    q = np.exp(1j * np.pi * om)
    n = np.arange(1, 60)
    prod = 2 * q**0.25 * np.sin(z) * np.prod((1 - q**(2 * n)) * (1 - 2 * q**(2 * n) * np.cos(2 * z) + q**(4 * n)))
    assert abs(theta1(z, om) - prod) < 1e-14


def test_variants_frozen():
    assert abs(vartheta(1, 3, 0.2 - 0.1j, 1j) - VARTHETA_1_3) < 1e-14
    assert abs(theta_aux("Y0", 0.1) - Y0_AT_01) < 1e-15
    assert abs(theta_aux("X0", 0.7 + 0.1j) - X0_AT_07_01) < 1e-14


def test_theta1_odd_with_simple_zero():
    z = np.array([0.3 + 0.1j, -1.2 + 0.4j])
    assert np.allclose(theta1(-z), -theta1(z), atol=1e-15)
    assert abs(theta1(0.0)) < 1e-16
    assert abs(theta1(np.pi + np.pi * 1j)) < 1e-13


def test_companions_relate_by_half_periods():
    z = 0.41 - 0.2j
    assert abs(theta_k(2, z) - theta1(z + np.pi / 2)) < 1e-14


def test_explicit_cutoff_agrees_with_automatic():
    z = 0.9 + 0.5j
    assert abs(theta1(z, ThetaParams(1j, series_cutoff=40)) - theta1(z, 1j)) < 1e-15


@pytest.mark.parametrize("om", [0.0, -1j, 0.3 - 0.01j])
def test_bad_omega_rejected(om):
    with pytest.raises(ValueError):
        ThetaParams(om)
    with pytest.raises(ValueError):
        theta1(0.1, om)


@settings(max_examples=60, deadline=None)
@given(z=points, om_re=st.floats(-0.5, 0.5), om_im=st.floats(0.6, 1.6))
def test_quasi_periodicity_property(z, om_re, om_im):
    om = complex(om_re, om_im)
    # every variant vanishes on the lattice, where a relative residual is meaningless
    assume(lattice_distance(z, om) > 0.05)
    res = quasi_periodicity_residuals(np.array([z]), om)
    assert max(res.values()) < 1e-12


def test_all_variants_covered():
    names = quasi_periodicity_residuals(np.array([0.2j]), 1j)
    assert {n.split(":")[0] for n in names} == {"STD", "X0", "Y0", "XY"}


def test_lattice_helpers():
    om = 0.3 + 1.2j
    assert on_lattice(2 * np.pi - 3 * np.pi * om, om)
    assert not on_lattice(0.5, om)
    assert lattice_distance(np.pi * om + 1e-3, om) == pytest.approx(1e-3, rel=1e-6)


def test_interpolation_reproduces_product(rng):
    for n in (1, 3, 5):
        roots = random_points(rng, n)
        f = lambda u: np.prod(theta1(np.subtract.outer(np.atleast_1d(u), roots)), axis=-1)
        pts = random_points(rng, n)
        z = random_points(rng, 4)
        got = interpolate(pts, f(pts), ThetaSpaceSpec(n, roots.sum()), z)
        assert np.max(np.abs(got - f(z)) / np.abs(f(z))) < 1e-11


def test_interpolation_weights_rows(rng):
    pts = random_points(rng, 3)
    W = interpolation_weights(pts, 0.4, pts)
    assert np.max(np.abs(W - np.eye(3))) < 1e-12


def test_interpolation_rejects_dependent_points():
    spec = ThetaSpaceSpec(2, 0.0)
    with pytest.raises(IndependenceViolation):
        interpolate([0.3, 0.3 + np.pi], [1, 2], spec, 0.1)
    with pytest.raises(IndependenceViolation):
        interpolate([0.3, -0.3], [1, 2], spec, 0.1)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_basis_determinant_closed_form(n, rng):
    pts = random_points(rng, n)
    det, c = elliptic_poly_det(pts, 0.3 + 0.1j)
    assert c == basis_det_constant(n)
    assert abs(det - elliptic_poly_det_formula(pts, 0.3 + 0.1j)) < 1e-10 * abs(det)


def test_basis_determinant_vanishes_for_coincident_points():
    det, _ = elliptic_poly_det([0.4, 0.9, 0.4])
    assert abs(det) < 1e-13


def test_basis_quasi_periodic_in_each_variable():
    n, z = 3, 0.2 + 0.1j
    V0 = vartheta_matrix(np.array([z]), n)[0]
    V1 = vartheta_matrix(np.array([z + np.pi]), n)[0]
    assert np.allclose(V1, (-1) ** n * V0, atol=1e-13)


@pytest.mark.parametrize("n", [1, 2, 4])
def test_frobenius(n, rng):
    x, y = random_points(rng, n), random_points(rng, n)
    direct = np.linalg.det(frobenius_kernel(x, y, 0.5 + 0.3j))
    assert abs(direct - frobenius_det(x, y, 0.5 + 0.3j)) < 1e-10 * abs(direct)


def test_frobenius_poles():
    with pytest.raises(PoleOnLattice):
        frobenius_det([0.1], [0.2], np.pi)
    with pytest.raises(PoleOnLattice):
        frobenius_det([0.1, 0.5], [0.1 + np.pi, 0.7], 0.3)

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sov6v.errors import InvalidModel, PoleAtHeight, WindowOverflow
from sov6v.repspace import (DEFAULT_ETA, ModelParams, Representation, build_antiperiodic_transfer,
                            dybe_residual, gauge_y1_check, quantum_det_check, r_matrix, seeded_xi)

from helpers import bundle, model, random_points


def _mp_theta(z, omega):
    return complex(mp.jtheta(1, mp.mpc(z), mp.exp(1j * mp.pi * mp.mpc(omega))))


def test_r_matrix_against_mpmath():
    p = model(2, 0, 1)
    lam, t = 0.37 - 0.12j, 0.81 + 0.05j
    th = lambda z: _mp_theta(z, p.omega)
    eta = p.eta
    want = np.zeros((4, 4), dtype=complex)
    want[0, 0] = want[3, 3] = th(lam + eta)
    want[1, 1] = np.exp(1j * eta) * th(lam) * th(t + eta) / th(t)
    want[2, 2] = np.exp(-1j * eta) * th(lam) * th(-t + eta) / th(-t)
    want[1, 2] = np.exp(1j * lam) * th(eta) * th(t + lam) / th(t)
    want[2, 1] = np.exp(-1j * lam) * th(eta) * th(-t + lam) / th(-t)
    assert np.max(np.abs(r_matrix(lam, t, p) - want)) < 1e-14


def test_r_matrix_at_zero_is_permutation():
    p = model(2, 1, 1)
    P = np.eye(4)[[0, 2, 1, 3]]
    R = r_matrix(0.0, 0.63 + 0.1j, p)
    assert np.max(np.abs(R - p.theta(p.eta) * P)) < 1e-14


def test_r_matrix_rejects_pole_height():
    with pytest.raises(PoleAtHeight):
        r_matrix(0.2, np.pi, model(2))


@pytest.mark.parametrize("y", [0, 1])
def test_dybe(y, rng):
    p = model(2, 1, y)
    for _ in range(10):
        l1, l2, l3 = random_points(rng, 3)
        assert dybe_residual(l1, l2, l3, 0.9 + 0.1j, p) < 1e-11


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.floats(0.3, 2.5))
def test_dybe_property(a, b, t):
    p = model(2, 0, 1)
    assert dybe_residual(a + 0.1j, a, b - 0.2j, t + 0.05j, p) < 1e-11


def test_gauge_between_y_values(rng):
    p = model(2, 0, 1)
    for _ in range(10):
        l1, l2 = random_points(rng, 2)
        assert gauge_y1_check(l1, l2, 1.1 - 0.1j, p) < 1e-11


def test_reference_states():
    b = bundle(2, 0, 1)
    lam = 0.4 + 0.1j
    for r in (0, 1):
        # the all-up covector is annihilated by B, the all-down vector by C acting from the left
        assert np.max(np.abs(b.rep.entry("B", lam).block(r)[0])) == 0
        assert np.max(np.abs(b.rep.entry("C", lam).block(r)[-1])) == 0
        Ds = b.rep.entry("D_static", lam).block(r)
        As = b.rep.entry("A_static", lam).block(r)
        assert np.allclose(Ds[:, -1], b.p.a(lam) * np.eye(b.p.dim)[:, -1], atol=1e-14)
        assert np.allclose(As[:, 0], b.p.a(lam) * np.eye(b.p.dim)[:, 0], atol=1e-14)


@pytest.mark.parametrize("N,x,y", [(2, 0, 1), (2, 1, 0), (2, 1, 1), (3, 0, 0), (3, 1, 1), (4, 0, 1)])
def test_transfer_commutes(N, x, y, rng):
    rep = Representation(model(N, x, y))
    l1, l2 = random_points(rng, 2)
    comm = {}
    for r in (0, 1):
        T1, T2 = rep.transfer(l1).block(r), rep.transfer(l2).block(r)
        comm[r] = np.abs(T1 @ T2 - T2 @ T1).max() / (np.abs(T1).max() * np.abs(T2).max())
    # only sector 0 carries the twist-compatible heights
    assert comm[0] < 1e-10
    assert comm[1] > 1e-6


def test_transfer_block_helper_matches_representation():
    p = model(2, 1, 0)
    assert np.allclose(build_antiperiodic_transfer(0.3, p), Representation(p).transfer(0.3).block(0))


@pytest.mark.parametrize("N,x,y", [(2, 0, 1), (2, 1, 0), (2, 1, 1), (3, 0, 0), (3, 0, 1)])
def test_quantum_determinant_and_inversion(N, x, y, rng):
    p = model(N, x, y)
    rep = Representation(p)
    for lam in random_points(rng, 2):
        assert max(quantum_det_check(lam, p, rep)) < 1e-10
        assert max(quantum_det_check(lam, p, rep, r=1)) < 1e-10


@pytest.mark.parametrize("N,x,y", [(2, 0, 1), (2, 1, 0), (2, 1, 1), (3, 0, 0)])
def test_transfer_product_at_inhomogeneity(N, x, y):
    # on sector 0 the product is (-1)^(x+y+xy) a(xi) d(xi - eta) times the identity
    b = bundle(N, x, y)
    p, rep = b.p, b.rep
    for xi in p.xi:
        T = rep.transfer(xi).block(0) @ rep.transfer(xi - p.eta).block(0)
        want = p.sign * p.qdet(xi) * np.eye(p.dim)
        assert np.abs(T - want).max() / abs(p.qdet(xi)) < 1e-10


def test_sector_operator_algebra():
    rep = Representation(model(2))
    A = rep.entry("A", 0.3)
    B = rep.entry("B", 0.3)
    C = rep.entry("C", 0.3)
    assert (A.shift, B.shift, C.shift, rep.entry("D", 0.3).shift) == (-1, 0, 0, 1)
    AB = A @ B
    assert np.allclose(AB.block(0), A.block(0) @ B.block(0))
    assert rep.local_spin(1, 0, 1).shift == 1
    with pytest.raises(ValueError):
        A + B
    with pytest.raises(ValueError):
        rep.entry("X", 0.1)


def test_window_overflow():
    rep = Representation(model(2), window=(-1, 1))
    with pytest.raises(WindowOverflow):
        rep.entry("D", 0.2).block(1)


@pytest.mark.parametrize("kwargs", [
    dict(N=2, x=0, y=0),
    dict(N=2, x=2, y=0),
    dict(N=0),
    dict(N=2, omega=-1j),
    dict(N=2, kappa=0),
])
def test_invalid_models(kwargs):
    N = kwargs.pop("N")
    xi = seeded_xi(max(N, 1), 3)[:N]
    with pytest.raises(InvalidModel):
        ModelParams(N, xi=xi, **kwargs)


def test_xi_collision_rejected():
    with pytest.raises(InvalidModel):
        ModelParams(2, 0, 1, xi=(0.4, 0.4 + DEFAULT_ETA))
    with pytest.raises(InvalidModel):
        ModelParams(2, 0, 1, xi=(0.4, 0.4 + np.pi))


def test_rational_eta_rejected():
    with pytest.raises(InvalidModel):
        ModelParams(2, 0, 1, eta=np.pi / 3, xi=(0.3, 1.1))


def test_seeded_model_is_deterministic():
    assert model(3, 0, 0).xi == ModelParams.seeded(3, 0, 0).xi
    assert ModelParams.seeded(3, 0, 0, seed=8).xi != model(3, 0, 0).xi

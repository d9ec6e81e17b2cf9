import numpy as np
import pytest

from sov6v import tqinhom as ti
from sov6v.elliptic import lattice_distance
from sov6v.errors import BranchLost, PoleOnLattice
from sov6v.spectrum import EigenvalueFunction, collinearity

from helpers import bundle

EVEN = [(0, 1), (1, 0), (1, 1)]
BETA = 0.3


@pytest.fixture(scope="module")
def solved():
    out = {}
    for xy in EVEN:
        b = bundle(2, *xy)
        g = ti.default_gauge(b.p)
        out[xy] = [(m, *ti.q_inhom_solve(m.t, BETA, g, b.p)) for m in b.spec]
    return out


@pytest.mark.parametrize("xy", EVEN)
def test_branch_reaches_target(xy, solved):
    for _, Q, report in solved[xy]:
        assert report["branch_max"] < 1e-9
        assert report["branch"][-1][0] == pytest.approx(BETA)
        assert report["sigma_ratio"] < 1e-8
        assert len(Q.roots) == 2


@pytest.mark.parametrize("xy", EVEN)
def test_inhomogeneous_equation_holds(xy, solved):
    b = bundle(2, *xy)
    g = ti.InhomGauge(BETA, ti.default_gauge(b.p).mu)
    lam = np.random.default_rng(9).uniform(0, np.pi, 20) + 0.2j
    for m, Q, report in solved[xy]:
        assert report["residual"] < 1e-8
        assert ti.inhom_residual(m.t, Q, g, b.p, lam) < 1e-8
        assert max(report["discrete_xi"], report["discrete_xi_eta"]) < 1e-8
        assert lattice_distance(sum(Q.roots) - report["alpha"], b.p.omega) < 1e-8


@pytest.mark.parametrize("xy", EVEN)
def test_det_expansion(xy):
    b = bundle(2, *xy)
    g = ti.default_gauge(b.p)
    t = b.spec[1].t
    for beta, alpha in ((0.0, 0.7 + 0.1j), (0.2 - 0.1j, 1.9), (1.3j, -0.4 + 0.2j)):
        direct, expansion = ti.c_matrix_det(t, beta, alpha, g, b.p)
        assert abs(direct - expansion) < 1e-10 * abs(direct)


def test_det_at_zero_beta_closed_form():
    b = bundle(2, 0, 1)
    p = b.p
    g = ti.default_gauge(p)
    t = b.spec[0].t
    for alpha in (0.3 + 0.1j, 2.2 - 0.05j):
        s = p.xi_arr.sum() - alpha
        want = (-1) ** p.N * p.theta(s - p.N * p.eta) / p.theta(s)
        assert abs(ti.c_matrix_det(t, 0.0, alpha, g, p)[0] - want) < 1e-12 * abs(want)
    # the branch therefore starts at sum(xi) - N*eta
    start = p.xi_arr.sum() - p.N * p.eta
    assert abs(ti.c_matrix_det(t, 0.0, start, g, p)[0]) < 1e-13


@pytest.mark.parametrize("xy", EVEN)
def test_eigenstates_from_inhomogeneous_roots(xy, solved):
    b = bundle(2, *xy)
    g = ti.InhomGauge(BETA, ti.default_gauge(b.p).mu)
    for m, Q, _ in solved[xy]:
        right = ti.eigenstate_via_inhom(Q.roots, g, None, b.p, b.frame, b.rep)
        left = ti.eigenstate_via_inhom(Q.roots, g, None, b.p, b.frame, b.rep, side="left")
        assert collinearity(right, m.right) < 1e-7
        assert collinearity(left, m.left) < 1e-7


def test_opposite_dressing_fails_when_y_is_one(solved):
    b = bundle(2, 0, 1)
    g = ti.InhomGauge(BETA, ti.default_gauge(b.p).mu)
    m, Q, _ = solved[(0, 1)][0]
    wrong = ti.eigenstate_via_inhom(Q.roots, g, None, b.p, b.frame, b.rep, tau_sign=+1)
    assert collinearity(wrong, m.right) > 1e-2


def test_dressing_sign_irrelevant_for_y_zero(solved):
    b = bundle(2, 1, 0)
    g = ti.InhomGauge(BETA, ti.default_gauge(b.p).mu)
    m, Q, _ = solved[(1, 0)][0]
    v1 = ti.eigenstate_via_inhom(Q.roots, g, None, b.p, b.frame, b.rep, tau_sign=+1)
    assert collinearity(v1, m.right) < 1e-7


def test_gauge_validation():
    b = bundle(2, 0, 1)
    p = b.p
    with pytest.raises(ValueError):
        ti.check_gauge(ti.InhomGauge(0.0, 0.5), p)
    with pytest.raises(PoleOnLattice):
        ti.check_gauge(ti.InhomGauge(0.3, p.xi[0] + p.height(0, 0)), p)
    ti.check_gauge(ti.default_gauge(p), p)


def test_non_eigenvalue_fails_shifted_equations():
    # det C = 0 only imposes the equations at xi; the ones at xi - eta detect a fake t
    b = bundle(2, 0, 1)
    fake = EigenvalueFunction(tuple(0.1 * v for v in b.spec[0].t.values), b.p)
    _, report = ti.q_inhom_solve(fake, BETA, ti.default_gauge(b.p), b.p)
    assert report["discrete_xi"] < 1e-10
    assert report["discrete_xi_eta"] > 1.0
    assert report["residual"] > 1e-3


def test_branch_lost_when_newton_cannot_start():
    b = bundle(2, 0, 1)
    with pytest.raises(BranchLost):
        ti.solve_alpha_branch(b.spec[0].t, [0.3], ti.default_gauge(b.p), b.p, max_iter=0)

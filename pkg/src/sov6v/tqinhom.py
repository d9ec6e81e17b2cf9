"""Inhomogeneous T-Q equation with a gauge function and an off-diagonal term.

For Q an ordinary order-N theta function (roots lam_j, norm alpha_Q = sum lam_j),

    t(lam) Q(lam) = f(lam) a_xy(lam) Q(lam - eta) + d(lam)/f(lam + eta) Q(lam + eta) - a(lam) d(lam) F(lam)

where f is the gauge function below and F is fixed by f and Q.  Solutions are
found by continuing the zero alpha_Q(beta) of det C(beta, alpha_Q) from beta = 0.
"""
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .elliptic import interpolation_weights, on_lattice, vartheta_matrix
from .errors import AdmissibilityFailure, BranchLost, IndependenceViolation, NoNullVector, PoleOnLattice
from .repspace import Representation, bits
from .sovbasis import SovFrame, theta_gram
from .tq import QFunction, find_theta_roots

MU_OFFSET = 0.3 + 0.21j


@dataclass(frozen=True)
class InhomGauge:
    beta: complex
    mu: complex
    M: int = None

    def order(self, params):
        return params.N if self.M is None else self.M


def default_gauge(params, beta=0.3):
    return InhomGauge(complex(beta), complex(params.height(0, 0) + MU_OFFSET))


def check_gauge(g, params, tol=1e-12):
    """The four exclusions on mu; raises PoleOnLattice."""
    p = params
    if g.beta == 0:
        raise ValueError("beta must be nonzero")
    M = g.order(p)
    t00 = p.height(0, 0)
    for label, shift in (("mu+(N-M)eta", (p.N - M) * p.eta), ("mu+(N-M-1)eta", (p.N - M - 1) * p.eta),
                         ("mu-t00", -t00), ("mu+eta-t00", p.eta - t00)):
        if on_lattice(g.mu + shift - p.xi_arr, p.omega, tol):
            raise PoleOnLattice(f"{label} - xi_j lies on the lattice")


def gauge_f(g, lam, params):
    """beta^-1 exp(-iy lam) theta(lam - mu + (M-N)eta) / theta(lam - mu + t_{0,0})."""
    p = params
    lam = np.asarray(lam, dtype=complex)
    den = p.theta(lam - g.mu + p.height(0, 0))
    if np.any(np.abs(den) < 1e-14):
        raise PoleOnLattice("gauge function evaluated at a pole")
    return (np.exp(-1j * p.y * lam) * p.theta(lam - g.mu + (g.order(p) - p.N) * p.eta) / den) / g.beta


def inhom_term_F(g, Q, lam, params):
    """Off-diagonal term F fixed by the gauge and Q (Q an order-N theta function)."""
    p = params
    th = p.theta
    lam = np.asarray(lam, dtype=complex)
    t00 = p.height(0, 0)
    aQ = Q.root_arr.sum()
    sx = p.xi_arr.sum()
    N, eta, mu, b = p.N, p.eta, g.mu, g.beta
    sgn = (-1) ** (p.x + p.y + p.x * p.y)
    d1 = th(t00 + aQ - sx + N * eta)
    d2 = th(p.y * np.pi * p.omega - t00 - aQ + sx - N * eta)
    if abs(d1) < 1e-14 or abs(d2) < 1e-14:
        raise PoleOnLattice("alpha_Q hits a pole of the inhomogeneous term")
    term1 = (sgn * np.exp(-1j * p.y * lam) * th(t00) / (b * d1) * Q(mu - eta - t00) / p.d(mu - t00)
             * th(lam - mu - aQ + sx - N * eta) / th(lam - mu + t00))
    term2 = (b * np.exp(1j * p.y * (lam + eta)) * th(t00) / d2 * Q(mu) / p.a(mu - eta)
             * th(lam - mu + eta + p.y * np.pi * p.omega - t00 - aQ + sx - N * eta) / th(lam - mu + eta))
    return term1 + term2


def inhom_residual(t, Q, g, params, lam):
    """Relative residual of the inhomogeneous equation at the points lam."""
    p = params
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    terms = [t(lam) * Q(lam),
             -gauge_f(g, lam, p) * p.a_xy(lam) * Q(lam - p.eta),
             -p.d(lam) / gauge_f(g, lam + p.eta, p) * Q(lam + p.eta),
             p.a(lam) * p.d(lam) * inhom_term_F(g, Q, lam, p)]
    total = sum(terms)
    size = sum(np.abs(x) for x in terms)
    return float(np.max(np.abs(total) / size))


# C matrix -----------------------------------------------------------------------------

def _diag_weights(t, g, params):
    p = params
    xi = p.xi_arr
    return (np.exp(1j * p.y * xi) * t.vals / p.a_xy(xi)
            * p.theta(xi - g.mu + p.height(0, 0)) / p.theta(xi - g.mu))


def c_matrix(t, beta, alphaQ, g, params, tol=1e-12):
    """N x N matrix acting on (Q(xi_1), ..., Q(xi_N))."""
    p = params
    xi = p.xi_arr
    s = xi.sum() - alphaQ
    if on_lattice(s, p.omega, tol):
        raise IndependenceViolation("sum(xi) - alpha_Q lies on the lattice")
    # Q(xi_a - eta) = sum_b W_ab Q(xi_b)
    W = interpolation_weights(xi, alphaQ, xi - p.eta, p.omega)
    return beta * np.diag(_diag_weights(t, g, p)) - W


def c_det_expansion(t, beta, alphaQ, g, params):
    """Subset expansion of det C."""
    p = params
    th = p.theta
    xi = p.xi_arr
    N = p.N
    s = xi.sum() - alphaQ
    w = _diag_weights(t, g, p)
    total = 0.0
    for n in range(N + 1):
        inner = 0.0
        for P in combinations(range(N), n):
            prod = 1.0
            for a in range(N):
                if a in P:
                    continue
                f = w[a]
                for b in P:
                    f = f * th(xi[a] - xi[b] + p.eta) / th(xi[a] - xi[b])
                prod = prod * f
            inner = inner + prod
        total = total + (-1) ** n * beta ** (N - n) * th(s - n * p.eta) / th(s) * inner
    return complex(total)


def c_matrix_det(t, beta, alphaQ, g, params):
    """(direct determinant, subset expansion)."""
    return complex(np.linalg.det(c_matrix(t, beta, alphaQ, g, params))), c_det_expansion(t, beta, alphaQ, g, params)


def _det_scale(C):
    # Hadamard bound
    return float(np.prod(np.linalg.norm(C, axis=1)))


def solve_alpha_branch(t, beta_path, g, params, alpha0=None, tol=1e-9, max_iter=50):
    """Newton continuation of det C(beta, alpha) = 0 along beta_path.

    Returns a list of (beta, alpha, |det|/scale).
    """
    p = params
    alpha = p.xi_arr.sum() - p.N * p.eta if alpha0 is None else complex(alpha0)
    h = 1e-6
    out = []

    def F(b, a):
        C = c_matrix(t, b, a, g, p)
        return complex(np.linalg.det(C)), _det_scale(C)

    for b in beta_path:
        val, sc = F(b, alpha)
        for _ in range(max_iter):
            if abs(val) < 1e-3 * tol * sc:
                break
            deriv = (F(b, alpha + h)[0] - F(b, alpha - h)[0]) / (2 * h)
            if deriv == 0:
                raise BranchLost(f"vanishing derivative at beta={b}")
            step = -val / deriv
            lam = 1.0
            while lam > 1e-4:
                cand = alpha + lam * step
                try:
                    v2, s2 = F(b, cand)
                except IndependenceViolation:
                    v2, s2 = np.inf, 1.0
                if abs(v2) / s2 < abs(val) / sc:
                    break
                lam /= 2
            else:
                raise BranchLost(f"step halving exhausted at beta={b}")
            alpha, val, sc = cand, v2, s2
        if abs(val) > tol * sc:
            raise BranchLost(f"|det C| / scale = {abs(val) / sc:.2e} at beta={b}")
        out.append((complex(b), complex(alpha), abs(val) / sc))
    return out


def straight_path(beta, steps=24):
    return [beta * (k + 1) / steps for k in range(steps)]


def q_from_values(values, alphaQ, params):
    """QFunction (standard theta, order N, norm alphaQ) with the given values at xi."""
    p = params
    shift = alphaQ / p.N
    V = vartheta_matrix(p.xi_arr - shift, p.N, p.omega)
    c = np.linalg.solve(V, values)
    z = find_theta_roots(c, p.omega)
    roots = tuple(complex(zj + shift) for zj in z)
    Q = QFunction("STD", roots, 0.0, 1.0, p.omega)
    ratio = values / Q(p.xi_arr)
    k = int(np.argmax(np.abs(values)))
    return QFunction("STD", roots, 0.0, complex(ratio[k]), p.omega)


def q_inhom_solve(t, beta, g, params, steps=24, tol=1e-8, n_check=20, seed=5):
    """Solve the inhomogeneous equation for Q; returns (QFunction, report)."""
    p = params
    check_gauge(g, p)
    branch = solve_alpha_branch(t, straight_path(beta, steps), g, p)
    alphaQ = branch[-1][1]
    C = c_matrix(t, beta, alphaQ, g, p)
    _, S, Vh = np.linalg.svd(C)
    if S[-1] > 1e-8 * S[0]:
        raise NoNullVector(f"C has smallest singular value ratio {S[-1] / S[0]:.2e}")
    q = Vh[-1].conj()
    Q = q_from_values(q, alphaQ, p)
    qmax = np.abs(q).max()
    for x in p.xi:
        if abs(Q(x)) < 1e-12 * qmax and abs(Q(x - p.eta)) < 1e-12 * qmax:
            raise AdmissibilityFailure("(Q(xi), Q(xi - eta)) vanishes")
    rng = np.random.default_rng(seed)
    lam = rng.uniform(0, np.pi, n_check) + 1j * rng.uniform(-0.3, 0.3, n_check)
    g_b = InhomGauge(complex(beta), g.mu, g.M)
    res = inhom_residual(t, Q, g_b, p, lam)
    W = interpolation_weights(p.xi_arr, alphaQ, p.xi_arr - p.eta, p.omega)
    qm = W @ q
    f_xi = gauge_f(g_b, p.xi_arr, p)
    red1 = np.abs(t.vals * q - f_xi * p.a_xy(p.xi_arr) * qm) / (np.abs(t.vals * q) + 1e-300)
    red2 = np.abs(t.shifted_values() * qm - p.d(p.xi_arr - p.eta) / f_xi * q) / (np.abs(qm * t.shifted_values()) + 1e-300)
    report = {"alpha": alphaQ, "branch_max": max(b[2] for b in branch), "residual": res,
              "discrete_xi": float(red1.max()), "discrete_xi_eta": float(red2.max()),
              "sigma_ratio": float(S[-1] / S[0]), "branch": branch}
    return Q, report


def reference_inhom(side, g, params, kappa=None):
    """SOV coordinates of the pseudo-vacuum (sector -M for the right state, M for the left)."""
    p = params
    k = p.kappa if kappa is None else kappa
    f = gauge_f(g, p.xi_arr, p)
    if side == "right":
        w = np.exp(1j * p.y * p.eta) * p.a_xy(p.xi_arr) / (k * p.d(p.xi_arr - p.eta)) * f
    else:
        w = k * np.exp(1j * p.y * p.eta) * f
    return np.array([np.prod(w ** bits(h, p.N)) * np.linalg.det(theta_gram(0, h, p)) for h in range(p.dim)])


def eigenstate_via_inhom(roots, g, kappa, params, frame=None, rep=None, side="right", tau_sign=None):
    """prod_a [exp(-iy tau) theta(tau)^-1 D(lam_a)] on the pseudo-vacuum, as a sector-0 vector.

    ``tau_sign=+1`` switches the dressing to exp(+iy tau); that variant is not
    an eigenvector when y = 1 and is kept for the comparison tests.
    """
    p = params if kappa is None else params.with_kappa(kappa)
    rep = rep or Representation(p)
    M = len(roots)
    frame = frame or SovFrame(p, rep, sectors=(0,))
    sgn = -1 if tau_sign is None else tau_sign
    dress = rep.diagonal(lambda tt, s: np.exp(sgn * 1j * p.y * tt) / p.theta(tt))
    coeffs = reference_inhom(side, g, p)
    if side == "right":
        frame.ensure(-M)
        vec = frame.from_coords_right(coeffs, -M)
        r = -M
        for lam in roots:
            vec = dress.apply(rep.entry("D", lam).apply(vec, r), r + 1)
            r += 1
        return vec
    frame.ensure(M)
    vec = frame.from_coords_left(coeffs, M)
    r = M
    for lam in roots:
        # bra in sector r; D maps sector r-1 -> r, the dressing acts after it
        vec = dress.apply_left(rep.entry("D", lam).apply_left(vec, r - 1), r - 1)
        r -= 1
    return vec

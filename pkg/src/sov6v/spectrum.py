"""Spectrum of the antiperiodic transfer matrix and its separate-state eigenvectors."""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .elliptic import interpolation_weights
from .errors import DegenerateSpectrum, IncompleteEnumeration, ZeroQPair
from .repspace import Representation, bits
from .sovbasis import SovFrame, shifted_xi, theta_gram, xi_bar
from .elliptic import vartheta_matrix


@dataclass(frozen=True)
class EigenvalueFunction:
    """t(lam) stored through its values at the inhomogeneities.

    exp(iy*lam) t(lam) is a theta function of order N and norm sum(xi) + t_{0,0}.
    """

    values: tuple
    params: object

    @property
    def vals(self):
        return np.array(self.values, dtype=complex)

    @property
    def norm(self):
        return self.params.xi_arr.sum() + self.params.t0

    def __call__(self, lam):
        p = self.params
        lam = np.asarray(lam, dtype=complex)
        w = interpolation_weights(p.xi_arr, self.norm, lam, p.omega)
        return np.exp(-1j * p.y * lam) * (w @ (np.exp(1j * p.y * p.xi_arr) * self.vals))

    def shifted_values(self):
        """t(xi_a - eta) for all a."""
        return np.array([self(x - self.params.eta) for x in self.params.xi], dtype=complex)


@dataclass
class SpectrumMember:
    t: EigenvalueFunction
    right: np.ndarray  # column eigenvector on sector 0
    left: np.ndarray   # row eigenvector on sector 0


def _rayleigh(L, T, R):
    return (L @ T @ R) / (L @ R)


def brute_spectrum(params, rep=None, gap_factor=1e3):
    """Diagonalise the transfer matrix on sector 0 and read off t(xi_a) for each eigenvector."""
    p = params
    rep = rep or Representation(p)
    Ts = [rep.transfer(xi).block(0) for xi in p.xi]
    scale = max(np.abs(T).max() for T in Ts)

    def decompose(M):
        w, vl, vr = sla.eig(M, left=True, right=True)
        gaps = np.abs(np.subtract.outer(w, w))
        np.fill_diagonal(gaps, np.inf)
        return w, vl.conj().T, vr, gaps.min()

    w, L, R, gap = decompose(Ts[0])
    if gap < gap_factor * p.tol * scale:
        # fall back to a generic combination of commuting matrices
        rng = np.random.default_rng(12345)
        c = rng.normal(size=len(Ts)) + 1j * rng.normal(size=len(Ts))
        w, L, R, gap = decompose(sum(ci * T for ci, T in zip(c, Ts)))
        if gap < gap_factor * p.tol * scale:
            raise DegenerateSpectrum(f"minimal eigenvalue gap {gap:.2e}")
    members = []
    for k in range(len(w)):
        vals = tuple(complex(_rayleigh(L[k], T, R[:, k])) for T in Ts)
        members.append(SpectrumMember(EigenvalueFunction(vals, p), R[:, k], L[k]))
    members.sort(key=lambda m: tuple(np.round(np.concatenate([[v.real, v.imag] for v in m.t.values]), 8)))
    return members


def discrete_rhs(params):
    """(-1)^(x+y+xy) a(xi_a) d(xi_a - eta)."""
    p = params
    return np.array([p.a_xy(x) * p.d(x - p.eta) for x in p.xi])


def verify_discrete_system(t, params):
    p = params
    rhs = discrete_rhs(p)
    lhs = t.vals * t.shifted_values()
    return float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))


def _shift_matrix(params):
    """Matrix L with t(xi_a - eta) = (L @ values)_a."""
    p = params
    norm = p.xi_arr.sum() + p.t0
    pts = p.xi_arr - p.eta
    W = interpolation_weights(p.xi_arr, norm, pts, p.omega)
    return np.exp(-1j * p.y * pts)[:, None] * W * np.exp(1j * p.y * p.xi_arr)[None, :]


def _newton(v, Lm, c, max_iter=60, tol=1e-14):
    def F(v):
        return v * (Lm @ v) - c

    f = F(v)
    nf = np.linalg.norm(f)
    steps = 0
    for _ in range(max_iter):
        if nf < tol:
            break
        J = np.diag(Lm @ v) + v[:, None] * Lm
        try:
            dv = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            return v, np.inf, steps
        step = 1.0
        while step > 1e-6:
            v2 = v + step * dv
            f2 = F(v2)
            if np.linalg.norm(f2) < nf:
                break
            step /= 2
        v, f, nf = v2, f2, np.linalg.norm(f2)
        steps += 1
    return v, nf, steps


def solve_discrete_system(params, starts=None, n_starts=400, seed=0, exhaustive=True):
    """Independent multistart Newton solution of the discrete quadratic system."""
    p = params
    Lm = _shift_matrix(p)
    rhs = discrete_rhs(p)
    s = np.sqrt(np.abs(rhs))
    Ls = Lm * s[None, :] / s[:, None]  # unknowns u = v / s
    cs = rhs / s**2
    rng = np.random.default_rng(seed)
    found = []
    match = 1e4 * p.tol

    def add(u):
        v = u * s
        for w in found:
            if np.max(np.abs(w - v) / s) < max(match, 1e-7):
                return
        found.append(v)

    init = [np.asarray(u0, dtype=complex) / s for u0 in (starts or [])]
    target = 2 ** p.N
    k = 0
    while k < n_starts + len(init):
        if k < len(init):
            u0 = init[k]
        else:
            u0 = (rng.normal(size=p.N) + 1j * rng.normal(size=p.N)) * 1.5
        k += 1
        u, res, _ = _newton(u0, Ls, cs)
        if res < 1e-11:
            add(u)
            add(-u)
        if exhaustive and len(found) >= target:
            break
    if exhaustive and len(found) < target:
        raise IncompleteEnumeration(f"found {len(found)} of {target} solutions")
    found.sort(key=lambda v: tuple(np.round(np.concatenate([[z.real, z.imag] for z in v]), 8)))
    return [EigenvalueFunction(tuple(complex(z) for z in v), p) for v in found]


def match_solutions(found, reference, params):
    """Nearest-neighbour pairing; returns max relative distance."""
    worst = 0.0
    for t in reference:
        d = min(np.max(np.abs(f.vals - t.vals) / np.abs(t.vals)) for f in found)
        worst = max(worst, float(d))
    return worst


def q_table(t, params):
    """q^{(h)}_a for h = 0, 1; shape (N, 2)."""
    p = params
    q = np.zeros((p.N, 2), dtype=complex)
    for a, x in enumerate(p.xi):
        ax = p.a_xy(x)
        tv = t.vals[a]
        zero = 1e3 * p.tol * max(1.0, abs(p.d(x - p.eta)))
        if abs(ax) > zero:
            q[a] = (1.0, tv / ax)
        elif abs(tv) > zero:
            q[a] = (ax / tv, 1.0)
        else:
            raise ZeroQPair(f"q pair vanishes at site {a + 1}")
    return q


def t_q_ratio_check(t, params):
    """Both expressions of q1/q0 agree: t(xi)/a_xy(xi) = d(xi - eta)/t(xi - eta)."""
    p = params
    r1 = t.vals / p.a_xy(p.xi_arr)
    r2 = p.d(p.xi_arr - p.eta) / t.shifted_values()
    return float(np.max(np.abs(r1 - r2) / np.abs(r1)))


def separate_coefficients(t, side, params, kappa=None):
    """SOV coordinates of the eigenstate (before the scalar-product weights)."""
    p = params
    k = p.kappa if kappa is None else kappa
    q = q_table(t, p)
    if side == "right":
        w = k ** -1 * np.exp(1j * p.y * p.eta) * p.a_xy(p.xi_arr) / p.d(p.xi_arr - p.eta)
    else:
        w = k * np.exp(1j * p.y * p.eta) * np.ones(p.N)
    out = np.zeros(p.dim, dtype=complex)
    for h in range(p.dim):
        hb = bits(h, p.N)
        c = np.prod(np.where(hb == 1, w * q[:, 1], q[:, 0]))
        out[h] = c * np.linalg.det(theta_gram(0, h, p))
    return out


def eigenstate_from_values(t, side, params, frame=None):
    """Separate-state eigenvector in the canonical basis of sector 0."""
    frame = frame or SovFrame(params)
    c = separate_coefficients(t, side, params)
    if side == "right":
        return frame.from_coords_right(c)
    return frame.from_coords_left(c)


def f_matrix(t, t2, params, phases=None):
    """F_{ab} = sum_h (e^{iy eta} a_xy(xi_a)/d(xi_a - eta))^h q_a^h q'_a^h vartheta_{b-1}(xi_a^{(h)} - xi_bar_0).

    ``phases`` (length 2) optionally multiplies the h = 0, 1 terms.
    """
    p = params
    q1, q2 = q_table(t, p), q_table(t2, p)
    xb = xi_bar(p, 0)
    w = np.exp(1j * p.y * p.eta) * p.a_xy(p.xi_arr) / p.d(p.xi_arr - p.eta)
    ph = (1.0, 1.0) if phases is None else phases
    F = np.zeros((p.N, p.N), dtype=complex)
    for h in (0, 1):
        pts = p.xi_arr - p.eta * h
        V = vartheta_matrix(pts - xb, p.N, p.omega)
        F += (ph[h] * (w ** h) * q1[:, h] * q2[:, h])[:, None] * V
    return F


def scalar_product_det(t, t2, params):
    return complex(np.linalg.det(f_matrix(t, t2, params)))


def collinearity(u, v):
    """Sine of the angle between two complex vectors (0 when collinear)."""
    u = np.asarray(u) / np.linalg.norm(u)
    v = np.asarray(v) / np.linalg.norm(v)
    return float(np.linalg.norm(v - (u.conj() @ v) * u))

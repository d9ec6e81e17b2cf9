"""Left and right separation-of-variables bases and their scalar products.

Left states ``<r,h|`` are obtained from the reference covector (all spins up,
height t_{r,0}) by acting with C(xi_n) on the sites where h_n = 1; right states
``|h,r>`` from the reference vector (all spins down, height t_{r,1}) by acting
with C(xi_n - eta) where h_n = 0.  The reference normalisation is 1, so the
diagonal scalar products agree with the theta-determinant formula only up to
one constant, which is calibrated at (r, h) = (0, 0).
"""
from dataclasses import dataclass

import numpy as np

from .elliptic import vartheta_matrix
from .errors import RankDeficient
from .repspace import Representation, bits, popcount


@dataclass
class SovBasis:
    """2^N states of one side in sector r; ``vectors[h]`` is the state with label h."""

    side: str
    r: int
    vectors: np.ndarray
    norm_constant: complex = 1.0


def shifted_xi(params, h):
    """xi_a^{(h_a)} = xi_a - eta*h_a."""
    return params.xi_arr - params.eta * bits(h, params.N)


def build_sov(side, r, params, rep=None, rank_tol=1e-10):
    p = params
    rep = rep or Representation(p)
    N, D = p.N, p.dim
    vecs = np.zeros((D, D), dtype=complex)
    if side == "left":
        C = [rep.entry("C", xi).block(r) / p.d(xi - p.eta) for xi in p.xi]
        for h in range(D):
            v = np.zeros(D, dtype=complex)
            v[0] = 1.0
            for n in range(N):
                if (h >> n) & 1:
                    v = v @ C[n]
            vecs[h] = v
    elif side == "right":
        C = [rep.entry("C", xi - p.eta).block(r) / p.d(xi - p.eta) for xi in p.xi]
        for h in range(D):
            v = np.zeros(D, dtype=complex)
            v[D - 1] = 1.0
            for n in reversed(range(N)):
                if not (h >> n) & 1:
                    v = C[n] @ v
            vecs[h] = v
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    sv = np.linalg.svd(vecs, compute_uv=False)
    if sv[-1] < rank_tol * sv[0]:
        raise RankDeficient(f"{side} SOV states in sector {r} are dependent "
                            f"(singular value ratio {sv[-1] / sv[0]:.2e})")
    return SovBasis(side, r, vecs)


class SovFrame:
    """Both bases on a range of sectors, with the calibrated scalar-product constant."""

    def __init__(self, params, rep=None, sectors=(0,)):
        self.p = params
        self.rep = rep or Representation(params)
        self.left = {}
        self.right = {}
        for r in sectors:
            self.ensure(r)
        self.c_tilde = self._calibrate()

    def ensure(self, r):
        if r not in self.left:
            self.left[r] = build_sov("left", r, self.p, self.rep)
            self.right[r] = build_sov("right", r, self.p, self.rep)
        return self.left[r], self.right[r]

    def gram(self, r, r2=None):
        r2 = r if r2 is None else r2
        L, _ = self.ensure(r)
        _, R = self.ensure(r2)
        if r != r2:
            return np.zeros((self.p.dim, self.p.dim), dtype=complex)
        return L.vectors @ R.vectors.T

    def _calibrate(self):
        g = self.gram(0)[0, 0]
        return g * np.linalg.det(theta_gram(0, 0, self.p))

    def norm_formula(self, r, h):
        """Calibrated closed form of <r,h|h,r>."""
        p = self.p
        return (self.c_tilde * p.theta(p.height(r, p.dim - 1)) / p.theta(p.height(0, p.dim - 1))
                * np.exp(-1j * p.y * p.eta * popcount(h)) / np.linalg.det(theta_gram(r, h, p)))

    def coords_right(self, vec, r=0):
        """SOV coordinates c_h with vec = sum_h c_h |h,r>."""
        L, _ = self.ensure(r)
        g = np.diag(self.gram(r))
        return (L.vectors @ vec) / g

    def from_coords_right(self, coeffs, r=0):
        _, R = self.ensure(r)
        return np.asarray(coeffs) @ R.vectors

    def from_coords_left(self, coeffs, r=0):
        L, _ = self.ensure(r)
        return np.asarray(coeffs) @ L.vectors


def xi_bar(params, r):
    return (params.xi_arr.sum() + params.height(r, 0)) / params.N


def theta_gram(r, h, params):
    """Matrix Theta^{(r,h)}_{ij} = vartheta_{j-1}(xi_i^{(h_i)} - xi_bar_r)."""
    return vartheta_matrix(shifted_xi(params, h) - xi_bar(params, r), params.N, params.omega)


# closed-form actions ---------------------------------------------------------

def d_coeff(params, r, h, lam):
    """d_{r,h}(lam)."""
    p = params
    one = p.dim - 1
    return (np.exp(-0.5j * p.y * p.eta * (p.s_value(h) - p.s_value(one)))
            * p.theta(p.height(r, h)) / p.theta(p.height(r, one))
            * np.prod(p.theta(lam - shifted_xi(p, h))))


def a_pm(params, sign, r, h, lam):
    """a^{(+-)}_{x,y,r,h}(lam)."""
    p = params
    e = sign * p.eta
    return (p.sign * np.exp(2j * p.y * r * p.eta) * p.theta(p.height(r, h) + e)
            / p.theta(p.height(-r, h) + e) * p.a(lam))


def _interp_terms(params, h, lam, t):
    p = params
    xs = shifted_xi(p, h)
    out = []
    for a in range(p.N):
        c = np.exp(1j * p.y * (xs[a] - lam)) * p.theta(t - lam + xs[a]) / p.theta(t)
        for b in range(p.N):
            if b != a:
                c = c * p.theta(lam - xs[b]) / p.theta(xs[a] - xs[b])
        out.append(c)
    return out


def action_terms(op, side, params, r, h, lam):
    """List of (target label, target sector, coefficient) for the closed-form action."""
    p = params
    N = p.N
    hb = bits(h, N)
    xs = shifted_xi(p, h)
    if op == "D":
        if side == "left":
            return [(h, r - 1, d_coeff(p, r - 1, h, lam))]
        return [(h, r + 1, d_coeff(p, r + 1, h, lam))]
    terms = []
    if op == "C":
        w = _interp_terms(p, h, lam, p.height(r, h))
        for a in range(N):
            if side == "left" and hb[a] == 0:
                terms.append((h | (1 << a), r, w[a] * p.d(p.xi[a] - p.eta * (1 - hb[a]))))
            if side == "right" and hb[a] == 1:
                terms.append((h & ~(1 << a), r, w[a] * p.d(xs[a])))
        return terms
    if op == "B":
        w = _interp_terms(p, h, lam, p.height(-r, h))
        for a in range(N):
            if side == "left" and hb[a] == 1:
                x1 = p.xi[a] - p.eta * (1 - hb[a])
                terms.append((h & ~(1 << a), r, w[a] * a_pm(p, -1, r, h, x1)))
            if side == "right" and hb[a] == 0:
                terms.append((h | (1 << a), r, w[a] * a_pm(p, +1, r, h, xs[a])))
        return terms
    raise ValueError(f"no closed-form action for {op!r}")


def sov_action_check(op, lam, frame, r=0, side="both"):
    """Max relative deviation between matrix and closed-form actions on the basis of sector r."""
    p = frame.p
    rep = frame.rep
    sides = ("left", "right") if side == "both" else (side,)
    worst = 0.0
    for sd in sides:
        if op in ("C", "B", "D"):
            for h in range(p.dim):
                if sd == "left":
                    L, _ = frame.ensure(r)
                    if op == "D":
                        got = rep.entry("D", lam).apply_left(L.vectors[h], r - 1)
                    else:
                        got = rep.entry(op, lam).apply_left(L.vectors[h], r)
                else:
                    _, R = frame.ensure(r)
                    got = rep.entry(op, lam).apply(R.vectors[h], r)
                src = (L.vectors[h] if sd == "left" else R.vectors[h])
                blk = rep.entry(op, lam).block(r - 1 if (op == "D" and sd == "left") else r)
                ref = np.abs(blk).max() * np.abs(src).max()
                want = np.zeros(p.dim, dtype=complex)
                for h2, r2, c in action_terms(op, sd, p, r, h, lam):
                    Lb, Rb = frame.ensure(r2)
                    want = want + c * (Lb.vectors[h2] if sd == "left" else Rb.vectors[h2])
                scale = max(np.abs(got).max(), np.abs(want).max(), ref, 1e-300)
                worst = max(worst, float(np.abs(got - want).max() / scale))
        elif op == "D_static":
            # D(lam|tau) = calD(lam) T^+ on both sides
            lhs = rep.entry("D_static", lam)
            rhs = rep.entry("D", lam) @ rep.shift_op(1)
            worst = max(worst, float(np.abs(lhs.block(r) - rhs.block(r)).max()
                                     / np.abs(lhs.block(r)).max()))
        elif op == "A":
            # quantum determinant on the SOV states
            eta = p.eta
            pref = rep.diagonal(lambda t, s: np.exp(1j * p.y * eta * s) * p.theta(t + eta * s) / p.theta(t))
            op_ = pref @ (rep.entry("A", lam) @ rep.entry("D", lam - eta)
                          - rep.entry("B", lam) @ rep.entry("C", lam - eta))
            _, R = frame.ensure(r)
            q = p.qdet(lam)
            for h in range(p.dim):
                got = op_.apply(R.vectors[h], r)
                worst = max(worst, float(np.abs(got - q * R.vectors[h]).max()
                                         / (abs(q) * np.abs(R.vectors[h]).max())))
        else:
            raise ValueError(f"unknown operator {op!r}")
    return worst


def sov_gram(r, frame):
    """Return (off-diagonal ratio, max relative deviation from the calibrated formula)."""
    G = frame.gram(r)
    diag = np.diag(G)
    off = np.abs(G - np.diag(diag)).max() / np.abs(diag).max()
    formula = np.array([frame.norm_formula(r, h) for h in range(frame.p.dim)])
    dev = np.abs(diag - formula).max() / np.abs(formula).max()
    return float(off), float(dev)


def ratio_checks(r, frame):
    """Max deviation of the two ratio identities between diagonal scalar products."""
    p = frame.p
    g = np.diag(frame.gram(r))
    g1 = np.diag(frame.gram(r + 1))
    one = p.dim - 1
    th = p.theta
    worst = 0.0
    for h in range(p.dim):
        want = (th(p.height(r, h)) * th(p.height(r + 1, one))
                / (th(p.height(r, one)) * th(p.height(r + 1, h))))
        worst = max(worst, abs(g1[h] / g[h] - want) / abs(want))
        for a in range(p.N):
            if (h >> a) & 1:
                continue
            h2 = h | (1 << a)
            xs = shifted_xi(p, h)
            want = np.exp(-1j * p.y * p.eta) * th(p.height(r, h)) / th(p.height(r, h2))
            for b in range(p.N):
                if b != a:
                    want *= th(p.xi[a] - xs[b]) / th(p.xi[a] - p.eta - xs[b])
            worst = max(worst, abs(g[h2] / g[h] - want) / abs(want))
    return float(worst)


def identity_resolution_check(r, frame):
    L, R = frame.ensure(r)
    g = np.diag(frame.gram(r))
    P = (R.vectors.T / g) @ L.vectors
    return float(np.abs(P - np.eye(frame.p.dim)).max())


def quasi_periodicity_check(lam, rep, r=0):
    """Residuals of the lambda quasi-periodicity of D, e^{-iy lam}B and e^{iy lam}C."""
    p = rep.p
    om, eta, y, N = p.omega, p.eta, p.y, p.N
    base = np.exp(2j * (p.xi_arr - eta / 2).sum())
    fac = (-np.exp(-2j * lam - 1j * np.pi * om)) ** N * base
    S = rep.spin_s().block(r)
    St = rep.s_tau().block(r)

    def expm_diag(M, c):
        return np.diag(np.exp(c * np.diag(M)))

    out = {}
    D0 = rep.entry("D", lam)
    Dp = rep.entry("D", lam + np.pi)
    Dw = rep.entry("D", lam + np.pi * om)
    sc = np.abs(D0.block(r)).max()
    out["D_pi"] = np.abs(Dp.block(r) - (-1) ** N * D0.block(r)).max() / sc
    # D raises the sector: e^{i eta S} commutes with D
    out["D_omega"] = np.abs(Dw.block(r) - fac * expm_diag(rep.spin_s().block(r + 1), 1j * eta)
                            @ D0.block(r)).max() / (sc * abs(fac))
    for name, sgn in (("B", -1), ("C", +1)):
        f = lambda l: np.exp(sgn * 1j * y * l) * rep.entry(name, l).block(r)
        X0 = f(lam)
        s = np.abs(X0).max()
        out[f"{name}_pi"] = np.abs(f(lam + np.pi) - (-1) ** N * X0).max() / s
        out[f"{name}_omega"] = np.abs(f(lam + np.pi * om) - fac * expm_diag(St, sgn * 1j) @ X0).max() / (s * abs(fac))
    return {k: float(v) for k, v in out.items()}

"""Brute-force representation of the dynamical 6-vertex monodromy matrix.

States of the truncated dynamical-spin space are labelled by a spin
configuration ``h`` (an integer, bit ``n-1`` is h_n, so h_1 is the least
significant bit; h_n = 0 is spin up) and a sector index ``r``.  The height
attached to ``(h, r)`` is

    t_{r,h} = t0 + eta * (|h| + r),     t0 = -eta*N/2 + x*pi/2 + y*pi*omega/2,

where |h| is the number of down spins.  Every operator we need maps sector
``r`` into sector ``r + shift`` for a fixed integer ``shift``, so operators are
stored sector by sector (see :class:`SectorOperator`).
"""
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property

import numpy as np

from .elliptic import lattice_coords, lattice_distance, theta1
from .errors import InvalidModel, PoleAtHeight, WindowOverflow

DEFAULT_ETA = 0.377 + 0.411j


def popcount(h):
    return bin(h).count("1")


def bits(h, N):
    """Array (h_1, ..., h_N) for the integer label h."""
    return np.array([(h >> n) & 1 for n in range(N)], dtype=int)


def seeded_xi(N, seed, eta=DEFAULT_ETA, omega=1j, tol=1e-12, margin=0.05):
    """Inhomogeneities drawn from a fixed box, redrawn until they are generic."""
    rng = np.random.default_rng(seed)
    for _ in range(10000):
        xi = rng.uniform(0.0, 2.6, N) + 1j * rng.uniform(-0.25, 0.25, N)
        if _xi_violation(xi, eta, omega, max(margin, 1e3 * tol)) is None:
            return tuple(complex(v) for v in xi)
    raise InvalidModel("could not draw generic inhomogeneities")


def _xi_violation(xi, eta, omega, threshold):
    N = len(xi)
    for a in range(N):
        for b in range(N):
            if a == b:
                continue
            for eps in (-1, 0, 1):
                if lattice_distance(xi[a] - xi[b] + eps * eta, omega) < threshold:
                    return a, b, eps
    return None


def eta_is_generic(eta, omega, max_den=64, tol=1e-12):
    """False when eta lies (within tolerance) in pi*Q + pi*omega*Q with denominators <= max_den."""
    a, b = lattice_coords(eta, omega)
    for c in (float(a), float(b)):
        f = Fraction(c).limit_denominator(max_den)
        if abs(c - float(f)) > 1e3 * tol:
            return True
    return False


@dataclass(frozen=True)
class ModelParams:
    """All global parameters of one model instance."""

    N: int
    x: int = 0
    y: int = 1
    omega: complex = 1j
    eta: complex = DEFAULT_ETA
    xi: tuple = ()
    kappa: complex = 1.0
    tol: float = 1e-12
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "omega", complex(self.omega))
        object.__setattr__(self, "eta", complex(self.eta))
        object.__setattr__(self, "kappa", complex(self.kappa))
        object.__setattr__(self, "xi", tuple(complex(v) for v in self.xi))
        if self.N < 1:
            raise InvalidModel("N must be positive")
        if self.x not in (0, 1) or self.y not in (0, 1):
            raise InvalidModel("x and y must be 0 or 1")
        if self.omega.imag <= 0:
            raise InvalidModel("Im(omega) must be positive")
        if self.kappa == 0:
            raise InvalidModel("kappa must be nonzero")
        if len(self.xi) != self.N:
            raise InvalidModel(f"expected {self.N} inhomogeneities, got {len(self.xi)}")
        if self.N % 2 == 0 and (self.x, self.y) == (0, 0):
            raise InvalidModel("(x, y) = (0, 0) is not allowed for even N")
        if self.check:
            bad = _xi_violation(self.xi, self.eta, self.omega, 1e3 * self.tol)
            if bad is not None:
                a, b, eps = bad
                raise InvalidModel(f"xi_{a + 1} - xi_{b + 1} + ({eps})*eta lies on the lattice")
            if not eta_is_generic(self.eta, self.omega, tol=self.tol):
                raise InvalidModel("eta is rational with respect to the periods")

    @classmethod
    def seeded(cls, N, x=0, y=1, seed=7, omega=1j, eta=DEFAULT_ETA, kappa=1.0, tol=1e-12):
        return cls(N, x, y, omega, eta, seeded_xi(N, seed, eta, omega), kappa, tol)

    def with_kappa(self, kappa):
        return replace(self, kappa=complex(kappa))

    # scalar functions ---------------------------------------------------
    def theta(self, z):
        return theta1(z, self.omega)

    @property
    def dim(self):
        return 2**self.N

    @cached_property
    def xi_arr(self):
        return np.array(self.xi, dtype=complex)

    @property
    def t0(self):
        return -self.eta * self.N / 2 + self.x * np.pi / 2 + self.y * np.pi * self.omega / 2

    @property
    def sign(self):
        """(-1)^(x + y + xy)."""
        return (-1) ** (self.x + self.y + self.x * self.y)

    def height(self, r, h):
        """t_{r,h}."""
        return self.t0 + self.eta * (popcount(h) + r)

    def s_value(self, h):
        return self.N - 2 * popcount(h)

    def a(self, lam):
        lam = np.asarray(lam, dtype=complex)
        return np.prod(self.theta(np.subtract.outer(lam, self.xi_arr) + self.eta), axis=-1)

    def d(self, lam):
        lam = np.asarray(lam, dtype=complex)
        return np.prod(self.theta(np.subtract.outer(lam, self.xi_arr)), axis=-1)

    def a_xy(self, lam):
        return self.sign * self.a(lam)

    def qdet(self, lam):
        return self.a(lam) * self.d(lam - self.eta)


# ---------------------------------------------------------------------------
# R-matrix

def r_matrix(lam, t, params, y=None):
    """4x4 dynamical R-matrix in the basis ++, +-, -+, --."""
    p = params
    y = p.y if y is None else y
    th = p.theta
    eta = p.eta
    tht, thmt = th(t), th(-t)
    if abs(tht) < 1e3 * p.tol * max(1.0, abs(th(0.5))):
        raise PoleAtHeight(f"theta(t) vanishes at t={t!r}")
    a = th(lam + eta)
    b_p = th(lam) * th(t + eta) / tht
    b_m = th(lam) * th(-t + eta) / thmt
    c_p = th(eta) * th(t + lam) / tht
    c_m = th(eta) * th(-t + lam) / thmt
    R = np.zeros((4, 4), dtype=complex)
    R[0, 0] = R[3, 3] = a
    R[1, 1] = np.exp(1j * y * eta) * b_p
    R[1, 2] = np.exp(1j * y * lam) * c_p
    R[2, 1] = np.exp(-1j * y * lam) * c_m
    R[2, 2] = np.exp(-1j * y * eta) * b_m
    return R


def _embed3(R_of_t, pair, spectator, t, eta):
    """8x8 operator on V1 V2 V3 (index 4*s1 + 2*s2 + s3) acting as R on ``pair``.

    The height is t + eta*sigma^z of the spectator space (None means no shift).
    """
    out = np.zeros((8, 8), dtype=complex)
    p, q = pair
    for col in range(8):
        s = [(col >> 2) & 1, (col >> 1) & 1, col & 1]
        tt = t if spectator is None else t + eta * (1 - 2 * s[spectator])
        R = R_of_t(tt)
        cin = 2 * s[p] + s[q]
        for rin in range(4):
            v = R[rin, cin]
            if v == 0:
                continue
            s2 = list(s)
            s2[p], s2[q] = rin >> 1, rin & 1
            out[4 * s2[0] + 2 * s2[1] + s2[2], col] += v
    return out


def dybe_residual(l1, l2, l3, t, params):
    """Max-norm of LHS - RHS of the dynamical Yang-Baxter equation."""
    p, eta = params, params.eta
    R = lambda lam: (lambda tt: r_matrix(lam, tt, p))
    lhs = (_embed3(R(l1 - l2), (0, 1), 2, t, eta)
           @ _embed3(R(l1 - l3), (0, 2), None, t, eta)
           @ _embed3(R(l2 - l3), (1, 2), 0, t, eta))
    rhs = (_embed3(R(l2 - l3), (1, 2), None, t, eta)
           @ _embed3(R(l1 - l3), (0, 2), 1, t, eta)
           @ _embed3(R(l1 - l2), (0, 1), None, t, eta))
    return float(np.max(np.abs(lhs - rhs)))


def gauge_y1_check(l1, l2, t, params):
    """Residual of the statement that the y=1 R-matrix is a dynamical gauge transform of y=0."""
    p = params
    eta = p.eta
    sz = np.array([1, -1])

    def G(lam, tt):
        return np.exp(-0.5j * tt) * np.exp(0.5j * lam * sz)

    # diagonal factors on V1 V2, index 2*s1 + s2
    g2_t = np.array([G(l2, t)[s2] for s1 in (0, 1) for s2 in (0, 1)])
    g1_shift2 = np.array([G(l1, t + eta * sz[s2])[s1] for s1 in (0, 1) for s2 in (0, 1)])
    g2_shift1 = np.array([G(l2, t + eta * sz[s1])[s2] for s1 in (0, 1) for s2 in (0, 1)])
    g1_t = np.array([G(l1, t)[s1] for s1 in (0, 1) for s2 in (0, 1)])
    R0 = r_matrix(l1 - l2, t, p, y=0)
    R1 = r_matrix(l1 - l2, t, p, y=1)
    rhs = np.diag(g2_t * g1_shift2) @ R0 @ np.diag(1 / (g2_shift1 * g1_t))
    return float(np.max(np.abs(R1 - rhs)))


# ---------------------------------------------------------------------------
# monodromy at scalar height

def monodromy(lam, t, params):
    """M(lam|t) as an array of shape (2, 2, 2^N, 2^N): M[i, j] = <i|_0 M |j>_0.

    M(lam|t) = R_{0N}(lam - xi_N | t + eta*sum_{a<N} sz_a) ... R_{01}(lam - xi_1 | t).
    """
    p = params
    N, D = p.N, p.dim
    hs = np.arange(D)
    M = np.zeros((2, 2, D, D), dtype=complex)
    M[0, 0] = M[1, 1] = np.eye(D)
    for n in range(N):
        below = hs & ((1 << n) - 1)
        heights = t + p.eta * np.array([n - 2 * popcount(int(b)) for b in below])
        F = np.zeros((2, 2, D, D), dtype=complex)
        cache = {}
        for h in hs:
            key = int(below[h])
            if key not in cache:
                cache[key] = r_matrix(lam - p.xi[n], heights[h], p)
            R = cache[key]
            hn = (h >> n) & 1
            for i in (0, 1):
                for j in (0, 1):
                    for hn2 in (0, 1):
                        v = R[2 * i + hn2, 2 * j + hn]
                        if v != 0:
                            h2 = (h & ~(1 << n)) | (hn2 << n)
                            F[i, j, h2, h] += v
        M = np.einsum("ijab,jkbc->ikac", F, M)
    return M


# ---------------------------------------------------------------------------
# sector operators

class SectorOperator:
    """Operator on the dynamical-spin space mapping sector r to sector r + shift.

    ``block(r)`` is the 2^N x 2^N matrix from sector ``r`` (columns, indexed by h)
    to sector ``r + shift`` (rows).  Blocks are produced lazily by ``builder``.
    Kets are column vectors; bras are row vectors acted on from the right.
    """

    def __init__(self, shift, builder, window, dim):
        self.shift = int(shift)
        self._builder = builder
        self.window = tuple(window)
        self.dim = dim
        self._cache = {}

    def block(self, r):
        lo, hi = self.window
        if not (lo <= r <= hi and lo <= r + self.shift <= hi):
            raise WindowOverflow(f"sector {r} -> {r + self.shift} outside window {self.window}")
        if r not in self._cache:
            self._cache[r] = np.asarray(self._builder(r), dtype=complex)
        return self._cache[r]

    def apply(self, vec, r):
        """Ket in sector r -> ket in sector r + shift."""
        return self.block(r) @ vec

    def apply_left(self, vec, r):
        """Bra in sector r + shift -> bra in sector r."""
        return vec @ self.block(r)

    def _combine(self, other, f):
        if self.shift != other.shift:
            raise ValueError("cannot add operators with different shifts")
        window = (max(self.window[0], other.window[0]), min(self.window[1], other.window[1]))
        return SectorOperator(self.shift, lambda r: f(self.block(r), other.block(r)), window, self.dim)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __mul__(self, c):
        return SectorOperator(self.shift, lambda r: c * self.block(r), self.window, self.dim)

    __rmul__ = __mul__

    def __matmul__(self, other):
        """Composition self after other."""
        window = (max(self.window[0], other.window[0]), min(self.window[1], other.window[1]))
        return SectorOperator(self.shift + other.shift,
                              lambda r: self.block(r + other.shift) @ other.block(r),
                              window, self.dim)

    def sectors(self, margin=0):
        """Input sectors whose image stays ``margin`` steps inside the window."""
        lo, hi = self.window
        return [r for r in range(lo, hi + 1)
                if lo + margin <= r <= hi - margin and lo + margin <= r + self.shift <= hi - margin]

    def dense(self, window=None):
        """Dense matrix over the window; basis index (r - r_min) * 2^N + h."""
        lo, hi = window or self.window
        D = self.dim
        out = np.zeros(((hi - lo + 1) * D, (hi - lo + 1) * D), dtype=complex)
        for r in range(lo, hi + 1):
            r2 = r + self.shift
            if lo <= r2 <= hi:
                out[(r2 - lo) * D:(r2 - lo + 1) * D, (r - lo) * D:(r - lo + 1) * D] = self.block(r)
        return out


def default_window(N):
    return (-(N + 2), N + 2)


class Representation:
    """Monodromy entries of one model instance as sector operators (cached per lambda)."""

    def __init__(self, params, window=None):
        self.p = params
        self.window = tuple(window or default_window(params.N))
        self._mono = {}
        self._ops = {}
        D = params.dim
        self.weights = np.array([popcount(h) for h in range(D)])

    def mono(self, lam, m):
        """M(lam | t0 + eta*m)."""
        key = (complex(lam), int(m))
        if key not in self._mono:
            self._mono[key] = monodromy(lam, self.p.t0 + self.p.eta * m, self.p)
        return self._mono[key]

    def _entry_builder(self, i, j, lam, dyn):
        D = self.p.dim
        w = self.weights
        # T^+ lowers the height by eta (m -> m-1), T^- raises it
        dm = 0 if not dyn else (-1 if j == 0 else +1)

        def build(r):
            out = np.zeros((D, D), dtype=complex)
            for m in np.unique(r + w):
                cols = np.nonzero(r + w == m)[0]
                out[:, cols] = self.mono(lam, m + dm)[i, j][:, cols]
            return out

        # row sector: r' = m + dm - |h'| and |h'| = |h| + (j - i)
        return build, dm - (j - i)

    def entry(self, which, lam):
        """Sector operator for A, B, C, D (with shifts) or A_static, D_static."""
        key = (which, complex(lam))
        if key in self._ops:
            return self._ops[key]
        table = {"A": (0, 0, True), "B": (0, 1, True), "C": (1, 0, True), "D": (1, 1, True),
                 "A_static": (0, 0, False), "D_static": (1, 1, False),
                 "B_static": (0, 1, False), "C_static": (1, 0, False)}
        if which not in table:
            raise ValueError(f"unknown monodromy entry {which!r}")
        i, j, dyn = table[which]
        build, shift = self._entry_builder(i, j, lam, dyn)
        op = SectorOperator(shift, build, self.window, self.p.dim)
        self._ops[key] = op
        return op

    def entries(self, lam):
        """2x2 nested list of the dynamical monodromy entries [[A, B], [C, D]]."""
        return [[self.entry("A", lam), self.entry("B", lam)],
                [self.entry("C", lam), self.entry("D", lam)]]

    # diagonal operators ---------------------------------------------------
    def diagonal(self, f):
        """Shift-0 operator with entry f(t_{r,h}, s_h) on state (h, r)."""
        p = self.p
        D = p.dim
        s = np.array([p.s_value(h) for h in range(D)])

        def build(r):
            t = np.array([p.height(r, h) for h in range(D)])
            return np.diag(f(t, s).astype(complex))

        return SectorOperator(0, build, self.window, D)

    def tau(self):
        return self.diagonal(lambda t, s: t)

    def spin_s(self):
        return self.diagonal(lambda t, s: s + 0j)

    def s_tau(self):
        eta = self.p.eta
        return self.diagonal(lambda t, s: eta * s + 2 * t)

    def shift_op(self, k):
        """T^k with T = T^+ (lowers heights by eta, so r -> r - k)."""
        D = self.p.dim
        return SectorOperator(-k, lambda r: np.eye(D), self.window, D)

    def identity(self):
        return self.shift_op(0)

    def local_spin(self, n, i, j):
        """E_n^{ij} acting on site n (1-based); i, j in {0 (+), 1 (-)}."""
        D = self.p.dim
        E = np.zeros((D, D), dtype=complex)
        for h in range(D):
            if (h >> (n - 1)) & 1 == j:
                E[(h & ~(1 << (n - 1))) | (i << (n - 1)), h] = 1.0
        # E^{+-} (i=0, j=1) raises S by 2 with fixed height: |h| -> |h|-1 so r -> r+1
        return SectorOperator(j - i, lambda r: E, self.window, D)

    def transfer(self, lam, kappa=None):
        """Antiperiodic transfer matrix kappa^-1 B + kappa C (shift 0)."""
        k = self.p.kappa if kappa is None else complex(kappa)
        return (1 / k) * self.entry("B", lam) + k * self.entry("C", lam)


def build_monodromy_entry(which, lam, params, window=None):
    return Representation(params, window).entry(which, lam)


def build_antiperiodic_transfer(lam, params, rep=None):
    """r = 0 block of the antiperiodic transfer matrix."""
    rep = rep or Representation(params)
    return rep.transfer(lam).block(0)


def quantum_det_check(lam, params, rep=None, r=0):
    """Residuals of both quantum-determinant orderings and of the inversion relation.

    Returns ``(qdet_AD, qdet_DA, inversion)`` as max-norm deviations on sector ``r``,
    each relative to |a(lam) d(lam - eta)|.
    """
    p = params
    rep = rep or Representation(p)
    e1 = lambda w: rep.entry(w, lam)
    e2 = lambda w: rep.entry(w, lam - p.eta)
    dyn = rep.diagonal(lambda t, s: np.exp(1j * p.y * p.eta * s) * p.theta(t + p.eta * s) / p.theta(t)).block(r)
    q = p.qdet(lam)
    eye = np.eye(p.dim)
    ad = dyn @ ((e1("A") @ e2("D")).block(r) - (e1("B") @ e2("C")).block(r))
    da = dyn @ ((e1("D") @ e2("A")).block(r) - (e1("C") @ e2("B")).block(r))
    res_ad = np.max(np.abs(ad - q * eye)) / abs(q)
    res_da = np.max(np.abs(da - q * eye)) / abs(q)
    # M(lam) . sigma^y M(lam - eta)^t sigma^y = [[A D' - B C', B A' - A B'], [C D' - D C', D A' - C B']]
    off1 = (e1("B") @ e2("A")).block(r + 1) - (e1("A") @ e2("B")).block(r + 1)
    off2 = (e1("C") @ e2("D")).block(r - 1) - (e1("D") @ e2("C")).block(r - 1)
    inv_diag = np.linalg.inv(dyn)
    res_inv = max(np.max(np.abs((e1("A") @ e2("D")).block(r) - (e1("B") @ e2("C")).block(r) - q * inv_diag)),
                  np.max(np.abs((e1("D") @ e2("A")).block(r) - (e1("C") @ e2("B")).block(r) - q * inv_diag)),
                  np.max(np.abs(off1)), np.max(np.abs(off2))) / abs(q)
    return float(res_ad), float(res_da), float(res_inv)

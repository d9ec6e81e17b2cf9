"""Local operators, their reconstruction from the monodromy matrix, and determinant form factors.

Matrix elements are taken between the separate-state eigenvectors built by
:func:`sov6v.spectrum.eigenstate_from_values`.  With that normalisation the
direct matrix element equals ``frame.c_tilde`` times the determinant formulas
below, exactly as for the scalar product.
"""
from dataclasses import dataclass, field

import numpy as np

from .elliptic import vartheta_matrix
from .errors import InvalidHeight, SingularPropagator, ZeroEigenvalueAtInhomogeneity
from .repspace import Representation, SectorOperator
from .sovbasis import SovFrame, xi_bar
from .spectrum import brute_spectrum, eigenstate_from_values, f_matrix, q_table, scalar_product_det

SPIN_KINDS = ("++", "--", "+-", "-+")
_SIGN_INDEX = {"+": 0, "-": 1}


@dataclass(frozen=True)
class LocalOperator:
    """E_n^{ij} (kind in SPIN_KINDS) or the height projector at site n (kind "height").

    For heights, ``k`` selects the value s = t0 + k*eta with 0 <= k <= N.
    """

    kind: str
    n: int
    k: int = 0

    def validate(self, params):
        if not 1 <= self.n <= params.N:
            raise ValueError(f"site {self.n} outside 1..{params.N}")
        if self.kind == "height":
            if not 0 <= self.k <= params.N:
                raise InvalidHeight(f"height index {self.k} outside 0..{params.N}")
        elif self.kind not in SPIN_KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        return self


def height_index(s, params, tol=1e-9):
    """Integer k with s = t0 + k*eta, or InvalidHeight."""
    p = params
    k = (complex(s) - p.t0) / p.eta
    kr = int(round(k.real))
    if abs(k - kr) > tol or not 0 <= kr <= p.N:
        raise InvalidHeight(f"{s!r} is not t0 + k*eta with 0 <= k <= {p.N}")
    return kr


@dataclass
class FormFactorReport:
    formula: str          # ME1-first, ME1-second, ME2-first, ME2-second, ff-LH
    left: int             # index of t in the spectrum
    right: int            # index of t'
    n: int
    label: str            # "++", "--" or "s=k"
    value: complex        # determinant formula (without the frame constant)
    oracle: complex       # direct matrix element divided by the frame constant
    residual: float
    cond: float
    passed: bool = field(default=False)


# ---------------------------------------------------------------------------
# operators as matrices

def _height_projector(n, k, params, rep):
    """Oracle for the site-n height projector, built by the site recursion."""
    if n == 1:
        p = params
        return rep.diagonal(lambda t, s: np.isclose((t - p.t0) / p.eta, k, atol=1e-9).astype(float))
    up = _height_projector(n - 1, k - 1, params, rep) @ rep.local_spin(n - 1, 0, 0)
    down = _height_projector(n - 1, k + 1, params, rep) @ rep.local_spin(n - 1, 1, 1)
    return up + down


def local_operator_matrix(op, params, rep=None):
    """SectorOperator of a local spin or height operator on the canonical basis."""
    op.validate(params)
    rep = rep or Representation(params)
    if op.kind == "height":
        return _height_projector(op.n, op.k, params, rep)
    i, j = (_SIGN_INDEX[c] for c in op.kind)
    return rep.local_spin(op.n, i, j)


# ---------------------------------------------------------------------------
# inverse problem

def _inverse(op, cond_max=1e12):
    def build(r):
        B = op.block(r)
        if np.linalg.cond(B) > cond_max:
            raise SingularPropagator(f"transfer matrix singular on sector {r}")
        return np.linalg.inv(B)

    return SectorOperator(-op.shift, build, op.window, op.dim)


def _twisted_entry(rep, j, i, lam):
    """[Y M(lam)]_{ji} with Y = [[0, kappa], [1/kappa, 0]]."""
    k = rep.p.kappa
    table = {(0, 0): (k, "C"), (0, 1): (k, "D"), (1, 0): (1 / k, "A"), (1, 1): (1 / k, "B")}
    c, w = table[(j, i)]
    return c * rep.entry(w, lam)


def _twisted_inverse_entry(rep, j, i, lam):
    """[(Y M(lam))^{-1}]_{ji} from the inversion relation (M^{-1} = adj . Delta^{-1}, Y^{-1} = Y)."""
    p = rep.p
    k = p.kappa
    lm = lam - p.eta
    q = p.qdet(lam)
    inv_delta = rep.diagonal(lambda t, s: np.exp(1j * p.y * p.eta * s) * p.theta(t + p.eta * s) / (p.theta(t) * q))
    adj = [[rep.entry("D", lm), -1 * rep.entry("B", lm)],
           [-1 * rep.entry("C", lm), rep.entry("A", lm)]]
    Y = [[0, k], [1 / k, 0]]
    # (M^{-1} Y)_{ji} = sum_m M^{-1}_{jm} Y_{mi}; only one m survives
    m = 1 - i
    return Y[m][i] * (adj[j][m] @ inv_delta)


def _chain(ops):
    out = ops[0]
    for o in ops[1:]:
        out = out @ o
    return out


def inverse_problem_residuals(n, i, j, params, rep=None, r=0):
    """Max-norm deviation of E_n^{ij} from each applicable reconstruction on sector r.

    i, j are 0 (+) or 1 (-).  Keys: "inv-pb1", "inv-pb2", and for diagonal
    operators the two antiperiodic forms "IP-first", "IP-second".
    """
    p = params
    rep = rep or Representation(p)
    T = [rep.transfer(x) for x in p.xi]
    Tinv = [_inverse(t) for t in T]
    E = rep.local_spin(n, i, j)
    # T_tau^{j-i} with the +/- signs read as +1/-1
    shift = rep.shift_op(2 * (i - j))
    ident = rep.identity()
    left = lambda m: _chain([ident] + T[:m])
    right = lambda m: _chain([ident] + Tinv[:m][::-1])
    out = {}
    rec1 = left(n - 1) @ _twisted_entry(rep, j, i, p.xi[n - 1]) @ right(n) @ shift
    rec2 = left(n) @ _twisted_inverse_entry(rep, j, i, p.xi[n - 1]) @ right(n - 1) @ shift
    ref = E.block(r)
    out["inv-pb1"] = float(np.max(np.abs(rec1.block(r) - ref)))
    out["inv-pb2"] = float(np.max(np.abs(rec2.block(r) - ref)))
    if i == j:
        k = p.kappa
        xn = p.xi[n - 1]
        first = (k * rep.entry("C", xn)) if i == 0 else ((1 / k) * rep.entry("B", xn))
        second = ((1 / k) * rep.entry("B", xn - p.eta)) if i == 0 else (k * rep.entry("C", xn - p.eta))
        # e^{iy eta S} theta(tau + eta S)/theta(tau) is the constant -sign on sector 0
        second = (p.sign / p.qdet(xn)) * second
        out["IP-first"] = float(np.max(np.abs((left(n - 1) @ first @ right(n)).block(r) - ref)))
        out["IP-second"] = float(np.max(np.abs((left(n) @ second @ right(n - 1)).block(r) - ref)))
    return out


def inverse_problem_check(n, i, j, params, rep=None):
    """Largest residual over all reconstructions of E_n^{ij}."""
    return max(inverse_problem_residuals(n, i, j, params, rep).values())


def height_reconstruction_check(n, k, params, rep=None):
    """Height projector at site n from conjugating the site-1 projector by transfer matrices."""
    p = params
    rep = rep or Representation(p)
    T = [rep.transfer(x) for x in p.xi]
    Tinv = [_inverse(t) for t in T]
    ident = rep.identity()
    rec = _chain([ident] + T[:n - 1] + [_height_projector(1, k, p, rep)] + Tinv[:n - 1][::-1])
    return float(np.max(np.abs(rec.block(0) - _height_projector(n, k, p, rep).block(0))))


# ---------------------------------------------------------------------------
# determinant formulas

def _guard(t, params):
    bad = np.abs(t.vals) < 1e3 * params.tol
    if np.any(bad):
        raise ZeroEigenvalueAtInhomogeneity(f"t(xi_{int(np.argmax(bad)) + 1}) vanishes")


def bordered_matrix(t, t2, lam, params):
    """(N+1)x(N+1) matrix S_{t,t'}(lam): F bordered by one q-column and one theta-row."""
    p = params
    N = p.N
    q1, q2 = q_table(t, p), q_table(t2, p)
    S = np.zeros((N + 1, N + 1), dtype=complex)
    S[:N, :N] = f_matrix(t, t2, p)
    S[:N, N] = np.exp(1j * p.y * p.xi_arr) * p.a_xy(p.xi_arr) * q1[:, 0] * q2[:, 1]
    S[N, :N] = -np.exp(-1j * p.y * lam) * vartheta_matrix(np.array([lam - xi_bar(p, 0)]), N, p.omega)[0]
    return S


def _spin_parts(t, t2, n, kind, which, params):
    p = params
    _guard(t, p)
    _guard(t2, p)
    xn = p.xi[n - 1]
    if which == "first":
        pre = np.prod(t.vals[:n - 1]) / np.prod(t2.vals[:n])
        S = bordered_matrix(t, t2, xn, p) if kind == "++" else bordered_matrix(t2, t, xn, p)
    elif which == "second":
        pre = p.sign * np.prod(t.vals[:n]) / np.prod(t2.vals[:n - 1]) / p.qdet(xn)
        S = bordered_matrix(t2, t, xn - p.eta, p) if kind == "++" else bordered_matrix(t, t2, xn - p.eta, p)
    else:
        raise ValueError(f"which must be 'first' or 'second', got {which!r}")
    return pre, S


def ff_spin_det(t, t2, n, kind, which, params):
    """<t| E_n^{kind} |t'> (up to the frame constant) from a bordered determinant."""
    if kind not in ("++", "--"):
        raise ValueError("determinant formulas exist only for E^{++} and E^{--}")
    pre, S = _spin_parts(t, t2, n, kind, which, params)
    return complex(pre * np.linalg.det(S))


def height_matrix(t, t2, j, params):
    """F-matrix with the h=1 terms weighted by exp(2 pi i j / (N+1))."""
    return f_matrix(t, t2, params, phases=(1.0, np.exp(2j * np.pi * j / (params.N + 1))))


def ff_height_terms(t, t2, n, k, params):
    """The N+1 Fourier terms whose sum is the height form factor (prefactor included)."""
    p = params
    if not 0 <= k <= p.N:
        raise InvalidHeight(f"height index {k} outside 0..{p.N}")
    _guard(t, p)
    _guard(t2, p)
    pre = np.prod(t.vals[:n - 1] / t2.vals[:n - 1])
    N1 = p.N + 1
    return np.array([pre * np.exp(-2j * np.pi * j * k / N1) * np.linalg.det(height_matrix(t, t2, j, p)) / N1
                     for j in range(N1)])


def ff_height_det(t, t2, n, s, params):
    """<t| height projector at site n onto s |t'> (up to the frame constant).

    ``s`` is either the height value t0 + k*eta or, if an int, k itself.
    """
    k = s if isinstance(s, (int, np.integer)) else height_index(s, params)
    return complex(ff_height_terms(t, t2, n, k, params).sum())


# ---------------------------------------------------------------------------
# batch cross-check

def _oracles(params, spectrum, frame, rep):
    L = [eigenstate_from_values(m.t, "left", params, frame) for m in spectrum]
    R = [eigenstate_from_values(m.t, "right", params, frame) for m in spectrum]
    return L, R


def ff_crosscheck_suite(params, spectrum=None, frame=None, rep=None, tol=1e-7):
    """Every determinant form factor against the direct matrix element.

    Returns ``(reports, sums)``; ``sums`` holds the completeness residuals, one
    dict per (t, t') pair.  Residuals are relative to
    max(|oracle|, sqrt(|<t|t><t'|t'>|)) so that vanishing elements are handled.
    """
    p = params
    rep = rep or Representation(p)
    frame = frame or SovFrame(p, rep)
    spectrum = spectrum or brute_spectrum(p, rep)
    L, R = _oracles(p, spectrum, frame, rep)
    c = frame.c_tilde
    norms = [abs(L[a] @ R[a] / c) for a in range(len(spectrum))]
    spin_ops = {(n, kind): local_operator_matrix(LocalOperator(kind, n), p, rep).block(0)
                for n in range(1, p.N + 1) for kind in ("++", "--")}
    height_ops = {(n, k): local_operator_matrix(LocalOperator("height", n, k), p, rep).block(0)
                  for n in range(1, p.N + 1) for k in range(p.N + 1)}
    reports, sums = [], []
    for a, ma in enumerate(spectrum):
        for b, mb in enumerate(spectrum):
            scale = float(np.sqrt(norms[a] * norms[b]))
            sp = scalar_product_det(ma.t, mb.t, p)

            def add(formula, n, label, value, oracle, cond):
                res = abs(value - oracle) / max(abs(oracle), scale)
                reports.append(FormFactorReport(formula, a, b, n, label, complex(value), complex(oracle),
                                                float(res), float(cond), bool(res < tol)))

            for n in range(1, p.N + 1):
                spin_vals = {}
                for kind, name in (("++", "ME1"), ("--", "ME2")):
                    oracle = L[a] @ spin_ops[(n, kind)] @ R[b] / c
                    for which in ("first", "second"):
                        pre, S = _spin_parts(ma.t, mb.t, n, kind, which, p)
                        v = pre * np.linalg.det(S)
                        spin_vals[(kind, which)] = v
                        add(f"{name}-{which}", n, kind, v, oracle, np.linalg.cond(S))
                hsum = 0
                for k in range(p.N + 1):
                    oracle = L[a] @ height_ops[(n, k)] @ R[b] / c
                    v = ff_height_terms(ma.t, mb.t, n, k, p).sum()
                    hsum += v
                    cond = max(np.linalg.cond(height_matrix(ma.t, mb.t, j, p)) for j in range(p.N + 1))
                    add("ff-LH", n, f"s={k}", v, oracle, cond)
                sums.append({
                    "left": a, "right": b, "n": n,
                    "branches": float(max(abs(spin_vals[(kd, "first")] - spin_vals[(kd, "second")])
                                          for kd in ("++", "--")) / scale),
                    "spin_sum": float(abs(spin_vals[("++", "first")] + spin_vals[("--", "first")] - sp) / scale),
                    "height_sum": float(abs(hsum - sp) / scale),
                })
    return reports, sums

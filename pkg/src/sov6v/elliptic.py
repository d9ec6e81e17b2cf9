"""Jacobi theta functions and the theta-function identities used by the rest of the package.

Conventions: the nome is ``q = exp(i*pi*omega)`` with ``Im(omega) > 0`` and

    theta1(z|omega) = -i * sum_k (-1)^k q^((k+1/2)^2) exp(2i(k+1/2)z)

so that ``theta1(z+pi) = -theta1(z)`` and
``theta1(z+pi*omega) = -exp(-i*pi*omega - 2iz) theta1(z)``.
The period lattice is ``Gamma = pi*Z + pi*omega*Z``.

A theta function of order ``n`` and norm ``alpha`` is an entire function with

    f(z+pi) = (-1)^n f(z),   f(z+pi*omega) = (-1)^n exp(2i*alpha - in(2z+pi*omega)) f(z),

i.e. a constant times ``prod_k theta1(z - z_k)`` with ``sum_k z_k = alpha``.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import IndependenceViolation, PoleOnLattice

DEFAULT_TOL = 1e-14
_CALIBRATION_SEED = 20240611


@dataclass(frozen=True)
class ThetaParams:
    """Half-period ratio plus series controls."""

    omega: complex = 1j
    series_cutoff: int = 0  # 0 means choose automatically
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "omega", complex(self.omega))
        if self.omega.imag <= 0:
            raise ValueError(f"Im(omega) must be positive, got {self.omega!r}")
        if self.series_cutoff < 0 or self.tol <= 0:
            raise ValueError("series_cutoff must be >= 0 and tol > 0")


def _omega(p):
    if isinstance(p, ThetaParams):
        return p.omega, p.series_cutoff, p.tol
    om = complex(p)
    if om.imag <= 0:
        raise ValueError(f"Im(omega) must be positive, got {om!r}")
    return om, 0, DEFAULT_TOL


def _cutoff(y_max, omega_eff, tol, minimum=0):
    # smallest K with the first dropped term below tol * 1e-2 relative to O(1)
    a = np.pi * omega_eff.imag
    L = -np.log(tol * 1e-2) + 2.0
    K = (2 * y_max + np.sqrt(4 * y_max**2 + 4 * a * L)) / (2 * a)
    return max(int(np.ceil(K)) + 2, minimum)


def _series(z, omega, offset, alternating, cutoff, tol, scale=1.0, shift=0.0, deriv=0):
    """sum_n (+-1)^n exp(i*pi*scale*omega*(n+offset)^2 + 2i*scale*(n+offset)*(z-shift)).

    ``deriv`` > 0 returns that z-derivative of the series instead.
    """
    z = np.asarray(z, dtype=complex)
    om = omega * scale
    y_max = float(np.max(np.abs((z - shift).imag), initial=0.0)) * scale
    K = _cutoff(y_max, om, tol, cutoff)
    n = np.arange(-K, K + 1)
    m = n + offset
    expo = 1j * np.pi * om * m**2 + 2j * scale * np.multiply.outer(z - shift, m)
    terms = np.exp(expo)
    if alternating:
        terms = terms * ((-1.0) ** n)
    if deriv:
        terms = terms * (2j * scale * m) ** deriv
    return terms.sum(axis=-1)


def theta1(z, p=1j):
    """theta_1(z|omega), vectorised over ``z``."""
    omega, cut, tol = _omega(p)
    return -1j * _series(z, omega, 0.5, True, cut, tol)


def theta_k(k, z, p=1j):
    """Standard Jacobi theta function theta_k(z|omega) for k in 1..4."""
    omega, cut, tol = _omega(p)
    if k == 1:
        return theta1(z, p)
    if k == 2:
        return _series(z, omega, 0.5, False, cut, tol)
    if k == 3:
        return _series(z, omega, 0.0, False, cut, tol)
    if k == 4:
        return _series(z, omega, 0.0, True, cut, tol)
    raise ValueError(f"unknown theta index {k!r}")


VARIANTS = ("STD", "X0", "Y0", "XY")


def theta_aux(tag, z, p=1j):
    """Theta variants.

    ``tag`` is one of ``STD`` (theta1), ``X0`` (theta1(z/2 | omega/2)),
    ``Y0`` (theta1(z | 2 omega)), ``XY``
    (exp(iz/2) theta1(z/2|omega) theta1((z+pi+pi*omega)/2 | omega)),
    or an integer 2, 3, 4 for the standard companions.
    """
    omega, cut, tol = _omega(p)
    z = np.asarray(z, dtype=complex)
    if tag in (1, 2, 3, 4):
        return theta_k(tag, z, p)
    if tag == "STD":
        return theta1(z, p)
    if tag == "X0":
        return theta1(z / 2, ThetaParams(omega / 2, cut, tol))
    if tag == "Y0":
        return theta1(z, ThetaParams(2 * omega, cut, tol))
    if tag == "XY":
        q = ThetaParams(omega, cut, tol)
        return np.exp(0.5j * z) * theta1(z / 2, q) * theta1((z + np.pi + np.pi * omega) / 2, q)
    raise ValueError(f"unknown theta variant {tag!r}")


def vartheta(j, n, z, p=1j):
    """Basis function number ``j`` of the order-``n``, norm-0 theta space.

    vartheta_j(z) = sum_m exp(i*pi*n*omega*(m+1/2-j/n)^2 + 2i*n*(m+1/2-j/n)*(z-pi/2)).
    """
    if not 0 <= j < n:
        raise ValueError(f"basis index j={j} outside [0, {n - 1}]")
    omega, cut, tol = _omega(p)
    return _series(z, omega, 0.5 - j / n, False, cut, tol, scale=n, shift=np.pi / 2)


def vartheta_deriv(j, n, z, p=1j):
    """First derivative of ``vartheta(j, n, .)`` at z."""
    if not 0 <= j < n:
        raise ValueError(f"basis index j={j} outside [0, {n - 1}]")
    omega, cut, tol = _omega(p)
    return _series(z, omega, 0.5 - j / n, False, cut, tol, scale=n, shift=np.pi / 2, deriv=1)


def vartheta_matrix(points, n, p=1j, shift=0.0):
    """Matrix [vartheta_{j}(x_i - shift)]_{i, j}."""
    x = np.asarray(points, dtype=complex) - shift
    return np.stack([vartheta(j, n, x, p) for j in range(n)], axis=-1)


def lattice_coords(z, p=1j):
    """Real coordinates (a, b) with z = a*pi + b*pi*omega."""
    omega, _, _ = _omega(p)
    z = np.asarray(z, dtype=complex)
    b = z.imag / (np.pi * omega.imag)
    a = (z.real - b * np.pi * omega.real) / np.pi
    return a, b


def lattice_distance(z, p=1j):
    """Distance from z to the nearest point of pi*Z + pi*omega*Z."""
    omega, _, _ = _omega(p)
    a, b = lattice_coords(z, omega)
    best = None
    # the rounded point is not always the nearest for skew lattices
    for da in (-1, 0, 1):
        for db in (-1, 0, 1):
            w = np.asarray(z) - (np.round(a) + da) * np.pi - (np.round(b) + db) * np.pi * omega
            d = np.abs(w)
            best = d if best is None else np.minimum(best, d)
    return best


def on_lattice(z, p=1j, tol=DEFAULT_TOL):
    """True when z is within 1e3*tol of the lattice."""
    return bool(np.any(lattice_distance(z, p) < 1e3 * tol))


@dataclass(frozen=True)
class ThetaSpaceSpec:
    """Space of theta functions of a given order and norm."""

    order: int
    norm: complex = 0.0
    omega: complex = 1j

    def basis(self, z):
        """Values of the n basis functions vartheta_j(z - norm/n), shape z.shape + (n,)."""
        return vartheta_matrix(z, self.order, self.omega, shift=self.norm / self.order)

    def quasi_factor(self, z):
        """Multiplier for the shift z -> z + pi*omega."""
        n, om = self.order, self.omega
        return (-1) ** n * np.exp(2j * self.norm - 1j * n * (2 * z + np.pi * om))


def _check_independent(points, norm, omega, tol):
    x = np.asarray(points, dtype=complex)
    n = len(x)
    for i in range(n):
        for j in range(i + 1, n):
            if on_lattice(x[i] - x[j], omega, tol):
                raise IndependenceViolation(f"points {i} and {j} coincide modulo the lattice")
    if on_lattice(x.sum() - norm, omega, tol):
        raise IndependenceViolation("sum of points minus the norm lies on the lattice")


def interpolate(points, values, spec, z, tol=DEFAULT_TOL):
    """Evaluate at z the unique function of ``spec`` taking ``values`` at ``points``."""
    x = np.asarray(points, dtype=complex)
    v = np.asarray(values, dtype=complex)
    om = spec.omega
    _check_independent(x, spec.norm, om, tol)
    z = np.asarray(z, dtype=complex)
    s = spec.norm - x.sum()
    th = lambda u: theta1(u, om)
    out = np.zeros(z.shape, dtype=complex)
    for j in range(len(x)):
        term = th(s + x[j] - z) / th(s) * v[j]
        for k in range(len(x)):
            if k != j:
                term = term * th(z - x[k]) / th(x[j] - x[k])
        out = out + term
    return out


def interpolation_weights(points, norm, z, p=1j, tol=DEFAULT_TOL):
    """Row vector w with f(z) = w @ f(points) for every f of order len(points) and given norm."""
    x = np.asarray(points, dtype=complex)
    eye = np.eye(len(x), dtype=complex)
    spec = ThetaSpaceSpec(len(x), norm, _omega(p)[0])
    return np.array([interpolate(x, eye[k], spec, z, tol) for k in range(len(x))]).T


def _product_side(points, norm, omega):
    x = np.asarray(points, dtype=complex)
    val = theta1(x.sum() - norm, omega)
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            val = val * theta1(x[i] - x[j], omega)
    return val


@lru_cache(maxsize=64)
def basis_det_constant(n, omega=1j):
    """Constant c with det[vartheta_j(x_i)] = c * theta(sum x) * prod_{i<j} theta(x_i - x_j)."""
    rng = np.random.default_rng(_CALIBRATION_SEED + n)
    x = rng.uniform(0.1, 3.0, n) + 1j * rng.uniform(-0.3, 0.3, n)
    den = _product_side(x, 0.0, omega)
    if abs(den) < 1e-12:
        raise IndependenceViolation("calibration points are degenerate")
    return complex(np.linalg.det(vartheta_matrix(x, n, omega)) / den)


def elliptic_poly_det(points, norm=0.0, p=1j):
    """Return (det[vartheta_j(x_i - norm/n)], c_n)."""
    omega, _, _ = _omega(p)
    x = np.asarray(points, dtype=complex)
    n = len(x)
    det = complex(np.linalg.det(vartheta_matrix(x, n, omega, shift=norm / n)))
    return det, basis_det_constant(n, omega)


def elliptic_poly_det_formula(points, norm=0.0, p=1j):
    """Closed form c_n * theta(sum x - norm) * prod_{i<j} theta(x_i - x_j)."""
    omega, _, _ = _omega(p)
    return basis_det_constant(len(points), omega) * _product_side(points, norm, omega)


def frobenius_kernel(x, y, t, p=1j):
    """Matrix theta(x_i - y_j + t) / (theta(x_i - y_j) theta(t))."""
    omega, _, _ = _omega(p)
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    d = np.subtract.outer(x, y)
    return theta1(d + t, omega) / (theta1(d, omega) * theta1(t, omega))


def frobenius_det(x, y, t, p=1j, tol=DEFAULT_TOL):
    """Product form of det[theta(x_i - y_j + t)/(theta(x_i - y_j) theta(t))]."""
    omega, _, _ = _omega(p)
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if on_lattice(t, omega, tol):
        raise PoleOnLattice("t lies on the period lattice")
    if on_lattice(np.subtract.outer(x, y).ravel(), omega, tol):
        raise PoleOnLattice("some x_i - y_j lies on the period lattice")
    th = lambda u: theta1(u, omega)
    n = len(x)
    val = th((x - y).sum() + t) / th(t)
    for i in range(n):
        for j in range(i + 1, n):
            val = val * th(x[i] - x[j]) * th(y[j] - y[i])
    for i in range(n):
        for j in range(n):
            val = val / th(x[i] - y[j])
    return complex(val)


def period_table(omega=1j):
    """Quasi-periodicity rules as (name, tag, shift, multiplier(z)) with f(z + shift) = multiplier(z) f(z)."""
    om = complex(omega)
    pi = np.pi
    e = np.exp
    one = lambda z: -1.0 + 0 * z
    return [
        ("STD:pi", "STD", pi, one),
        ("STD:pi*omega", "STD", pi * om, lambda z: -e(-2j * z - 1j * pi * om)),
        ("X0:2pi", "X0", 2 * pi, one),
        ("X0:pi*omega", "X0", pi * om, lambda z: -e(-1j * z - 0.5j * pi * om)),
        ("Y0:pi", "Y0", pi, one),
        ("Y0:2pi*omega", "Y0", 2 * pi * om, lambda z: -e(-2j * z - 2j * pi * om)),
        ("XY:2pi", "XY", 2 * pi, one),
        ("XY:2pi*omega", "XY", 2 * pi * om, lambda z: -e(-2j * z - 2j * pi * om)),
        ("XY:pi+pi*omega", "XY", pi + pi * om, lambda z: 1j * e(-1j * z - 0.5j * pi * om)),
        ("XY:-pi+pi*omega", "XY", -pi + pi * om, lambda z: -1j * e(-1j * z - 0.5j * pi * om)),
    ]


def quasi_periodicity_residuals(z, omega=1j):
    """Max relative residual of every rule of :func:`period_table` over the points z."""
    z = np.asarray(z, dtype=complex)
    out = {}
    for name, tag, shift, mult in period_table(omega):
        f0 = theta_aux(tag, z, omega)
        f1 = theta_aux(tag, z + shift, omega)
        res = np.abs(f1 - mult(z) * f0) / np.maximum(np.abs(f1), np.abs(f0))
        out[name] = float(res.max())
    return out

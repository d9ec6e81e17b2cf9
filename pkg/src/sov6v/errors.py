"""Exception types raised by the sov6v library."""


class Sov6vError(Exception):
    """Base class for every error raised by this package."""


class IndependenceViolation(Sov6vError, ValueError):
    """Interpolation data are degenerate modulo the period lattice."""


class PoleOnLattice(Sov6vError, ValueError):
    """A theta-function denominator vanishes (argument on the lattice)."""


class PoleAtHeight(Sov6vError, ValueError):
    """A dynamical height parameter sits on a zero of theta."""


class WindowOverflow(Sov6vError, IndexError):
    """An operator action leaves the truncated dynamical window."""


class RankDeficient(Sov6vError, ValueError):
    """A family of states expected to be a basis is numerically dependent."""


class DegenerateSpectrum(Sov6vError, ValueError):
    """Two transfer-matrix eigenvalues coincide within tolerance."""


class IncompleteEnumeration(Sov6vError, RuntimeError):
    """The multistart solver did not find all expected solutions."""


class ZeroQPair(Sov6vError, ValueError):
    """Both q coefficients vanish at some site."""


class NoNullVector(Sov6vError, RuntimeError):
    """A linear system expected to be singular has no null vector."""


class RootCountMismatch(Sov6vError, RuntimeError):
    """Root search returned the wrong number of zeros."""


class NotEntire(Sov6vError, ValueError):
    """The T-Q quotient has a pole (Bethe equations violated)."""


class ZeroReference(Sov6vError, ValueError):
    """A Bethe-type product annihilates the reference state."""


class BranchLost(Sov6vError, RuntimeError):
    """Newton continuation could not follow the implicit branch."""


class AdmissibilityFailure(Sov6vError, ValueError):
    """Q vanishes at both points of some pair (xi_n, xi_n - eta)."""


class SingularPropagator(Sov6vError, ValueError):
    """A transfer matrix at an inhomogeneity is numerically singular."""


class ZeroEigenvalueAtInhomogeneity(Sov6vError, ValueError):
    """An eigenvalue vanishes at an inhomogeneity, so propagator ratios blow up."""


class InvalidHeight(Sov6vError, ValueError):
    """Requested height value is not of the form t0 + k*eta with 0 <= k <= N."""


class ConfigError(Sov6vError, ValueError):
    """Malformed run configuration; the message names the offending field."""


class InvalidModel(Sov6vError, ValueError):
    """Model parameters violate a structural requirement (e.g. parity rule)."""

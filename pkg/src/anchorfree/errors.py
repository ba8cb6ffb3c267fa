"""Exception and warning types shared across the package."""


class AnchorfreeError(Exception):
    """Base class for all errors raised by this package."""


class CorpusFormatError(AnchorfreeError):
    """Malformed or inconsistent corpus input (parse errors, dimension
    mismatches, negative weights, duplicate entries)."""


class ConfigError(AnchorfreeError):
    """Invalid run configuration."""


class NumericalError(AnchorfreeError):
    """Base class for numerical failures."""


class LpInfeasibleError(NumericalError):
    """The LP feasible region {Bx >= 0, s'x = 1} is empty."""


class LpUnboundedError(NumericalError):
    """The LP objective is unbounded over the feasible cone."""


class EigenConvergenceError(NumericalError):
    """Iterative eigensolver failed to converge; carries the partial
    spectrum obtained so far."""

    def __init__(self, message, eigenvalues=None, eigenvectors=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues
        self.eigenvectors = eigenvectors


class NotPsdError(NumericalError):
    """Input matrix is too far from positive semidefinite."""


class DegenerateTopicsError(NumericalError):
    """Topic matrix is (numerically) rank deficient."""


class AnchorfreeWarning(UserWarning):
    """Non-fatal conditions (degenerate documents, empty vocabularies,
    negative-mass cleanup) are reported through this warning class."""

"""Exception and warning types raised across the package."""


class BargmannError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatchError(BargmannError, ValueError):
    """Mode counts of two forms do not line up for the requested operation."""


class SingularBlockError(BargmannError, ArithmeticError):
    """The contracted block of a Gaussian integral is singular or ill-conditioned."""


class DivergentIntegralError(BargmannError, ArithmeticError):
    """The quadratic part of a Gaussian integrand does not decay."""


class DeltaNormalizationError(BargmannError, ValueError):
    """A generalized (delta-normalized) form was used where a normalizable one is required."""


class SymplecticConstraintError(BargmannError, ValueError):
    """A (Phi, Psi) pair violates the canonical commutation constraints."""


class InternalConsistencyError(BargmannError, RuntimeError):
    """A computed quantity failed a self-check (e.g. non-finite matrix exponential)."""


class CutoffError(BargmannError, ValueError):
    """The Fock cutoff is too small for the requested accuracy."""


class MeasurementError(BargmannError, ValueError):
    """Invalid measurement operators or an outcome with vanishing probability."""


class SectorError(BargmannError, ValueError):
    """A state lies outside the photon-number sector a detector model assumes."""


class ConfigError(BargmannError, ValueError):
    """Invalid command-line or file configuration."""


class CutoffWarning(UserWarning):
    """The Fock cutoff is below the recommended value; escalated in strict mode."""

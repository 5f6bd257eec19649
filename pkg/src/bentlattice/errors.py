"""Exception types raised across the toolkit."""


class BentLatticeError(Exception):
    """Base class for all toolkit errors."""


class NoGuidedModeError(BentLatticeError):
    """The waveguide has no guided (lowest) mode at the requested wavelength."""


class ConvergenceError(BentLatticeError):
    """A root finder failed to bracket or converge."""


class UnreachableTargetError(BentLatticeError):
    """A requested coupling or detuning lies outside the achievable range."""


class NotNormalizedError(BentLatticeError):
    """A mode without a power normalization was used where one is required."""


class NonHermitianError(BentLatticeError):
    """A generator matrix is not Hermitian."""


class ConfigError(BentLatticeError):
    """Invalid experiment configuration.

    Attributes:
        field: name of the offending configuration field.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field

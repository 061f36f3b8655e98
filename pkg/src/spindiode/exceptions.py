"""Exception types raised by spindiode."""


class SpinDiodeError(Exception):
    """Base class for all package errors."""


class DimensionError(SpinDiodeError, ValueError):
    """A configuration or array does not match the chain length."""


class SizeError(SpinDiodeError, ValueError):
    """The chain is larger than the configured cap for an operation."""


class PresetError(SpinDiodeError, ValueError):
    """Unknown preset name, or missing/unexpected preset parameters."""


class DegeneracyError(SpinDiodeError):
    """The stationary distribution of a cycle is not unique.

    Attributes
    ----------
    absorbing : list of str
        Labels of the states forming the separate closed classes.
    """

    def __init__(self, message, absorbing=()):
        super().__init__(message)
        self.absorbing = list(absorbing)


class PolicyError(SpinDiodeError):
    """A normalization policy cannot be satisfied by the cycle solutions."""


class ContractError(SpinDiodeError):
    """An input violates an operation's precondition (e.g. non-stationary state)."""


class NotApplicableError(SpinDiodeError, ValueError):
    """The operation is only defined for a different family of chains."""


class RankAmbiguityError(SpinDiodeError):
    """The superoperator null space cannot be separated from the rest of the spectrum."""

    def __init__(self, message, singular_values=()):
        super().__init__(message)
        self.singular_values = list(singular_values)


class StabilityError(SpinDiodeError, ValueError):
    """Integration step too large for the generator norm."""


class ConfigError(SpinDiodeError, ValueError):
    """Invalid experiment configuration file."""

"""Exception hierarchy for the atomswitch package.

``InvalidArgumentError`` signals a contract violation by the caller (bad
values, dimension mismatches).  ``NumericalError`` and its subclasses signal
failures of the numerics themselves and map to the CLI's numerical-failure
exit status; ``ConfigError`` maps to the config-invalid exit status.
"""


class AtomSwitchError(Exception):
    """Base class for all package-specific errors."""


class InvalidArgumentError(AtomSwitchError, ValueError):
    """An argument violates an operation's precondition."""


class ConfigError(AtomSwitchError):
    """A run configuration failed to parse or validate."""


class NumericalError(AtomSwitchError, RuntimeError):
    """Base class for failures of the numerical machinery."""


class SolverDegenerateError(NumericalError):
    """The steady-state system is singular beyond the trace constraint."""


class TruncationError(NumericalError):
    """The Fock-space truncation is inadequate for the requested drive."""


class IntegrationFailureError(NumericalError):
    """Time propagation failed (e.g. step-size underflow)."""


class UndefinedCorrelationError(NumericalError):
    """Correlation function requested for a port with vanishing mean flux."""

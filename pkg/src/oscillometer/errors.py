"""Exception types shared across the package."""


class OscillometerError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(OscillometerError, ValueError):
    """Malformed or out-of-contract input (non-finite coordinates, empty
    sample sets, degenerate parameters, bad density values)."""


class InvalidPairError(InvalidInputError):
    """A cube pair violated its required containment."""


class InvalidUseError(OscillometerError):
    """An operation was applied outside its stated precondition, e.g. the
    classical estimator on a non-uniform measure."""


class SearchFailureError(OscillometerError):
    """A doubling-cube search exceeded its step budget.

    Carries the last search state for diagnosis.
    """

    def __init__(self, message, cube=None, exponent=None, inner_mass=None, outer_mass=None):
        super().__init__(message)
        self.cube = cube
        self.exponent = exponent
        self.inner_mass = inner_mass
        self.outer_mass = outer_mass


class InadmissibleCenterError(OscillometerError):
    """The contraction search reached the grid resolution floor without
    finding a doubling cube; the center must be excluded from families."""

    def __init__(self, message, cube=None, exponent=None):
        super().__init__(message)
        self.cube = cube
        self.exponent = exponent


class ZeroMassMeanError(OscillometerError):
    """Mean requested over a cube of zero mass."""


class FamilyMismatchError(OscillometerError):
    """A cube family was evaluated against a measure or configuration other
    than the one it was built on."""

"""Exception types shared across the solver modules."""


class MenuOptError(Exception):
    """Base class for all package errors."""


class InvalidInput(MenuOptError):
    """Malformed or dimensionally inconsistent input."""


class NumericalFailure(MenuOptError):
    """A solver exceeded its iteration cap or failed self-certification."""


class EmptyMenu(MenuOptError):
    """An operation that requires a nonempty menu received an empty one."""


class GridTooLarge(MenuOptError):
    """A brute-force grid would exceed the enumeration cap."""


class ThresholdInfeasible(MenuOptError):
    """No distribution over action pairs attains the requested value level."""


class CertificateInvalid(MenuOptError):
    """A claimed infeasibility certificate does not actually certify."""


class InvalidTarget(MenuOptError):
    """A schedule target lies outside the menu it is supposed to realize."""

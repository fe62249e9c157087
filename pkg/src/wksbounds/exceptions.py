"""Exception hierarchy shared by all modules."""


class WKSError(Exception):
    """Base class for errors raised by :mod:`wksbounds`."""


class DomainError(WKSError, ValueError):
    """An argument lies outside the domain of a function."""


class ValidityError(WKSError, ValueError):
    """A precondition of an error bound does not hold.

    The message names the violated inequality.
    """


class PlanningInfeasible(WKSError):
    """No stage of the schedule satisfies the accuracy/reliability criteria.

    Attributes:
        trajectory: list of dicts with the per-stage quantities that were
            checked, in scan order.
    """

    def __init__(self, message, trajectory=()):
        super().__init__(message)
        self.trajectory = list(trajectory)


class NumericalError(WKSError, ArithmeticError):
    """A numerical routine failed (quadrature, factorization, round-off)."""


class CapacityError(WKSError):
    """A problem is too large for the selected method."""

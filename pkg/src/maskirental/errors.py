"""Exception hierarchy shared by every module."""


class SkiRentalError(Exception):
    """Base class for all package errors."""


class InvalidParams(SkiRentalError, ValueError):
    pass


class InvalidInstance(SkiRentalError, ValueError):
    pass


class StateMismatch(SkiRentalError, ValueError):
    """A group state is not a prefix of the instance, or is unreachable under a policy."""


class NonIntegerThreshold(SkiRentalError):
    """A closed form was requested at a state whose threshold is not an integer."""


class DegenerateThreshold(SkiRentalError, ValueError):
    """Threshold too small for the randomized density formulas (T <= 1 or T <= N_l)."""


class NegativeMass(SkiRentalError):
    pass


class SearchSpaceTooLarge(SkiRentalError):
    pass


class ConditionViolated(SkiRentalError):
    pass


class InstanceFormatError(SkiRentalError, ValueError):
    """Malformed instance file; the message carries a line/field pointer."""

"""Exception hierarchy shared by every module of the package."""


class FreeDynError(Exception):
    """Base class for all errors raised by free_dyn."""


class InvalidDigit(FreeDynError, ValueError):
    pass


class WrongSpace(FreeDynError, ValueError):
    pass


class OutOfRange(FreeDynError, ValueError):
    pass


class DomainError(FreeDynError, ValueError):
    pass


class InvalidMetric(FreeDynError, ValueError):
    pass


class Unsupported(FreeDynError, TypeError):
    """Raised when an exact computation needs a closed-form map but got a generic one."""


class BadThreshold(FreeDynError, ValueError):
    pass


class BadHorizon(FreeDynError, ValueError):
    pass


class HorizonExceeded(FreeDynError, LookupError):
    pass


class NotCommuting(FreeDynError, ValueError):
    pass


class DegenerateMolecule(FreeDynError, ValueError):
    pass


class IncompleteFunction(FreeDynError, KeyError):
    pass


class BadIndex(FreeDynError, ValueError):
    pass


class BadRadius(FreeDynError, ValueError):
    pass


class NotDistinct(FreeDynError, ValueError):
    pass


class ParseError(FreeDynError, ValueError):
    """A CLI/config literal could not be parsed."""

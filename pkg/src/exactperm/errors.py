"""Exception hierarchy shared by every module."""


class PermTestError(Exception):
    """Base class for all errors raised by exactperm."""


class InvalidInputError(PermTestError, ValueError):
    """Malformed or inconsistent input data."""


class ParseError(InvalidInputError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class AlignmentError(InvalidInputError):
    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class EmptyDatasetError(InvalidInputError):
    pass


class InvalidStatisticError(InvalidInputError):
    """A statistic produced effects that violate its own declaration."""


class ResourceLimitError(PermTestError):
    """A computation would exceed a configured size limit."""


class OversizeError(ResourceLimitError):
    """Exhaustive enumeration refused because 2**N is too large."""


class NumericalError(PermTestError, ArithmeticError):
    """Round-off beyond the accepted tolerance (an internal bug signal)."""

"""Exception hierarchy shared by every module of the package."""


class MRBTError(Exception):
    """Base class for all errors raised by mrbt."""


class InvalidSpace(MRBTError, ValueError):
    pass


class InvalidPoint(MRBTError, ValueError):
    def __init__(self, message, line=None, path=None):
        if line is not None:
            message = f"line {line}: {message}"
        if path is not None:
            message = f"{path}: {message}"
        super().__init__(message)
        self.line = line
        self.path = path


class InvalidRegion(MRBTError, ValueError):
    pass


class NoSplittableDimension(MRBTError, ValueError):
    pass


class NonFiniteWeight(MRBTError, ValueError):
    pass


class NonPositiveWeight(MRBTError, ValueError):
    pass


class EmptyTree(MRBTError):
    pass


class ZeroMass(MRBTError):
    pass


class SpaceTooLarge(MRBTError):
    pass


class UnnormalizedInput(MRBTError, ValueError):
    pass


class ParseError(MRBTError, ValueError):
    """Malformed text input; ``line`` and ``column`` are 1-based."""

    def __init__(self, message, line, column=None):
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


class ArityMismatch(ParseError):
    pass


class VersionMismatch(MRBTError):
    pass


class SchemaError(MRBTError):
    def __init__(self, message, path):
        super().__init__(f"{path}: {message}")
        self.path = path

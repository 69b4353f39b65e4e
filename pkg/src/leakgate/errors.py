"""Exception hierarchy shared by all modules."""


class LeakgateError(Exception):
    """Base class for every error raised by this package."""


class DataError(LeakgateError):
    """Problem with the measurement data itself (maps to CLI exit code 2)."""


class UsageError(LeakgateError):
    """Invalid parameters or configuration (maps to CLI exit code 1)."""


class IoError(DataError):
    pass


class ParseError(DataError):
    def __init__(self, path, line_no, text):
        self.path = str(path)
        self.line_no = line_no
        self.text = text
        super().__init__(f"{self.path}:{line_no}: not a number: {text!r}")


class EmptyInput(DataError):
    pass


class LengthMismatch(DataError):
    pass


class UnitMismatch(DataError):
    pass


class InvalidLevel(UsageError):
    pass


class InvalidBlockLength(UsageError):
    pass


class EmptyActiveSet(LeakgateError):
    pass


class InvalidRequest(UsageError):
    pass


class PilotTooSmall(DataError):
    pass


class InvalidSpec(UsageError):
    pass

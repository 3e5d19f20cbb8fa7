"""Exception hierarchy shared by every zpc module."""


class ZpcError(Exception):
    """Base class for all zpc errors."""


class DomainError(ZpcError, ValueError):
    pass


class PoleAtOne(DomainError):
    pass


class PrecisionUnreachable(ZpcError):
    pass


class OverflowDomain(DomainError):
    pass


class CertificationFailed(ZpcError):
    def __init__(self, message, window=None):
        super().__init__(message)
        self.window = window


class InvariantViolation(ZpcError, ValueError):
    pass


class IncompleteWindow(ZpcError):
    pass


class SymmetryViolation(ZpcError):
    pass


class DataFormatError(ZpcError):
    """Problem reading a zero file."""


class ParseError(DataFormatError):
    def __init__(self, line, text=""):
        super().__init__(f"line {line}: cannot parse {text!r} as an ordinate")
        self.line = line


class NotAscending(DataFormatError):
    def __init__(self, line):
        super().__init__(f"line {line}: ordinate not strictly above the previous one")
        self.line = line


class EmptyFile(DataFormatError):
    pass


class VersionMismatch(DataFormatError):
    pass


class ChecksumMismatch(DataFormatError):
    pass

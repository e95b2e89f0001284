"""Exception hierarchy.  Each class carries the CLI exit code it maps to."""


class CredalError(Exception):
    exit_code = 1


class NetworkFormatError(CredalError):
    """Malformed network/query text."""

    exit_code = 2

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(CredalError):
    exit_code = 2

    def __init__(self, findings):
        self.findings = list(findings)
        super().__init__("; ".join(self.findings))


class GbrUndefinedError(CredalError):
    """Lower probability of the evidence is zero."""

    exit_code = 3


class SizeCapError(CredalError):
    exit_code = 4


class EngineMismatchError(CredalError):
    """The requested engine cannot handle this network/task/semantics."""

    exit_code = 5

class BoolSynthError(Exception):
    """Base class for errors raised by this package."""


class ContractViolation(BoolSynthError, ValueError):
    """An operation was called outside its precondition."""


class ParseError(BoolSynthError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class InconsistentProfiles(BoolSynthError, ValueError):
    """Two profile rows share an input pattern but disagree on the output."""


class InfeasibleInference(BoolSynthError):
    """No formula satisfies the constraint system of a target."""


class ScoringError(BoolSynthError):
    """A network could not be scored (e.g. too many stable states)."""


class ConvergenceError(BoolSynthError):
    def __init__(self, message: str, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class SearchConfigError(BoolSynthError, ValueError):
    pass

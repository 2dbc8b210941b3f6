"""Exception hierarchy shared by all modules."""


class ParetoShellError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(ParetoShellError, ValueError):
    """Objective or decision vectors of incompatible length."""


class PreconditionError(ParetoShellError, ValueError):
    """An operation was called outside its contract.

    ``report`` optionally carries the validation report that explains the
    failure (for example, an invalid lower shell handed to a filter).
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ParseError(ParetoShellError, ValueError):
    """Malformed problem document or expression."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(message + where)
        self.line = line
        self.column = column


class UnknownVariableError(ParseError):
    pass


class UnboundedBoxError(ParseError):
    pass


class ParameterError(ParetoShellError, ValueError):
    """Invalid builder parameters (physical constants, knapsack data)."""


class HypothesisError(PreconditionError):
    """Monotonicity hypothesis refused; ``verdicts`` holds the probe results."""

    def __init__(self, message, verdicts=None):
        super().__init__(message)
        self.verdicts = verdicts or {}


class GuardError(ParetoShellError, ValueError):
    """Enumeration would exceed the configured size guard."""

    def __init__(self, message, size=None):
        super().__init__(message)
        self.size = size


class EmptyResultError(ParetoShellError, RuntimeError):
    """A search produced no feasible point."""

    def __init__(self, message, feasibility_rate=None):
        super().__init__(message)
        self.feasibility_rate = feasibility_rate


class DomainError(ParetoShellError, ValueError):
    """Argument outside the mathematical domain (for example a negative dose)."""

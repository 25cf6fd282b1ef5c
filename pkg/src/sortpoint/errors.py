"""Exception types shared across the solvers.

Budget-style errors are kept distinct from a NO answer: a solver that runs out
of budget raises instead of returning ``None``.
"""


class SortPointError(Exception):
    """Base class for every error raised by this package."""


class CycleDetected(SortPointError):
    pass


class InvalidPrefix(SortPointError):
    pass


class ParseError(SortPointError):
    """Malformed instance or solution document."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)


class ValidationError(SortPointError):
    """A well-formed value breaks a domain invariant."""


class BudgetExceeded(SortPointError):
    pass


class InvalidCover(SortPointError):
    pass


class InvalidVariant(SortPointError):
    pass


class PreconditionViolated(SortPointError):
    pass


class InfeasibleExhaustive(BudgetExceeded):
    """Exhaustive coloring family larger than the configured cap."""


class ExactCapExceeded(BudgetExceeded):
    """Exact treewidth requested on a graph above the size cap."""


class StateSpaceExceeded(BudgetExceeded):
    pass


class InvalidInput(SortPointError):
    pass


class InvalidSourceSolution(SortPointError):
    pass


class GadgetInconsistent(SortPointError):
    pass

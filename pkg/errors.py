"""
Error taxonomy for the geometric local search toolkit.
Every failure the toolkit reports is a ToolkitError; exit_code is what the CLI returns.
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1

    def __init__(self, message: str = "", **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def __str__(self) -> str:
        if not self.details:
            return self.message
        extra = ", ".join(f"{k}={v}" for k, v in sorted(self.details.items()))
        return f"{self.message} ({extra})"


class InvalidPolygon(ToolkitError):
    """Vertex list does not describe a convex polygon with positive area."""


class DegenerateOverlap(ToolkitError):
    """Two boundaries share a segment of positive length."""


class InvalidParams(ToolkitError):
    pass


class GenerationExhausted(ToolkitError):
    """A rejection sampler ran out of its retry budget."""


class ParseError(ToolkitError):
    pass


class InvariantViolation(ToolkitError):
    pass


class InfeasibleInstance(ToolkitError):
    exit_code = 3


class IterationCapExceeded(ToolkitError):
    exit_code = 2


class BudgetExceeded(ToolkitError):
    exit_code = 4


class NotCoverFree(ToolkitError):
    pass


class NotPseudodisks(ToolkitError):
    pass


class DegenerateChord(ToolkitError):
    """An overlapping pair does not cross exactly twice, so no chord exists."""


class ConflictingCO(ToolkitError):
    """Petal intervals of the two objects interleave along the lens boundary."""


class NoSeparator(ToolkitError):
    pass

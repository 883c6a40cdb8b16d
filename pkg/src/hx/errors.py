"""Exception hierarchy shared by every hx module."""


class HxError(Exception):
    """Base class; the CLI maps every subclass to exit code 2."""


class BadParameters(HxError, ValueError):
    pass


class EdgeSizeMismatch(HxError, ValueError):
    pass


class VertexOutOfRange(HxError, ValueError):
    pass


class DuplicateVertexInEdge(HxError, ValueError):
    pass


class EmptyList(HxError, ValueError):
    pass


class ParseError(HxError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FormatViolation(HxError, ValueError):
    pass


class UniformityZero(HxError, ValueError):
    pass


class UniformityMismatch(HxError, ValueError):
    pass


class NonuniformPacking(HxError, ValueError):
    pass


class ShadowMismatch(HxError, ValueError):
    pass


class UnionBudgetExceeded(HxError, RuntimeError):
    pass


class TooManyCandidates(HxError, ValueError):
    pass


class BudgetExhausted(HxError, RuntimeError):
    """Raised when a sampling budget runs out; ``partial`` holds what was found."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class RetriesExhausted(HxError, RuntimeError):
    """All attempts of a Las-Vegas stage failed; ``best`` is the best attempt."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class HypothesisFailed(HxError, RuntimeError):
    pass

"""Exception hierarchy shared by all modules."""


class SigContainError(Exception):
    """Base class for every error raised by this package."""


class GraphError(SigContainError, ValueError):
    """Invalid graph data (format or validation)."""


class ParseError(GraphError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateEdge(GraphError):
    def __init__(self, src, dst):
        self.src, self.dst = src, dst
        super().__init__(f"DuplicateEdge({src},{dst})")


class LeaderInEdge(GraphError):
    def __init__(self, leader, src):
        self.leader, self.src = leader, src
        super().__init__(f"leader {leader} has incoming edge from {src}")


class NotAcyclic(SigContainError):
    pass


class BudgetExceedsRoots(SigContainError, ValueError):
    def __init__(self, d, n_roots):
        self.d, self.n_roots = d, n_roots
        super().__init__(f"budget d={d} exceeds number of follower roots R={n_roots}")


class NoLeaders(SigContainError, ValueError):
    pass


class NotConverged(SigContainError, RuntimeError):
    pass


class NumericalError(SigContainError, ArithmeticError):
    """Numerical procedure failed (no convergence, singular system, periodic block)."""


class InvariantError(SigContainError, AssertionError):
    """Internal consistency check failed; indicates a bug or unsupported input."""


class GeneratorSpecError(SigContainError, ValueError):
    pass


class GraphWarning(UserWarning):
    """Non-fatal repair applied while ingesting a graph."""

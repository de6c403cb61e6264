"""Shared exception types."""


class CapacityError(ValueError):
    """Input exceeds a hard size limit (statevector width, enumeration guard)."""


class CircuitParseError(ValueError):
    """Malformed circuit text. Carries the 1-based offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class RoutingError(ValueError):
    """Circuit cannot be (or was not) routed for the target coupling map."""


class PlanError(ValueError):
    """Split plan constraints cannot be satisfied."""


class MetricError(ValueError):
    """Approximation ratio is undefined or out of range for the given inputs."""


class DivergenceError(RuntimeError):
    """Optimizer hit a non-finite objective. Carries the partial trace."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace

"""Exception types shared across the package."""


class RectHerzError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(RectHerzError):
    """A point or rectangle does not match the function's dimension."""


class NeedsOracle(RectHerzError):
    """Raised by exact integration paths when no closed form is available.

    Callers are expected to fall back to the grid/quadrature oracle.
    """


class NotIntegrable(RectHerzError):
    """The requested integral diverges (e.g. |x|^s with s <= -1 at an endpoint 0)."""


class BudgetExceeded(RectHerzError):
    """An evaluation budget would be exceeded."""

    def __init__(self, required: int, allowed: int, what: str = "evaluations"):
        self.required = int(required)
        self.allowed = int(allowed)
        super().__init__(f"budget exceeded: {required} {what} required, {allowed} allowed")


class TailBoundError(RectHerzError):
    """No certified truncation tail bound can be produced."""


class QuadratureError(RectHerzError):
    """Adaptive quadrature failed to meet the requested error budget."""

    def __init__(self, message: str, achieved: float | None = None):
        self.achieved = achieved
        super().__init__(message)


class ScenarioError(RectHerzError):
    """A CLI scenario failed validation."""

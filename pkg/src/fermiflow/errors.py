"""Exception types shared across the library."""

from __future__ import annotations


class RankDeficiencyError(ValueError):
    """A function family turned out linearly dependent during orthonormalization."""

    def __init__(self, index: int, residual: float):
        self.index = index
        self.residual = residual
        super().__init__(
            f"function {index} is linearly dependent on its predecessors "
            f"(residual norm {residual:.3e})"
        )


class RankCollapseError(RuntimeError):
    """A sampler hit numerical rank collapse while conditioning on a point."""

    def __init__(self, step: int, residual: float):
        self.step = step
        self.residual = residual
        super().__init__(
            f"numerical rank collapse at sampling step {step} "
            f"(projection residual {residual:.3e} < 1e-12)"
        )


class EnumerationCapError(RuntimeError):
    """An exact enumeration would exceed the configured budget."""

    def __init__(self, required: int, cap: int, what: str = "ordered tuples"):
        self.required = required
        self.cap = cap
        super().__init__(
            f"exact enumeration needs {required} {what}, cap is {cap}; "
            f"raise the cap or switch to sampling"
        )


class ConvergenceError(RuntimeError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message: str, iterations: int | None = None,
                 primal_residual: float | None = None,
                 dual_residual: float | None = None):
        self.iterations = iterations
        self.primal_residual = primal_residual
        self.dual_residual = dual_residual
        super().__init__(message)

"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, InfeasibleRateError and
ConstructionInfeasibleError -> 3, DiagnosticError -> 4.
"""


class ConfigError(ValueError):
    """Invalid declarative input (function spec, experiment config)."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(message if field is None else f"{field}: {message}")


class DomainError(ValueError):
    """Evaluation point outside the domain where the quantity is defined."""


class InfeasibleRateError(ValueError):
    """Rate equations have no solution at the requested sample size.

    Carries ``n_min``, the smallest sample size (or 1/eps^2) at which a
    solution exists.
    """

    def __init__(self, message, n_min=None):
        self.n_min = n_min
        super().__init__(message)


class ConstructionInfeasibleError(ValueError):
    """A two-point alternative cannot be built for this function/regime."""


class DiagnosticError(RuntimeError):
    """A numeric self-check failed (truncation breach, broken invariant)."""

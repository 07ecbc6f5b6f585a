"""Adaptive pointwise rates for monotone least-squares and Grenander estimators.

Subpackages:
  hull        exact convex minorant/majorant geometry, PAVA, switch relation
  funcspace   declarative monotone families, psi/eta moduli, rate equations
  stochastic  seeded Brownian machinery and boundary-crossing closed forms
  models      the four observation models and their estimators at 0
  limitdist   limiting slope laws and exceedance probabilities
  minimax     two-point alternatives, separation bounds, Le Cam experiments
  experiments orchestration used by the CLI and the acceptance suite
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as kernel_backend
from .funcspace import (
    FlatPowerSpec,
    MonotoneFunctionSpec,
    PiecewiseLinearSpec,
    PowerSpec,
    RateSolution,
    TableSpec,
    chi_exponent,
    load_spec,
    solve_rates,
)
from .hull import ConvexHullFit, CumulativePath, IsotonicFit, gcm, lcm_majorant, pava, slope_at, switch_event
from .models import DesignSpec
from .minimax import AlternativePair, ModelSetup, build_alternative
from .stochastic import McSummary, SeedSpec

__all__ = [
    "__version__",
    "kernel_backend",
    "CumulativePath",
    "ConvexHullFit",
    "IsotonicFit",
    "gcm",
    "lcm_majorant",
    "slope_at",
    "pava",
    "switch_event",
    "MonotoneFunctionSpec",
    "PowerSpec",
    "FlatPowerSpec",
    "PiecewiseLinearSpec",
    "TableSpec",
    "RateSolution",
    "load_spec",
    "solve_rates",
    "chi_exponent",
    "SeedSpec",
    "McSummary",
    "DesignSpec",
    "ModelSetup",
    "AlternativePair",
    "build_alternative",
]

"""Two-point optimality experiments.

Builds the alternative f1 sitting a gap delta*a away from f0 at the origin,
computes closed-form upper bounds on ||P1 - P0||_1 per model, and evaluates
two-point maximal risks of arbitrary estimators against the universal lower
bound (1/2)(1 - ||P1 - P0||/2) realized from simulated likelihood ratios.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, ConstructionInfeasibleError
from .funcspace import (
    DensityPlateauSpec,
    MonotoneFunctionSpec,
    RegressionPlateauSpec,
    _bisect,
)
from .models import (
    DesignSpec,
    GridDraw,
    RandomDesignDraw,
    DensityDraw,
    WhiteNoiseDraw,
    estimate_grenander,
    estimate_grid,
    estimate_random,
    estimate_wn,
    simulate_density,
    simulate_grid,
    simulate_random_design,
    simulate_wn,
)
from .stochastic import McSummary, SeedSpec

__all__ = [
    "AlternativePair",
    "ModelSetup",
    "RiskReport",
    "WitnessResult",
    "build_alternative",
    "hellinger_constant",
    "tv_bound",
    "delta_star",
    "separation_bounds",
    "SeparationBounds",
    "log_likelihood_ratio",
    "two_point_risk",
    "lower_bound_witness",
    "ls_estimator",
    "constant_estimator",
    "dichotomy_estimator",
    "local_average_estimator",
]


# ---------------------------------------------------------------------------
# model front-end shared by risk and coverage experiments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelSetup:
    """One observation model at one size.

    ``size`` is the sample size n; for the white noise model it is 1/eps^2
    (matching the rate equations' n slot).
    """

    model: str
    size: float
    sigma: float = 1.0
    error_kind: str = "gaussian"
    design: DesignSpec = DesignSpec()
    grid_points: int = 1000

    def __post_init__(self):
        if self.model not in ("wn", "grid", "random", "density"):
            raise ConfigError(f"unknown model {self.model!r}", field="model")

    @property
    def epsilon(self) -> float:
        return 1.0 / math.sqrt(self.size)

    @property
    def correction(self) -> float:
        """Multiplier turning the effective drift constant into the rate-equation C.

        The deviation probability is controlled through C_eff = C/sigma
        (grid), C*sqrt(g0)/sigma (random design), C/sqrt(f0(0)) (density).
        The density correction depends on f0 and is applied by the caller.
        """
        if self.model == "grid":
            return self.sigma
        if self.model == "random":
            return self.sigma / math.sqrt(self.design.g0)
        return 1.0

    def simulate(self, spec: MonotoneFunctionSpec, seed: SeedSpec):
        if self.model == "wn":
            return simulate_wn(spec, self.epsilon, self.grid_points, seed)
        if self.model == "grid":
            return simulate_grid(spec, int(self.size), self.sigma, self.error_kind, seed)
        if self.model == "random":
            return simulate_random_design(spec, self.design, int(self.size), self.sigma,
                                          self.error_kind, seed)
        return simulate_density(spec, int(self.size), seed)

    def estimate(self, draw) -> float:
        """The monotone least-squares / Grenander estimate at 0."""
        if self.model == "wn":
            return estimate_wn(draw)
        if self.model == "grid":
            return estimate_grid(draw)
        if self.model == "random":
            return estimate_random(draw).value
        return estimate_grenander(draw, 0.0)

    def interior(self, draw) -> bool:
        if self.model == "random":
            return bool(estimate_random(draw).interior)
        return True


# ---------------------------------------------------------------------------
# alternatives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlternativePair:
    """f0 together with its two-point alternative f1 at separation delta*a."""

    f0: MonotoneFunctionSpec
    f1: MonotoneFunctionSpec
    delta: float
    a: float
    s_delta_a: float
    gamma_n: float
    eta_a: float = 0.0  # density-mode normalizer, 0 otherwise
    deviation: str = "raise"
    experimental: bool = False

    @property
    def gap(self) -> float:
        """f1(0) - f0(0), equal to +-delta*a."""
        return self.f1.f_at_zero - self.f0.f_at_zero


def _density_mass(base, gap, eta, variant):
    return DensityPlateauSpec(base, gap, eta, variant=variant).total_mass()


def build_alternative(spec: MonotoneFunctionSpec, a: float, delta: float,
                      deviation: str = "raise") -> AlternativePair:
    """Construct the two-point alternative with f1(0) = f0(0) +- delta*a.

    Regression: a plateau at level delta*a through the origin (mirrored onto
    the left branch for deviation="lower"). Density: the plateau sits at
    f0(0)+delta*a on [t*, 0] with mass eta_a removed above it so the result
    integrates to 1; the deviation="lower" variant mirrors the construction
    onto the right branch and is flagged experimental.
    """
    if spec.is_alternative:
        raise ConfigError("alternatives are built from base specs")
    if not a > 0.0:
        raise ConfigError("a must be positive", field="a")
    if not 0.0 < delta <= 1.0:
        raise ConfigError("delta must lie in (0, 1]", field="delta")
    if deviation not in ("raise", "lower"):
        raise ConfigError("deviation must be 'raise' or 'lower'", field="deviation")
    gap = delta * a

    if spec.mode == "regression":
        side = "right" if deviation == "raise" else "left"
        f1 = RegressionPlateauSpec(spec, level=gap, side=side)
        return AlternativePair(spec, f1, delta, a, s_delta_a=f1.cut, gamma_n=2.0 * a,
                               deviation=deviation)

    if deviation == "raise":
        if spec.flat_radius("left") > 0.0:
            raise ConstructionInfeasibleError(
                "f0 is constant left of 0: the rate is parametric and the plateau "
                "alternative does not exist")
        # eta removes mass from {f0 > f0(0)+gap+eta}; total mass decreases in eta
        eta_hi = float(spec.value(-1.0)) - spec.f_at_zero - gap
        if eta_hi <= 0.0 or _density_mass(spec, gap, 0.0, "raise") < 1.0:
            raise ConstructionInfeasibleError("gap too large for this density (n too small)")
        if _density_mass(spec, gap, eta_hi, "raise") > 1.0:
            raise ConstructionInfeasibleError("cannot renormalize: f0(-1) too close to f0(0)")
        eta = _bisect(lambda e: -_density_mass(spec, gap, e, "raise"), 0.0, eta_hi, -1.0, tol=1e-15)
        f1 = DensityPlateauSpec(spec, gap, eta, variant="raise")
        s_gap = _crossing_left(spec, spec.f_at_zero + gap)
        return AlternativePair(spec, f1, delta, a, s_delta_a=s_gap, gamma_n=2.0 * a,
                               eta_a=eta, deviation=deviation)

    # lower variant: mass is added back on the right tail; increases with eta
    if _density_mass(spec, gap, 0.0, "lower") > 1.0:
        raise ConstructionInfeasibleError("gap too large for this density (n too small)")
    eta_hi = gap
    while _density_mass(spec, gap, eta_hi, "lower") < 1.0:
        eta_hi *= 2.0
        if eta_hi > 1e6:
            raise ConstructionInfeasibleError("cannot renormalize the lower-variant alternative")
    eta = _bisect(lambda e: _density_mass(spec, gap, e, "lower"), 0.0, eta_hi, 1.0, tol=1e-15)
    f1 = DensityPlateauSpec(spec, gap, eta, variant="lower")
    s_gap = _crossing_right(spec, spec.f_at_zero - gap)
    return AlternativePair(spec, f1, delta, a, s_delta_a=s_gap, gamma_n=2.0 * a,
                           eta_a=eta, deviation=deviation, experimental=True)


def _crossing_left(spec, level):
    # inf{s > 0 : f0(-s) >= level}
    if float(spec.value(-1.0)) < level:
        return 1.0
    return _bisect(lambda s: float(spec.value(-s)), 0.0, 1.0, level, tol=1e-15)


def _crossing_right(spec, level):
    # inf{s > 0 : f0(s) <= level}
    if float(spec.value(1.0)) >= level:
        return 1.0
    return _bisect(lambda s: -float(spec.value(s)), 0.0, 1.0, -level, tol=1e-15)


# ---------------------------------------------------------------------------
# separation bounds
# ---------------------------------------------------------------------------

def hellinger_constant(error_kind: str, sigma: float) -> float:
    """Constant M with integral (sqrt(phi(y-a)) - sqrt(phi(y)))^2 dy <= M a^2.

    Gaussian: the Hellinger affinity exp(-a^2/(8 sigma^2)) gives M = 1/(4 sigma^2);
    Laplace: the affinity (1+x) e^{-x} with x = |a|/(2b), b = sigma/sqrt(2),
    gives M = 1/(2 sigma^2). Other error families have no closed form here.
    """
    if error_kind == "gaussian":
        return 1.0 / (4.0 * sigma * sigma)
    if error_kind == "laplace":
        return 1.0 / (2.0 * sigma * sigma)
    raise ValueError(f"no Hellinger constant for error kind {error_kind!r}")


def tv_bound(setup: ModelSetup, C: float, delta: float, f0_at_zero: float = None) -> float:
    """Closed-form upper bound on ||P1 - P0||_1 for the model at constant C.

    wn: sqrt(exp(C^2 delta^2) - 1); grid: 4 C delta sqrt(M); random design:
    4 C delta sqrt(M g(0)); density: C delta / sqrt(f0(0)).
    """
    if setup.model == "wn":
        return math.sqrt(math.expm1(C * C * delta * delta))
    if setup.model == "grid":
        return 4.0 * C * delta * math.sqrt(hellinger_constant(setup.error_kind, setup.sigma))
    if setup.model == "random":
        m_const = hellinger_constant(setup.error_kind, setup.sigma)
        return 4.0 * C * delta * math.sqrt(m_const * setup.design.g0)
    if f0_at_zero is None:
        raise ValueError("density bound needs f0_at_zero")
    return C * delta / math.sqrt(f0_at_zero)


def delta_star(setup: ModelSetup, C: float, beta: float, f0_at_zero: float = None) -> float:
    """The delta in (0, 1] solving tv_bound(delta) = 2 - 4*beta (capped at 1)."""
    if not 0.0 < beta < 0.5:
        raise ConfigError("beta must lie in (0, 1/2)", field="beta")
    target = 2.0 - 4.0 * beta
    if tv_bound(setup, C, 1.0, f0_at_zero) <= target:
        return 1.0
    return _bisect(lambda d: tv_bound(setup, C, d, f0_at_zero), 0.0, 1.0, target, tol=1e-15)


@dataclass(frozen=True)
class SeparationBounds:
    model: str
    tv: float
    delta: float
    delta_star: float | None


def separation_bounds(pair: AlternativePair, setup: ModelSetup, C: float,
                      beta: float = None) -> SeparationBounds:
    """Bound record for the pair's delta, plus delta* for a requested beta."""
    f00 = pair.f0.f_at_zero if pair.f0.mode == "density" else None
    ds = None if beta is None else delta_star(setup, C, beta, f00)
    return SeparationBounds(setup.model, tv_bound(setup, C, pair.delta, f00), pair.delta, ds)


# ---------------------------------------------------------------------------
# likelihood ratios and risks
# ---------------------------------------------------------------------------

def log_likelihood_ratio(pair: AlternativePair, setup: ModelSetup, draw) -> float:
    """log dP1/dP0 of one draw; exact for gaussian wn/grid/random, laplace, density.

    Raises ValueError for error families without a tractable density
    (uniform grid errors).
    """
    f0, f1 = pair.f0, pair.f1
    if isinstance(draw, WhiteNoiseDraw):
        knots = draw.path.knots
        dy = np.diff(draw.path.values)
        d0 = np.diff(np.asarray(f0.primitive(knots)))
        d1 = np.diff(np.asarray(f1.primitive(knots)))
        dt = np.diff(knots)
        eps2 = draw.epsilon**2
        return float(np.sum((d1 - d0) * (dy - 0.5 * (d1 + d0)) / (eps2 * dt)))
    if isinstance(draw, (GridDraw, RandomDesignDraw)):
        x, y = draw.x, draw.y
        v0 = np.asarray(f0.value(x))
        v1 = np.asarray(f1.value(x))
        if draw.error_kind == "gaussian":
            return float(np.sum((v1 - v0) * (y - 0.5 * (v1 + v0))) / draw.sigma**2)
        if draw.error_kind == "laplace":
            b = draw.sigma / math.sqrt(2.0)
            return float(np.sum(np.abs(y - v0) - np.abs(y - v1)) / b)
        raise ValueError(f"likelihood ratio unavailable for {draw.error_kind!r} errors")
    if isinstance(draw, DensityDraw):
        p0 = np.asarray(f0.value(draw.sample))
        p1 = np.asarray(f1.value(draw.sample))
        if np.any(p0 <= 0.0):
            raise ValueError("draw contains points outside the f0 support")
        return float(np.sum(np.log(p1) - np.log(p0)))
    raise TypeError(f"unsupported draw type {type(draw).__name__}")


def ls_estimator(setup: ModelSetup) -> Callable:
    """The monotone least-squares / Grenander estimator at 0."""
    return setup.estimate


def constant_estimator(value: float) -> Callable:
    return lambda draw: value


def dichotomy_estimator(pair: AlternativePair, setup: ModelSetup) -> Callable:
    """f0(0) on {dP1/dP0 <= 1}, f1(0) otherwise (the two-point test estimator)."""

    def estimate(draw):
        return pair.f0.f_at_zero if log_likelihood_ratio(pair, setup, draw) <= 0.0 else pair.f1.f_at_zero

    return estimate


def local_average_estimator(setup: ModelSetup, window: float) -> Callable:
    """Average response (or mass/length in the density model) over [-w, w]."""

    def estimate(draw):
        if isinstance(draw, WhiteNoiseDraw):
            return float(draw.path(window) - draw.path(-window)) / (2.0 * window)
        if isinstance(draw, (GridDraw, RandomDesignDraw)):
            mask = np.abs(draw.x) <= window
            return float(np.mean(draw.y[mask])) if np.any(mask) else 0.0
        inside = np.sum(np.abs(draw.sample) <= window)
        return float(inside) / (draw.sample.size * 2.0 * window)

    return estimate


@dataclass(frozen=True)
class RiskReport:
    """Two-point exceedance probabilities of one estimator."""

    risk0: McSummary
    risk1: McSummary
    threshold: float
    gamma_n: float
    eta: float
    C: float
    delta: float
    bound: float = math.nan  # closed-form TV bound when supplied

    @property
    def max_risk(self) -> float:
        return max(self.risk0.estimate, self.risk1.estimate)

    @property
    def max_se(self) -> float:
        return max(self.risk0.se, self.risk1.se)


def _exceedance_matrix(pair, setup, estimators, threshold, reps, seed):
    """Exceedance counts per estimator per hypothesis, sharing the draws."""
    out = np.zeros((len(estimators), 2))
    for h, spec in enumerate((pair.f0, pair.f1)):
        target = spec.f_at_zero
        for i in range(reps):
            draw = setup.simulate(spec, seed.replicate(h * reps + i))
            for e, est in enumerate(estimators):
                out[e, h] += abs(est(draw) - target) >= threshold
    return out / reps


def two_point_risk(pair: AlternativePair, setup: ModelSetup, estimator: Callable,
                   eta: float, reps: int, seed: SeedSpec, C: float = math.nan,
                   bound: float = math.nan) -> RiskReport:
    """Monte Carlo two-point risk max_i P_i(|theta_hat - f_i(0)| >= eta*gamma_n)."""
    threshold = eta * pair.gamma_n
    probs = _exceedance_matrix(pair, setup, [estimator], threshold, reps, seed)[0]
    summaries = [
        McSummary(float(p), reps, math.sqrt(p * (1.0 - p) / reps), seed.master_seed, seed.stream_id)
        for p in probs
    ]
    return RiskReport(summaries[0], summaries[1], threshold, pair.gamma_n, eta, C,
                      pair.delta, bound)


@dataclass(frozen=True)
class WitnessResult:
    """Simulated universal lower bound (1/2)(1 - ||P1-P0||/2) on two-point max risk."""

    witness: float
    tv_hat: float
    tv_se: float
    reps: int

    @property
    def witness_se(self) -> float:
        return 0.25 * self.tv_se


def lower_bound_witness(pair: AlternativePair, setup: ModelSetup, reps: int,
                        seed: SeedSpec) -> WitnessResult:
    """Estimate ||P1-P0||_1 = E_P0|1 - dP1/dP0| by MC and return the Le Cam bound."""
    vals = np.empty(reps)
    for i in range(reps):
        draw = setup.simulate(pair.f0, seed.replicate(i))
        llr = log_likelihood_ratio(pair, setup, draw)
        vals[i] = abs(1.0 - math.exp(min(llr, 700.0)))
    tv_hat = float(np.mean(vals))
    tv_se = float(np.std(vals, ddof=1) / math.sqrt(reps))
    return WitnessResult(0.5 * (1.0 - 0.5 * tv_hat), tv_hat, tv_se, reps)

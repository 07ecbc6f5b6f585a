"""Simulation of the limiting slope laws and exceedance probabilities.

The limit process for a regularly varying F0 (exponent alpha > 1, side ratio
gamma = lim r_a/r_b) is

    X(s) = W_s + s^alpha                      (s >= 0)
    X(s) = W_s + gamma^(alpha-1/2) |s|^alpha  (s <= 0)

and the law of interest is the derivative at 0 of its greatest convex
minorant. Windows are finite, so a truncation diagnostic records how often
the hull segment through 0 touches the window edge. When the left drift
vanishes (gamma = 0) the default window cannot localize the hull; the grid is
then extended by geometrically coarsening knots out to ``far_window``
(Brownian values on any knot set are exact, so this costs resolution far from
0, never bias).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DiagnosticError
from .funcspace import H0_inv, MonotoneFunctionSpec
from .hull import CumulativePath, gcm
from .models import simulate_wn, estimate_wn
from .stochastic import McSummary, SeedSpec, generator

__all__ = [
    "LimitProcessSpec",
    "SlopeSample",
    "simulate_slope_at_zero",
    "limit_exceedance",
    "normalized_estimator_sample",
]

_TOUCH_LIMIT = 0.01


@dataclass(frozen=True)
class LimitProcessSpec:
    """Parameters of the limit process and of its discretization."""

    alpha_rv: float
    gamma: float = 1.0
    window: float = 8.0
    step: float = 2e-3
    far_window: float = 32768.0
    far_ratio: float = 1.005

    def __post_init__(self):
        if not self.alpha_rv > 1.0:
            raise ConfigError("alpha_rv must be > 1", field="alpha_rv")
        if self.gamma < 0.0:
            raise ConfigError("gamma must be >= 0", field="gamma")
        if not self.step < self.window / 100.0:
            raise ConfigError("step must be < window/100", field="step")
        if self.far_window < self.window:
            raise ConfigError("far_window must be >= window", field="far_window")

    def left_drift_coeff(self, C: float = 1.0) -> float:
        return C * self.gamma ** (self.alpha_rv - 0.5)

    def grid(self, extend_left: bool) -> np.ndarray:
        """Knots of [-S, S], geometrically coarsened beyond -S when extended."""
        k = round(self.window / self.step)
        body = np.arange(-k, k + 1, dtype=np.float64) * (self.window / k)
        if not extend_left:
            return body
        far = [body[0]]
        while far[-1] > -self.far_window:
            far.append(far[-1] * self.far_ratio)
        return np.concatenate((np.array(far[1:])[::-1], body))


@dataclass(frozen=True)
class SlopeSample:
    """Replicates of the GCM derivative at 0 of the limit process.

    ``slope_pos`` holds the positive part of the right slope at 0 and
    ``slope_neg`` the negative part of the left slope; off a hull vertex
    (almost surely) both come from the segment spanning 0.
    """

    slope_pos: np.ndarray
    slope_neg: np.ndarray
    touched_boundary: np.ndarray
    spec: LimitProcessSpec
    seed: SeedSpec

    @property
    def touch_fraction(self) -> float:
        return float(np.mean(self.touched_boundary))

    @property
    def truncation_warning(self) -> bool:
        return self.touch_fraction >= _TOUCH_LIMIT

    def survival_pos(self, c: float) -> float:
        """Empirical P(right slope at 0 >= c) for c > 0."""
        return float(np.mean(self.slope_pos >= c))


def _one_limit_path(spec: LimitProcessSpec, times, drift_c: float, seed: SeedSpec):
    rng_r = generator(seed, 1)
    rng_l = generator(seed, 2)
    k = int(np.nonzero(times == 0.0)[0][0])
    values = np.empty_like(times)
    values[k] = 0.0
    right = np.diff(times[k:])
    values[k + 1:] = np.cumsum(rng_r.standard_normal(right.size) * np.sqrt(right))
    left = np.diff(times[: k + 1])[::-1]
    values[:k] = np.cumsum(rng_l.standard_normal(left.size) * np.sqrt(left))[::-1]
    drift = np.where(
        times >= 0.0,
        drift_c * np.abs(times) ** spec.alpha_rv,
        drift_c * spec.gamma ** (spec.alpha_rv - 0.5) * np.abs(times) ** spec.alpha_rv,
    )
    return CumulativePath(times, values + drift, origin_index=k)


def _slope_pair_at_zero(path: CumulativePath):
    """(left slope, right slope, spanning segment touches window edge)."""
    fit = gcm(path)
    xs = fit.xs
    k_left = int(np.searchsorted(xs, 0.0, side="left")) - 1   # segment ending at/past 0
    k_right = int(np.searchsorted(xs, 0.0, side="right")) - 1  # segment starting at/past 0
    touched = xs[max(k_left, 0)] == path.knots[0] or xs[min(k_right + 1, xs.size - 1)] == path.knots[-1]
    return float(fit.slopes[k_left]), float(fit.slopes[k_right]), bool(touched)


def simulate_slope_at_zero(spec: LimitProcessSpec, reps: int, seed: SeedSpec,
                           strict_diagnostic: bool = False) -> SlopeSample:
    """Replicate the GCM slope at 0 of the limit process.

    Raises DiagnosticError when ``strict_diagnostic`` and more than 1% of the
    replicates have their slope segment anchored at the window edge;
    otherwise the warning is carried on the returned sample.
    """
    times = spec.grid(extend_left=spec.left_drift_coeff() == 0.0)
    pos = np.empty(reps)
    neg = np.empty(reps)
    touched = np.empty(reps, dtype=bool)
    for i in range(reps):
        path = _one_limit_path(spec, times, 1.0, seed.replicate(i))
        s_left, s_right, hit = _slope_pair_at_zero(path)
        pos[i] = max(s_right, 0.0)
        neg[i] = min(s_left, 0.0)
        touched[i] = hit
    sample = SlopeSample(pos, neg, touched, spec, seed)
    if strict_diagnostic and sample.truncation_warning:
        raise DiagnosticError(
            f"slope segment touched the window edge in {sample.touch_fraction:.2%} of replicates")
    return sample


def limit_exceedance(alpha_rv: float, gamma: float, C: float, reps: int, seed: SeedSpec,
                     window: float = 8.0, step: float = 2e-3) -> McSummary:
    """MC estimate of the limit probability

    P(inf_{s<=0} W_s + C*gamma^(alpha-1/2)|s|^alpha - Cs
          <= inf_{s>=0} W_s + C|s|^alpha - Cs).

    Both sides carry the tilt -Cs, so drift dominance localizes the infima
    on either side for any gamma and the default window suffices.
    """
    if not C > 0.0:
        raise ConfigError("C must be positive", field="C")
    spec = LimitProcessSpec(alpha_rv=alpha_rv, gamma=gamma, window=window, step=step)
    times = spec.grid(extend_left=False)
    hits = 0
    for i in range(reps):
        path = _one_limit_path(spec, times, C, seed.replicate(i))
        tilted = path.values - C * path.knots
        k = path.origin_index
        hits += bool(np.min(tilted[: k + 1]) <= np.min(tilted[k + 1:]))
    p_hat = hits / reps
    return McSummary(p_hat, reps, math.sqrt(p_hat * (1.0 - p_hat) / reps),
                     seed.master_seed, seed.stream_id)


def normalized_estimator_sample(spec: MonotoneFunctionSpec, epsilon: float, reps: int,
                                seed: SeedSpec, grid_points: int = 1000,
                                delta: float = 0.1) -> np.ndarray:
    """White-noise replicates of (f_hat(0)_+ / H0^{-1}(eps), f_hat(0)_- / -H0^{-1}(-eps)).

    Valid for specs with regularly varying F0 (power kinds); the first column
    converges in law to the positive part of the limit slope at 0.
    """
    norm_pos = H0_inv(spec, epsilon, delta=delta)
    norm_neg = -H0_inv(spec, -epsilon, delta=delta)
    out = np.empty((reps, 2))
    for i in range(reps):
        f_hat = estimate_wn(simulate_wn(spec, epsilon, grid_points, seed.replicate(i)))
        out[i, 0] = max(f_hat, 0.0) / norm_pos
        out[i, 1] = max(-f_hat, 0.0) / norm_neg
    return out

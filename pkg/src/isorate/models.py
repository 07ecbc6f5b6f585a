"""Simulators and pointwise-at-zero estimators for the four observation models.

Every model reduces estimation at 0 to a one-sided slope of a convex hull of
a cumulative path:

  white noise      Y(t) = F0(t) + eps*W(t) on [-1,1]; left GCM slope at 0
  grid             Y_i = f0(i/n) + e_i; left GCM slope at 0 of the cumulative
                   step integral on [-1-1/n, 1]
  random design    Y_i = f0(X_i) + e_i; left GCM slope at the order-statistic
                   index m with X_(m-1) < 0 <= X_(m) of the cumulative sums
  density          X_i ~ f0 non-increasing on [-1, inf); right LCM slope of
                   the empirical CDF at the evaluation point

Each draw exposes ``gcm_path()`` returning (path, split) such that the
estimate equals the left GCM slope at the split, which is exactly the pair
the switch relation is stated for.
"""

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError
from .funcspace import MonotoneFunctionSpec
from .hull import CumulativePath, gcm, lcm_majorant, slope_at
from .stochastic import SeedSpec, brownian_two_sided, generator

__all__ = [
    "MODEL_NAMES",
    "DesignSpec",
    "WhiteNoiseDraw",
    "GridDraw",
    "RandomDesignDraw",
    "DensityDraw",
    "RandomDesignEstimate",
    "simulate_wn",
    "estimate_wn",
    "simulate_grid",
    "estimate_grid",
    "simulate_random_design",
    "estimate_random",
    "simulate_density",
    "estimate_grenander",
    "noise",
]

MODEL_NAMES = ("wn", "grid", "random", "density")

_NOISE_KINDS = ("gaussian", "uniform", "laplace")


def noise(rng: np.random.Generator, size: int, sigma: float, kind: str) -> np.ndarray:
    """Centered noise with standard deviation exactly sigma."""
    if kind == "gaussian":
        return rng.normal(0.0, sigma, size)
    if kind == "uniform":
        half = sigma * np.sqrt(3.0)
        return rng.uniform(-half, half, size)
    if kind == "laplace":
        return rng.laplace(0.0, sigma / np.sqrt(2.0), size)
    raise ConfigError(f"unknown error kind {kind!r} (expected one of {_NOISE_KINDS})", field="error_kind")


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# white noise
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WhiteNoiseDraw:
    """One realization of the white noise model on a uniform grid."""

    path: CumulativePath
    epsilon: float
    spec: MonotoneFunctionSpec

    def gcm_path(self):
        return self.path, 0.0

    def to_csv(self, filename):
        """Columns: knot, value."""
        _write_rows(filename, ["knot", "value"], zip(self.path.knots, self.path.values))


def simulate_wn(spec, epsilon: float, grid_points: int, seed: SeedSpec) -> WhiteNoiseDraw:
    """Sample Y(t) = int_0^t f0 + eps*W(t) at 2*grid_points+1 uniform knots of [-1,1].

    ``grid_points`` is the knot count per unit; -1, 0 and 1 are exact knots.
    """
    if spec.mode != "regression":
        raise ConfigError("white noise model needs a regression-mode spec", field="f0")
    if grid_points < 1:
        raise ConfigError("grid_points must be >= 1", field="grid_points")
    m = int(grid_points)
    knots = np.arange(-m, m + 1, dtype=np.float64) / m
    w = brownian_two_sided(seed, knots)
    values = np.asarray(spec.primitive(knots)) + epsilon * w.values
    values = values - values[m]  # pin the origin exactly at 0
    return WhiteNoiseDraw(CumulativePath(knots, values, origin_index=m), epsilon, spec)


def estimate_wn(draw: WhiteNoiseDraw) -> float:
    """Left slope at 0 of the greatest convex minorant of the observed path."""
    return slope_at(gcm(draw.path), 0.0, "left")


# ---------------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridDraw:
    """Observations Y_i = f0(i/n) + e_i on the grid i = -n..n."""

    n: int
    y: np.ndarray  # index order -n..n
    sigma: float
    error_kind: str
    spec: MonotoneFunctionSpec

    @property
    def x(self):
        return np.arange(-self.n, self.n + 1, dtype=np.float64) / self.n

    def gcm_path(self):
        """Cumulative step integral on [-1-1/n, 1] with the origin pinned at 0."""
        n = self.n
        knots = np.concatenate(([-(n + 1.0) / n], self.x))
        raw = np.concatenate(([0.0], np.cumsum(self.y / n)))
        values = raw - raw[n + 1]
        return CumulativePath(knots, values, origin_index=n + 1), 0.0

    def to_csv(self, filename):
        """Columns: index, x, y."""
        idx = np.arange(-self.n, self.n + 1)
        _write_rows(filename, ["index", "x", "y"], zip(idx, self.x, self.y))


def simulate_grid(spec, n: int, sigma: float, error_kind: str, seed: SeedSpec) -> GridDraw:
    if spec.mode != "regression":
        raise ConfigError("grid model needs a regression-mode spec", field="f0")
    if n < 1:
        raise ConfigError("n must be >= 1", field="n")
    x = np.arange(-n, n + 1, dtype=np.float64) / n
    y = np.asarray(spec.value(x)) + noise(generator(seed), x.size, sigma, error_kind)
    return GridDraw(n, y, sigma, error_kind, spec)


def estimate_grid(draw: GridDraw) -> float:
    path, split = draw.gcm_path()
    return slope_at(gcm(path), split, "left")


# ---------------------------------------------------------------------------
# random design
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DesignSpec:
    """Design distribution for the covariates; uniform satisfies (C2) with g(0) = (hi-lo)^-1."""

    kind: str = "uniform"
    lo: float = -1.0
    hi: float = 1.0

    def __post_init__(self):
        if self.kind != "uniform":
            raise ConfigError(f"unknown design kind {self.kind!r}", field="design.kind")
        if not (self.lo < 0.0 < self.hi):
            raise ConfigError("design support must contain 0 in its interior", field="design")

    @property
    def g0(self) -> float:
        """Design density at 0."""
        return 1.0 / (self.hi - self.lo)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size)

    def to_dict(self):
        return {"kind": self.kind, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class RandomDesignDraw:
    """Design points sorted ascending with their responses."""

    x: np.ndarray
    y: np.ndarray
    sigma: float
    error_kind: str
    design: DesignSpec
    spec: MonotoneFunctionSpec

    @property
    def m(self):
        """1-based order-statistic index with X_(m-1) < 0 <= X_(m); n+1 if none."""
        return int(np.searchsorted(self.x, 0.0, side="left")) + 1

    def gcm_path(self):
        """Cumulative response sums H on the index scale [0, n], split at m."""
        n = self.x.size
        knots = np.arange(0, n + 1, dtype=np.float64)
        values = np.concatenate(([0.0], np.cumsum(self.y)))
        return CumulativePath(knots, values, origin_index=0), float(min(self.m, n))

    def to_csv(self, filename):
        """Columns: order, x, y (rows sorted by x)."""
        _write_rows(filename, ["order", "x", "y"], zip(range(1, self.x.size + 1), self.x, self.y))


class RandomDesignEstimate(NamedTuple):
    value: float
    interior: bool  # False when m = 1 or no design point is >= 0


def simulate_random_design(spec, design: DesignSpec, n: int, sigma: float,
                           error_kind: str, seed: SeedSpec) -> RandomDesignDraw:
    if spec.mode != "regression":
        raise ConfigError("random design model needs a regression-mode spec", field="f0")
    if n < 2:
        raise ConfigError("n must be >= 2", field="n")
    x = np.sort(design.sample(generator(seed, 1), n))
    y = np.asarray(spec.value(x)) + noise(generator(seed, 2), n, sigma, error_kind)
    return RandomDesignDraw(x, y, sigma, error_kind, design, spec)


def estimate_random(draw: RandomDesignDraw) -> RandomDesignEstimate:
    """Left GCM slope at the index m; flagged non-interior at the boundary."""
    if np.all(draw.x == draw.x[0]):
        raise ValueError("degenerate design: all design points equal")
    n = draw.x.size
    m = draw.m
    path, split = draw.gcm_path()
    return RandomDesignEstimate(slope_at(gcm(path), split, "left"), 1 < m <= n)


# ---------------------------------------------------------------------------
# density (Grenander)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityDraw:
    """Sorted sample from a non-increasing density on [-1, inf)."""

    sample: np.ndarray
    spec: MonotoneFunctionSpec

    def ecdf_path(self) -> CumulativePath:
        """Empirical CDF knots: -1, the distinct order statistics, 0, and one
        knot past the data carrying the flat tail (ECDF = 1 beyond the last
        observation), so right slopes at and past the data are well defined."""
        n = self.sample.size
        u, counts = np.unique(self.sample, return_counts=True)
        knots = u
        values = np.cumsum(counts) / n
        if 0.0 not in u:
            k = int(np.searchsorted(u, 0.0))
            at_zero = values[k - 1] if k > 0 else 0.0
            knots = np.insert(knots, k, 0.0)
            values = np.insert(values, k, at_zero)
        if knots[0] > -1.0:
            knots = np.concatenate(([-1.0], knots))
            values = np.concatenate(([0.0], values))
        knots = np.concatenate((knots, [knots[-1] + 1.0]))
        values = np.concatenate((values, [1.0]))
        return CumulativePath(knots, values)

    def gcm_path(self):
        """Reflection R(t) = -ECDF(-t): its left GCM slope at 0 is the Grenander value at 0."""
        ecdf = self.ecdf_path()
        return CumulativePath(-ecdf.knots[::-1], -ecdf.values[::-1]), 0.0

    def to_csv(self, filename):
        """Columns: order, x (sorted ascending)."""
        _write_rows(filename, ["order", "x"], zip(range(1, self.sample.size + 1), self.sample))


def simulate_density(spec, n: int, seed: SeedSpec) -> DensityDraw:
    """Inversion sampling (bisection quantile, tolerance 1e-12), sorted ascending."""
    if spec.mode != "density":
        raise ConfigError("density model needs a density-mode spec", field="f0")
    if n < 1:
        raise ConfigError("n must be >= 1", field="n")
    u = generator(seed).random(n)
    return DensityDraw(np.sort(np.asarray(spec.inverse_cdf(u))), spec)


def estimate_grenander(draw: DensityDraw, at: float = 0.0) -> float:
    """Right slope of the least concave majorant of the empirical CDF at ``at``.

    Beyond the last sample point the majorant is flat, so the estimate is 0.
    """
    path = draw.ecdf_path()
    if at >= path.knots[-1]:
        return 0.0
    return slope_at(lcm_majorant(path), at, "right")

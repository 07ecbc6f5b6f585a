"""Exact geometry of piecewise-linear cumulative paths.

Greatest convex minorants / least concave majorants, one-sided slope queries,
weighted isotonic regression (PAVA) and the switch relation between tilted
path infima and hull slopes. Paths are piecewise linear between their knots,
so every hull is computed exactly on the knot set.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import lower_hull_indices, pava_nondecreasing
from .errors import DomainError

__all__ = [
    "CumulativePath",
    "ConvexHullFit",
    "IsotonicFit",
    "gcm",
    "lcm_majorant",
    "slope_at",
    "pava",
    "switch_event",
]


@dataclass(frozen=True)
class CumulativePath:
    """Piecewise-linear function given by knots (strictly increasing) and values.

    ``origin_index`` locates the knot equal to 0.0 when present (all model
    paths carry one); it is resolved automatically.
    """

    knots: np.ndarray
    values: np.ndarray
    origin_index: int | None = None

    def __post_init__(self):
        knots = np.ascontiguousarray(self.knots, dtype=np.float64)
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)
        if knots.ndim != 1 or values.ndim != 1 or knots.shape != values.shape:
            raise ValueError("knots and values must be 1-D arrays of equal length")
        if knots.shape[0] < 2:
            raise ValueError("a path needs at least 2 knots")
        if not np.all(np.diff(knots) > 0.0):
            raise ValueError("knots must be strictly increasing")
        if not (np.all(np.isfinite(knots)) and np.all(np.isfinite(values))):
            raise ValueError("knots and values must be finite")
        if self.origin_index is None:
            hits = np.nonzero(knots == 0.0)[0]
            if hits.size:
                object.__setattr__(self, "origin_index", int(hits[0]))
        elif knots[self.origin_index] != 0.0:
            raise ValueError("origin_index does not point at a 0.0 knot")

    def __call__(self, t):
        """Linear interpolation at ``t`` (scalar or array) within the knot range."""
        t = np.asarray(t, dtype=np.float64)
        if np.any(t < self.knots[0]) or np.any(t > self.knots[-1]):
            raise DomainError("evaluation point outside the knot range")
        return np.interp(t, self.knots, self.values)


@dataclass(frozen=True)
class ConvexHullFit:
    """Vertices of a convex minorant or concave majorant of a path."""

    xs: np.ndarray
    ys: np.ndarray
    orientation: str  # "minorant" | "majorant"
    _slopes: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_slopes", np.diff(self.ys) / np.diff(self.xs))

    @property
    def slopes(self):
        """Segment slopes, strictly increasing (minorant) / decreasing (majorant)."""
        return self._slopes

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        if np.any(t < self.xs[0]) or np.any(t > self.xs[-1]):
            raise DomainError("evaluation point outside the hull range")
        return np.interp(t, self.xs, self.ys)


@dataclass(frozen=True)
class IsotonicFit:
    """Non-decreasing weighted least-squares fit with its constant blocks."""

    levels: np.ndarray
    blocks: list  # list of (start, stop) index ranges, stop exclusive


def gcm(path: CumulativePath) -> ConvexHullFit:
    """Greatest convex minorant of a piecewise-linear path.

    Equals the lower convex hull of the knot/value point set. The first and
    last knots are always vertices; collinear middle points are excluded, so
    vertex-to-vertex slopes are strictly increasing.
    """
    idx = lower_hull_indices(path.knots, path.values)
    return ConvexHullFit(path.knots[idx], path.values[idx], "minorant")


def lcm_majorant(path: CumulativePath) -> ConvexHullFit:
    """Least concave majorant; the exact reflection dual of :func:`gcm`.

    Computed as the lower hull of the negated values, indexing back into the
    original values so the duality is bitwise exact.
    """
    idx = lower_hull_indices(path.knots, -path.values)
    return ConvexHullFit(path.knots[idx], path.values[idx], "majorant")


def slope_at(fit: ConvexHullFit, t: float, side: str) -> float:
    """One-sided slope of a hull at ``t``.

    side="left": slope of the segment ending at or passing ``t``; defined for
    t in (first, last]. side="right": slope of the segment starting at or
    passing ``t``; defined for t in [first, last).
    """
    xs = fit.xs
    if side == "left":
        if not (xs[0] < t <= xs[-1]):
            raise DomainError(f"left slope undefined at t={t!r}")
        # segment index whose open-left interval (xs[k], xs[k+1]] contains t
        k = int(np.searchsorted(xs, t, side="left")) - 1
    elif side == "right":
        if not (xs[0] <= t < xs[-1]):
            raise DomainError(f"right slope undefined at t={t!r}")
        k = int(np.searchsorted(xs, t, side="right")) - 1
    else:
        raise ValueError("side must be 'left' or 'right'")
    return float(fit.slopes[k])


def pava(values, weights=None) -> IsotonicFit:
    """Weighted least-squares non-decreasing fit (pool adjacent violators).

    Equivalent to reading the left slopes of the GCM of the cumulative
    weighted-sum path at each knot.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("values must be a non-empty 1-D array")
    if weights is None:
        weights = np.ones_like(values)
    else:
        weights = np.ascontiguousarray(weights, dtype=np.float64)
        if weights.shape != values.shape:
            raise ValueError("weights must match values in length")
        if not np.all(weights > 0.0):
            raise ValueError("weights must be positive")
    levels = pava_nondecreasing(values, weights)
    # pooled blocks have strictly increasing means, so blocks = runs of equal level
    breaks = np.nonzero(np.diff(levels) != 0.0)[0] + 1
    edges = np.concatenate(([0], breaks, [values.size]))
    blocks = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]
    return IsotonicFit(levels, blocks)


def switch_event(path: CumulativePath, a: float, split: float) -> bool:
    """Switch relation: compare infima of the tilted path left and right of ``split``.

    Returns True iff inf_{t<split}(path(t) - a*t) <= inf_{t>=split}(path(t) - a*t),
    the infima running over the knots of each side with the split itself
    evaluated (by interpolation) on the right, and ties resolved as True.
    This is the indicator {left GCM slope at split >= a} for every ``a``; at
    ``a`` exactly equal to a hull slope the tie lands on True, matching the
    "<=" of the defining displays.
    """
    knots = path.knots
    if not (knots[0] <= split <= knots[-1]):
        raise DomainError("split outside the knot range")
    tilted = path.values - a * knots
    k = int(np.searchsorted(knots, split, side="left"))  # knots[:k] < split
    left = float(np.min(tilted[:k])) if k > 0 else np.inf
    right = float(path(split)) - a * split
    if k < knots.size:
        right = min(right, float(np.min(tilted[k:])))
    return left <= right

"""Declarative monotone function families and the rate machinery built on them.

A spec describes the target function f0 (regression mode: non-decreasing with
f0(0)=0 on [-1,1]; density mode: non-increasing density on [-1, inf),
continuous at 0) and exposes exact evaluation of f0, its primitive, and the
convex transform F0 whose local geometry drives every rate statement:

    regression mode:  F0(t) = integral_0^t f0(s) ds
    density mode:     F0(t) = integral_0^t (f0(0) - f0(s)) ds

The rate equations

    F0(r_a) = a*r_a,   F0(-r_b) = b*r_b,   sqrt(r_a)*a = sqrt(r_b)*b = C*n^(-1/2)

(with the roles of the two sides swapped in density mode) are solved by
bisection on the strictly increasing map r -> F0(r)/sqrt(r).

Two exponent conventions coexist in this area and are kept apart by name:
``alpha_lip`` is a Lipschitz exponent of f0 near 0 (rate n^(-a/(2a+1))) while
``alpha_rv`` is the regular-variation exponent of F0 (psi(s) = s^alpha_rv);
they satisfy alpha_rv = alpha_lip + 1 only for exact power laws.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, InfeasibleRateError

__all__ = [
    "MonotoneFunctionSpec",
    "PowerSpec",
    "FlatPowerSpec",
    "PiecewiseLinearSpec",
    "TableSpec",
    "RegressionPlateauSpec",
    "DensityPlateauSpec",
    "RateSolution",
    "load_spec",
    "load_spec_json",
    "primitive_F0",
    "psi",
    "eta_modulus",
    "G0",
    "G0_inv",
    "H0",
    "H0_inv",
    "solve_rates",
    "chi_exponent",
]

_BISECT_TOL = 1e-12
_BISECT_MAX_ITER = 200
_PSI_GRID_LEVELS = 40


def _bisect(fn, lo, hi, target, tol=_BISECT_TOL, max_iter=_BISECT_MAX_ITER):
    """Root of the increasing function fn on [lo, hi] for fn(r) = target."""
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if fn(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class MonotoneFunctionSpec:
    """Base class for all function specs; concrete kinds fill in the pieces."""

    kind = None
    is_alternative = False  # True for derived two-point alternatives (f1)

    def __init__(self, mode):
        if mode not in ("regression", "density"):
            raise ConfigError("mode must be 'regression' or 'density'", field="mode")
        self.mode = mode

    # -- evaluation ---------------------------------------------------------
    def value(self, t):
        """f0(t), vectorized."""
        raise NotImplementedError

    def primitive(self, t):
        """integral_0^t f0(s) ds, vectorized and exact for closed-form kinds."""
        raise NotImplementedError

    @property
    def t_min(self):
        return -1.0

    @property
    def t_max(self):
        return 1.0 if self.mode == "regression" else math.inf

    @property
    def f_at_zero(self):
        return 0.0

    def F0(self, t):
        """Convex transform used by the rate equations; F0(0)=0, F0'(0)=0."""
        t = np.asarray(t, dtype=np.float64)
        if np.any(t < self.t_min) or np.any(t > self.t_max):
            raise DomainError("F0 argument outside the spec domain")
        if self.mode == "regression":
            return self.primitive(t)
        return self.f_at_zero * t - self.primitive(t)

    # -- local shape hooks --------------------------------------------------
    def flat_radius(self, side):
        """sup{r >= 0 : F0(+-r) == 0} on the requested side."""
        raise NotImplementedError

    def power_exponent(self, side):
        """Exact local exponent p with f0 ~ c|t|^p on the side, or None."""
        return None

    # -- density-mode extras ------------------------------------------------
    def cdf(self, x):
        """integral_{-1}^x f0, density mode only."""
        raise NotImplementedError

    @property
    def support_end(self):
        """Right end of the density support (density mode only)."""
        raise NotImplementedError

    def inverse_cdf(self, u):
        """Quantile function by bisection (tolerance 1e-12), vectorized."""
        u = np.asarray(u, dtype=np.float64)
        lo = np.full(u.shape, self.t_min)
        hi = np.full(u.shape, self.support_end)
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    # -- serialization ------------------------------------------------------
    def to_dict(self):
        raise NotImplementedError

    def __eq__(self, other):
        return type(other) is type(self) and other.to_dict() == self.to_dict()

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.to_dict().items() if k != "kind")
        return f"{type(self).__name__}({args})"


def _power_primitive(t, c, p):
    # integral_0^t c*sgn(s)|s|^p ds = c|t|^(p+1)/(p+1)
    return c * np.abs(t) ** (p + 1.0) / (p + 1.0)


class PowerSpec(MonotoneFunctionSpec):
    """f0(t) = c*sgn(t)|t|^p (regression) or the density analogue.

    In density mode the function is f0(t) = max(c0 - c*sgn(t)|t|^p, 0) on
    [-1, inf) with c0 = f0(0) solved so the density integrates to 1 (requires
    c < p+1); its convex transform is F0(t) = c|t|^(p+1)/(p+1) inside the
    support, linear with slope c0 beyond.
    """

    kind = "power"

    def __init__(self, mode="regression", c=1.0, p=1.0):
        super().__init__(mode)
        if not (np.isfinite(c) and c >= 0.0):
            raise ConfigError("c must be a finite non-negative real", field="c")
        self.c = float(c)
        self.p = float(p)
        if mode == "regression":
            if self.p < 0.0:
                raise ConfigError("p must be >= 0 in regression mode", field="p")
        else:
            if self.p <= 0.0:
                raise ConfigError("p must be > 0 in density mode", field="p")
            if not self.c > 0.0:
                raise ConfigError("c must be > 0 in density mode", field="c")
            if self.c / (self.p + 1.0) >= 1.0:
                raise ConfigError("not normalizable: need c < p+1", field="c")
            self._c0 = self._solve_c0()

    def _solve_c0(self):
        c, p = self.c, self.p

        def total(c0):
            t_end = (c0 / c) ** (1.0 / p)
            return c0 + c / (p + 1.0) + t_end * c0 * p / (p + 1.0)

        hi = 1.0
        while total(hi) < 1.0:
            hi *= 2.0
        return _bisect(total, 0.0, hi, 1.0, tol=1e-15)

    @property
    def f_at_zero(self):
        return 0.0 if self.mode == "regression" else self._c0

    @property
    def support_end(self):
        return (self._c0 / self.c) ** (1.0 / self.p)

    def value(self, t):
        t = np.asarray(t, dtype=np.float64)
        raw = self.c * np.sign(t) * np.abs(t) ** self.p
        if self.mode == "regression":
            return raw
        return np.maximum(self._c0 - raw, 0.0)

    def primitive(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.mode == "regression":
            return _power_primitive(t, self.c, self.p)
        # density: integral of c0 - c*sgn|s|^p, constant past the support end
        inside = np.minimum(t, self.support_end)
        return self._c0 * inside - _power_primitive(inside, self.c, self.p)

    def flat_radius(self, side):
        if self.mode == "regression" and self.c == 0.0:
            return 1.0
        return 0.0

    def power_exponent(self, side):
        if self.mode == "regression" and self.c == 0.0:
            return None
        return self.p

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.primitive(np.clip(x, -1.0, self.support_end)) - self.primitive(-1.0)

    def inverse_cdf(self, u):
        if self.p == 1.0:
            # piecewise quadratic cdf: invert each branch in closed form
            u = np.asarray(u, dtype=np.float64)
            c0, c = self._c0, self.c
            q0 = self.cdf(0.0)
            left = (c0 - np.sqrt(c0 * c0 + 2.0 * c * np.maximum(q0 - u, 0.0))) / c
            right = (c0 - np.sqrt(np.maximum(c0 * c0 - 2.0 * c * (u - q0), 0.0))) / c
            return np.where(u <= q0, left, right)
        return super().inverse_cdf(u)

    def to_dict(self):
        return {"kind": self.kind, "mode": self.mode, "c": self.c, "p": self.p}


class FlatPowerSpec(MonotoneFunctionSpec):
    """Flat around 0, power growth beyond; the two branches may differ.

    Regression: f0 = 0 on [0, r0_right] then c_right*(t-r0_right)^p_right, and
    mirrored (or asymmetric) on the left. Density: f0 = c0 on
    [-r0_left, r0_right], decreasing as c0 - c_right*(t-r0_right)^p_right to
    the right (clipped at 0) and increasing to the left, c0 normalized.
    """

    kind = "flat_then_power"

    def __init__(self, mode="regression", r0=0.0, c=1.0, p=1.0,
                 r0_left=None, c_left=None, p_left=None):
        super().__init__(mode)
        self.r0 = float(r0)
        self.c = float(c)
        self.p = float(p)
        self.r0_left = self.r0 if r0_left is None else float(r0_left)
        self.c_left = self.c if c_left is None else float(c_left)
        self.p_left = self.p if p_left is None else float(p_left)
        for name in ("r0", "r0_left"):
            r = getattr(self, name)
            if not (0.0 <= r <= 1.0):
                raise ConfigError("flat radius must lie in [0, 1]", field=name)
        for name in ("c", "c_left"):
            if getattr(self, name) < 0.0:
                raise ConfigError("branch coefficient must be >= 0", field=name)
        for name in ("p", "p_left"):
            if getattr(self, name) <= 0.0:
                raise ConfigError("branch exponent must be > 0", field=name)
        if mode == "density":
            if self.c <= 0.0:
                raise ConfigError("c must be > 0 in density mode", field="c")
            if float(self._branch_primitive(-1.0)) >= 1.0:
                raise ConfigError("not normalizable: left branch mass >= 1", field="c_left")
            self._c0 = self._solve_c0()

    def _branch(self, t):
        # signed magnitude of f0 away from the flat region, t any sign
        t = np.asarray(t, dtype=np.float64)
        right = self.c * np.maximum(t - self.r0, 0.0) ** self.p
        left = -self.c_left * np.maximum(-t - self.r0_left, 0.0) ** self.p_left
        return np.where(t >= 0.0, right, left)

    def _branch_primitive(self, t):
        t = np.asarray(t, dtype=np.float64)
        right = self.c * np.maximum(t - self.r0, 0.0) ** (self.p + 1.0) / (self.p + 1.0)
        left = self.c_left * np.maximum(-t - self.r0_left, 0.0) ** (self.p_left + 1.0) / (self.p_left + 1.0)
        return np.where(t >= 0.0, right, left)

    def _solve_c0(self):
        def total(c0):
            t_end = self.r0 + (c0 / self.c) ** (1.0 / self.p)
            mass_left = c0 + self._branch_primitive(-1.0)
            mass_right = c0 * t_end - self._branch_primitive(t_end)
            return float(mass_left + mass_right)

        hi = 1.0
        while total(hi) < 1.0:
            hi *= 2.0
        return _bisect(total, 0.0, hi, 1.0, tol=1e-15)

    @property
    def f_at_zero(self):
        return 0.0 if self.mode == "regression" else self._c0

    @property
    def support_end(self):
        return self.r0 + (self._c0 / self.c) ** (1.0 / self.p)

    def value(self, t):
        if self.mode == "regression":
            return self._branch(t)
        return np.maximum(self._c0 - self._branch(t), 0.0)

    def primitive(self, t):
        if self.mode == "regression":
            return self._branch_primitive(t)
        t = np.asarray(t, dtype=np.float64)
        inside = np.minimum(t, self.support_end)
        return self._c0 * inside - self._branch_primitive(inside)

    def flat_radius(self, side):
        return self.r0 if side == "right" else self.r0_left

    def power_exponent(self, side):
        if self.flat_radius(side) > 0.0:
            return None
        return self.p if side == "right" else self.p_left

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.primitive(np.clip(x, -1.0, self.support_end)) - self.primitive(-1.0)

    def to_dict(self):
        return {
            "kind": self.kind, "mode": self.mode,
            "r0": self.r0, "c": self.c, "p": self.p,
            "r0_left": self.r0_left, "c_left": self.c_left, "p_left": self.p_left,
        }


class PiecewiseLinearSpec(MonotoneFunctionSpec):
    """f0 given by a knot/value table, linear in between; exact integrals."""

    kind = "piecewise_linear"

    def __init__(self, mode="regression", knots=(), values=()):
        super().__init__(mode)
        self.knots = np.asarray(knots, dtype=np.float64)
        self.values = np.asarray(values, dtype=np.float64)
        if self.knots.ndim != 1 or self.knots.size < 2:
            raise ConfigError("need at least two knots", field="knots")
        if self.values.shape != self.knots.shape:
            raise ConfigError("values must match knots in length", field="values")
        if not np.all(np.diff(self.knots) > 0.0):
            raise ConfigError("knots must be strictly increasing", field="knots")
        if mode == "regression":
            if np.any(np.diff(self.values) < 0.0):
                raise ConfigError("regression values must be non-decreasing", field="values")
            if not (self.knots[0] <= -1.0 <= 1.0 <= self.knots[-1]):
                raise ConfigError("knots must cover [-1, 1]", field="knots")
            if float(np.interp(0.0, self.knots, self.values)) != 0.0:
                raise ConfigError("f0(0) must equal 0 in regression mode", field="values")
        else:
            if np.any(np.diff(self.values) > 0.0):
                raise ConfigError("density values must be non-increasing", field="values")
            if np.any(self.values < 0.0):
                raise ConfigError("density values must be non-negative", field="values")
            if self.knots[0] != -1.0:
                raise ConfigError("density table must start at -1", field="knots")
            mass = float(np.trapezoid(self.values, self.knots))
            if abs(mass - 1.0) > 1e-9:
                raise ConfigError(f"density must integrate to 1 (got {mass!r})", field="values")
            if float(np.interp(0.0, self.knots, self.values)) <= 0.0:
                raise ConfigError("f0(0) must be positive in density mode", field="values")
        # exact primitive at the knots, anchored so primitive(0) = 0
        seg = 0.5 * (self.values[1:] + self.values[:-1]) * np.diff(self.knots)
        cum = np.concatenate(([0.0], np.cumsum(seg)))
        self._prim_at_knots = cum - self._interp_prim(0.0, cum)

    def _interp_prim(self, t, cum):
        t = np.asarray(t, dtype=np.float64)
        k = np.clip(np.searchsorted(self.knots, t, side="right") - 1, 0, self.knots.size - 2)
        dt = t - self.knots[k]
        v0 = self.values[k]
        slope = (self.values[k + 1] - v0) / (self.knots[k + 1] - self.knots[k])
        return cum[k] + v0 * dt + 0.5 * slope * dt * dt

    @property
    def f_at_zero(self):
        if self.mode == "regression":
            return 0.0
        return float(np.interp(0.0, self.knots, self.values))

    @property
    def support_end(self):
        return float(self.knots[-1])

    def value(self, t):
        t = np.asarray(t, dtype=np.float64)
        out = np.interp(t, self.knots, self.values)
        if self.mode == "density":
            out = np.where(t > self.knots[-1], 0.0, out)
        return out

    def primitive(self, t):
        t = np.asarray(t, dtype=np.float64)
        clipped = np.clip(t, self.knots[0], self.knots[-1])
        return self._interp_prim(clipped, self._prim_at_knots)

    def flat_radius(self, side):
        sgn = 1.0 if side == "right" else -1.0
        lim = 1.0 if self.mode == "regression" else (self.support_end if side == "right" else 1.0)
        # F0 vanishes exactly while f0 stays at f0(0) along the side
        r, step = 0.0, None
        ts = self.knots[(self.knots * sgn > 0.0) & (np.abs(self.knots) <= lim)]
        ts = np.sort(np.abs(ts))
        for tk in np.concatenate((ts, [lim])):
            if float(abs(self.F0(sgn * min(tk, lim)))) > 0.0:
                break
            r = min(tk, lim)
        return r

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.primitive(np.clip(x, -1.0, self.support_end)) - self.primitive(-1.0)

    def to_dict(self):
        return {"kind": self.kind, "mode": self.mode,
                "knots": self.knots.tolist(), "values": self.values.tolist()}


class TableSpec(PiecewiseLinearSpec):
    """Sampled f0; monotone linear interpolation of the table.

    Same machinery as the piecewise-linear kind (the trapezoid rule is exact
    for the interpolant); violations of monotonicity are rejected at load.
    """

    kind = "table"


class RegressionPlateauSpec(MonotoneFunctionSpec):
    """Two-point alternative for regression: f0 with a plateau through 0.

    side="right": f1 = max(f0, level) on t >= 0 (f1(0) = level > 0);
    side="left": f1 = min(f0, -level) on t <= 0 (f1(0) = -level).
    """

    kind = "regression_plateau"
    is_alternative = True

    def __init__(self, base, level, side="right"):
        if base.mode != "regression":
            raise ConfigError("base spec must be in regression mode", field="base")
        if not level > 0.0:
            raise ConfigError("level must be positive", field="level")
        if side not in ("right", "left"):
            raise ConfigError("side must be 'right' or 'left'", field="side")
        super().__init__("regression")
        self.base = base
        self.level = float(level)
        self.side = side
        sgn = 1.0 if side == "right" else -1.0
        if float(base.value(sgn * 1.0)) * sgn <= level:
            self.cut = 1.0
        else:
            self.cut = _bisect(lambda s: float(base.value(sgn * s)) * sgn, 0.0, 1.0, level, tol=1e-15)

    @property
    def f_at_zero(self):
        return self.level if self.side == "right" else -self.level

    def value(self, t):
        t = np.asarray(t, dtype=np.float64)
        base = self.base.value(t)
        if self.side == "right":
            return np.where(t >= 0.0, np.maximum(base, self.level), base)
        return np.where(t <= 0.0, np.minimum(base, -self.level), base)

    def primitive(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.side == "right":
            inside = np.clip(t, 0.0, self.cut)
            beyond = np.maximum(t, self.cut)
            mod = self.level * inside + self.base.primitive(beyond) - self.base.primitive(self.cut)
            return np.where(t > 0.0, mod, self.base.primitive(t))
        inside = np.clip(t, -self.cut, 0.0)
        beyond = np.minimum(t, -self.cut)
        mod = -self.level * inside + self.base.primitive(beyond) - self.base.primitive(-self.cut)
        return np.where(t < 0.0, mod, self.base.primitive(t))

    def flat_radius(self, side):
        return self.base.flat_radius(side)

    def to_dict(self):
        return {"kind": self.kind, "mode": self.mode, "base": self.base.to_dict(),
                "level": self.level, "side": self.side}


class DensityPlateauSpec(MonotoneFunctionSpec):
    """Two-point alternative for densities.

    variant="raise": plateau at f0(0)+gap on [t_star, 0], f0 - eta above it,
    f0 untouched for t > 0; eta re-normalizes the total mass to 1.
    variant="lower": f1 = min(f0(0)-gap, f0+eta) on (0, 1], f0 elsewhere;
    experimental, see the ledgered open question.
    """

    kind = "density_plateau"
    is_alternative = True

    def __init__(self, base, gap, eta, variant="raise"):
        if base.mode != "density":
            raise ConfigError("base spec must be in density mode", field="base")
        if not gap > 0.0:
            raise ConfigError("gap must be positive", field="gap")
        if eta < 0.0:
            raise ConfigError("eta must be non-negative", field="eta")
        if variant not in ("raise", "lower"):
            raise ConfigError("variant must be 'raise' or 'lower'", field="variant")
        super().__init__("density")
        self.base = base
        self.gap = float(gap)
        self.eta = float(eta)
        self.variant = variant
        if variant == "raise":
            level = base.f_at_zero + gap + eta
            if float(base.value(-1.0)) <= level:
                self.t_star = -1.0
            else:
                # f0(-s) increases in s; plateau reaches to where it crosses the level
                self.t_star = -_bisect(lambda s: float(base.value(-s)), 0.0, 1.0, level, tol=1e-15)

    @property
    def f_at_zero(self):
        if self.variant == "raise":
            return self.base.f_at_zero + self.gap
        return self.base.f_at_zero - self.gap

    @property
    def support_end(self):
        if self.variant == "lower" and self.eta > 0.0:
            # mass is added on (0, 1], possibly past the base support
            return max(self.base.support_end, 1.0)
        return self.base.support_end

    def value(self, t):
        t = np.asarray(t, dtype=np.float64)
        base = self.base.value(t)
        if self.variant == "raise":
            mod = np.where(t <= self.t_star, base - self.eta, self.base.f_at_zero + self.gap)
            return np.where(t > 0.0, base, mod)
        level = self.base.f_at_zero - self.gap
        mod = np.minimum(base + self.eta, level)
        return np.where((t > 0.0) & (t <= 1.0), mod, base)

    def primitive(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.variant == "raise":
            level = self.base.f_at_zero + self.gap
            below = self.base.primitive(np.minimum(t, self.t_star)) - self.eta * (np.minimum(t, self.t_star) - self.t_star)
            mid = level * (np.clip(t, self.t_star, 0.0) - self.t_star)
            above = self.base.primitive(np.maximum(t, 0.0))
            anchor = level * (0.0 - self.t_star)  # primitive(0) must be 0
            return below - self.base.primitive(self.t_star) + mid + above - anchor
        # lower variant: modify (0, 1] only; integrate f1 - f0 numerically exactly
        out = self.base.primitive(t)
        upper = np.clip(t, 0.0, 1.0)
        out = out + self._lower_extra(upper)
        return out

    def _lower_extra(self, u):
        # integral_0^u (f1 - f0) for u in [0, 1], f1 = min(level, f0 + eta):
        # plateau holds while f0 + eta >= level, i.e. up to the crossing s2
        level = self.base.f_at_zero - self.gap
        s2 = self._crossing(level - self.eta)
        u = np.asarray(u, dtype=np.float64)
        a = np.minimum(u, s2)
        return level * a - self.base.primitive(a) + self.eta * np.maximum(u - s2, 0.0)

    def _crossing(self, level):
        if float(self.base.value(1.0)) >= level:
            return 1.0
        return _bisect(lambda s: -float(self.base.value(s)), 0.0, 1.0, -level, tol=1e-15)

    def flat_radius(self, side):
        return self.base.flat_radius(side)

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        end = self.support_end
        return self.primitive(np.clip(x, -1.0, end)) - self.primitive(-1.0)

    def total_mass(self):
        return float(self.cdf(self.support_end))

    def to_dict(self):
        return {"kind": self.kind, "mode": self.mode, "base": self.base.to_dict(),
                "gap": self.gap, "eta": self.eta, "variant": self.variant}


_KINDS = {
    cls.kind: cls
    for cls in (PowerSpec, FlatPowerSpec, PiecewiseLinearSpec, TableSpec)
}


def load_spec(data) -> MonotoneFunctionSpec:
    """Build a spec from its dict form, with field-level diagnostics."""
    if not isinstance(data, dict):
        raise ConfigError("function spec must be a JSON object", field="f0")
    kind = data.get("kind")
    if kind in (RegressionPlateauSpec.kind, DensityPlateauSpec.kind):
        cls = RegressionPlateauSpec if kind == RegressionPlateauSpec.kind else DensityPlateauSpec
        payload = {k: v for k, v in data.items() if k not in ("kind", "mode")}
        if "base" not in payload:
            raise ConfigError("derived spec needs a 'base' entry", field="base")
        try:
            return cls(load_spec(payload.pop("base")), **payload)
        except TypeError as exc:
            raise ConfigError(str(exc), field="params") from None
    if kind not in _KINDS:
        raise ConfigError(f"unknown kind {kind!r} (expected one of {sorted(_KINDS)})", field="kind")
    try:
        return _KINDS[kind](**{k: v for k, v in data.items() if k != "kind"})
    except TypeError as exc:
        raise ConfigError(str(exc), field="params") from None


def load_spec_json(text: str) -> MonotoneFunctionSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", field="f0")
    return load_spec(data)


# ---------------------------------------------------------------------------
# rate machinery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RateSolution:
    """Solution of the rate equations at one (C, n).

    ``n_or_inv_eps2`` is the sample size, or 1/eps^2 in the white noise model.
    A parametric flag marks a side where the equation is replaced by the
    parametric choice rate = C*n^(-1/2) (function flat on that side).
    """

    a: float
    r_a: float
    b: float
    r_b: float
    C: float
    n_or_inv_eps2: float
    parametric_right: bool = False
    parametric_left: bool = False

    @property
    def rate(self):
        """The attained rate max(a, b)."""
        return max(self.a, self.b)


def _rate_check(spec):
    if spec.is_alternative:
        raise ConfigError("rate machinery is defined for base specs, not two-point alternatives")


def _phi_side(spec, side):
    """r -> F0(sgn*r)/sqrt(r), strictly increasing where F0 > 0."""
    sgn = 1.0 if side == "right" else -1.0
    return lambda r: float(spec.F0(sgn * r)) / math.sqrt(r) if r > 0.0 else 0.0


def _side_max(spec, side, target=None):
    """Largest admissible radius on a side; grown for unbounded domains."""
    if side == "left" or spec.mode == "regression":
        return 1.0
    phi = _phi_side(spec, side)
    hi = 1.0
    for _ in range(80):
        if target is None or phi(hi) >= target:
            break
        hi *= 2.0
    return hi


def _solve_side(spec, C, n, side):
    target = C / math.sqrt(n)
    phi = _phi_side(spec, side)
    r_flat = spec.flat_radius(side)
    r_max = _side_max(spec, side, target)
    if phi(r_max) < target:
        if r_flat > 0.0:
            return target, r_flat, True
        n_min = (C / phi(r_max)) ** 2
        raise InfeasibleRateError(
            f"no {side}-side solution at n={n!r}: need n >= {n_min!r}", n_min=n_min)
    r = _bisect(phi, r_flat, r_max, target)
    return target / math.sqrt(r), r, False


def solve_rates(spec: MonotoneFunctionSpec, C: float, n: float) -> RateSolution:
    """Solve the rate equations for the spec at constant C and size n.

    Regression mode: F0(r_a) = a*r_a to the right and F0(-r_b) = b*r_b to the
    left; density mode has the sides reversed (deviations above f0(0) are
    governed by the left branch). On each equation both residuals satisfy the
    documented tolerances unless the side is flagged parametric.
    """
    _rate_check(spec)
    if not C > 0.0:
        raise ConfigError("C must be positive", field="C")
    if not n > 0.0:
        raise ConfigError("n must be positive", field="n")
    a_side, b_side = ("right", "left") if spec.mode == "regression" else ("left", "right")
    a, r_a, par_a = _solve_side(spec, C, n, a_side)
    b, r_b, par_b = _solve_side(spec, C, n, b_side)
    par_right = par_a if a_side == "right" else par_b
    par_left = par_b if a_side == "right" else par_a
    return RateSolution(a=a, r_a=r_a, b=b, r_b=r_b, C=C, n_or_inv_eps2=n,
                        parametric_right=par_right, parametric_left=par_left)


def primitive_F0(spec: MonotoneFunctionSpec, t):
    """The convex transform F0 at t (exact for closed-form kinds)."""
    out = spec.F0(t)
    return float(out) if np.ndim(t) == 0 else out


def _psi_grid(spec, s, side):
    sgn = 1.0 if side == "right" else -1.0
    t0 = 0.5 * min(1.0, spec.t_max if side == "right" else -spec.t_min)
    ts = t0 * np.exp2(-np.arange(_PSI_GRID_LEVELS + 1, dtype=np.float64))
    denom = np.asarray(spec.F0(sgn * ts))
    num = np.asarray(spec.F0(sgn * s * ts))
    ok = denom > 0.0
    return float(np.max(num[ok] / denom[ok]))


def psi(spec: MonotoneFunctionSpec, s: float, side: str = "right") -> float:
    """Local shape ratio psi(s) = limsup_{t->0} F0(st)/F0(t) on one side.

    Closed form s^(p+1) for exact power sides; 0 on [0,1) for sides where F0
    vanishes on an interval; otherwise the documented geometric-grid sup
    (exact for scale-invariant kinds). Always within [0, s], psi(0)=0,
    psi(1)=1.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if not 0.0 <= s <= 1.0:
        raise DomainError("psi argument must lie in [0, 1]")
    _rate_check(spec)
    if s == 1.0:
        return 1.0
    if s == 0.0:
        return 0.0
    if spec.flat_radius(side) > 0.0:
        return 0.0
    p = spec.power_exponent(side)
    if p is not None:
        return float(s ** (p + 1.0))
    return min(max(_psi_grid(spec, s, side), 0.0), float(s))


def eta_modulus(spec: MonotoneFunctionSpec, tau: float, t: float, side: str = "right") -> float:
    """Uniform-convergence modulus eta(t) with F0(st) <= (psi(s)+eta(t))F0(t), s <= tau.

    eta is the grid sup of G_t(s) - psi(s) with G_t(s) = sup_{u<=t} F0(su)/F0(u);
    it is 0 wherever F0(t) = 0, 0 identically for exact power sides, and uses
    the flat-side ramp construction when F0 vanishes on [0, r0].
    """
    if not 0.0 < tau < 1.0:
        raise DomainError("tau must lie in (0, 1)")
    if not 0.0 < t <= 1.0:
        raise DomainError("t must lie in (0, 1]")
    _rate_check(spec)
    r_flat = spec.flat_radius(side)
    if r_flat > 0.0:
        if t <= r_flat:
            return 0.0
        ramp_end = min(r_flat / tau, 1.0)
        if t >= ramp_end:
            return 1.0
        return (t - r_flat) / (ramp_end - r_flat)
    if spec.power_exponent(side) is not None:
        return 0.0
    sgn = 1.0 if side == "right" else -1.0
    us = t * np.exp2(-np.arange(_PSI_GRID_LEVELS + 1, dtype=np.float64))
    denom = np.asarray(spec.F0(sgn * us))
    us, denom = us[denom > 0.0], denom[denom > 0.0]
    if us.size == 0:
        return 0.0
    ss = np.linspace(0.0, tau, 201)
    ratios = np.asarray(spec.F0(sgn * np.outer(ss, us))) / denom
    g_t = ratios.max(axis=1)
    psis = np.array([psi(spec, float(s), side) for s in ss])
    return float(max(0.0, np.max(g_t - psis)))


def G0(spec: MonotoneFunctionSpec, t):
    """G0(t) = F0(t)/t (0 at 0); strictly increasing wherever F0 > 0."""
    t_arr = np.asarray(t, dtype=np.float64)
    out = np.where(t_arr == 0.0, 0.0, np.asarray(spec.F0(t_arr)) / np.where(t_arr == 0.0, 1.0, t_arr))
    return float(out) if np.ndim(t) == 0 else out


def G0_inv(spec: MonotoneFunctionSpec, a: float) -> float:
    """Inverse of G0 by bisection on the side matching sign(a)."""
    _rate_check(spec)
    if a == 0.0:
        return 0.0
    side = "right" if a > 0.0 else "left"
    sgn = 1.0 if a > 0.0 else -1.0
    g = lambda r: abs(G0(spec, sgn * r))
    r_max = 1.0
    if side == "right" and spec.mode == "density":
        for _ in range(80):
            if g(r_max) >= abs(a):
                break
            r_max *= 2.0
    if g(r_max) < abs(a):
        raise DomainError(f"G0 inverse argument {a!r} outside the achievable range")
    r = _bisect(g, spec.flat_radius(side), r_max, abs(a), tol=1e-15)
    return sgn * r


def _a_delta(spec, delta, side):
    sgn = 1.0 if side == "right" else -1.0
    return float(G0(spec, sgn * delta))


def H0(spec: MonotoneFunctionSpec, x: float, delta: float = 0.1) -> float:
    """Two-sided H0(x) = x*sqrt(|G0^{-1}(x)|), extended linearly beyond G0(+-delta).

    Strictly increasing and continuous; H0(a) = C*eps reproduces the rate
    equations on [0, a_delta].
    """
    _rate_check(spec)
    if not 0.0 < delta <= 1.0:
        raise ConfigError("delta must lie in (0, 1]", field="delta")
    if x == 0.0:
        return 0.0
    a_hi = _a_delta(spec, delta, "right")
    a_lo = _a_delta(spec, delta, "left")
    if x > a_hi:
        return a_hi * math.sqrt(delta) + (x - a_hi)
    if x < a_lo:
        return a_lo * math.sqrt(delta) + (x - a_lo)
    return x * math.sqrt(abs(G0_inv(spec, x)))


def H0_inv(spec: MonotoneFunctionSpec, y: float, delta: float = 0.1) -> float:
    """Inverse of H0; bisection via the rate map F0(r)/sqrt(r) inside [-a_delta, a_delta]."""
    _rate_check(spec)
    if y == 0.0:
        return 0.0
    side = "right" if y > 0.0 else "left"
    sgn = 1.0 if y > 0.0 else -1.0
    a_edge = _a_delta(spec, delta, side)
    top = a_edge * math.sqrt(delta)
    if abs(y) >= abs(top):
        return a_edge + (y - top)
    phi = _phi_side(spec, side)
    r = _bisect(phi, spec.flat_radius(side), delta, abs(y), tol=1e-15)
    return sgn * abs(y) / math.sqrt(r)


def chi_exponent(alpha_lip: float) -> float:
    """Tail-transform exponent (2*alpha+1)/(2*alpha) for a Lipschitz exponent alpha."""
    if not alpha_lip > 0.0:
        raise ConfigError("alpha_lip must be positive", field="alpha_lip")
    return (2.0 * alpha_lip + 1.0) / (2.0 * alpha_lip)

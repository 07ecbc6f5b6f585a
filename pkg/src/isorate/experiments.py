"""Experiment runners shared by the CLI and the acceptance suite.

Each runner is deterministic in its SeedSpec and returns plain dataclasses /
dicts that the CLI serializes as JSON/CSV.
"""

import math
from dataclasses import dataclass

import numpy as np

from .funcspace import MonotoneFunctionSpec, RateSolution, solve_rates
from .limitdist import LimitProcessSpec, limit_exceedance, simulate_slope_at_zero
from .minimax import (
    ModelSetup,
    build_alternative,
    constant_estimator,
    delta_star,
    dichotomy_estimator,
    local_average_estimator,
    lower_bound_witness,
    separation_bounds,
    two_point_risk,
)
from .models import estimate_wn, simulate_wn
from .stochastic import SeedSpec

__all__ = [
    "effective_C",
    "rate_C",
    "rate_table",
    "fit_loglog_slope",
    "wn_grid_points",
    "CoverageCell",
    "run_coverage_cell",
    "run_limit_scaling",
    "run_lq_moments",
    "run_minimax",
]


def effective_C(alpha_level: float) -> float:
    """C_eff with twice the boundary-crossing bound equal to alpha: 2/(alpha*sqrt(2pi))."""
    if not 0.0 < alpha_level < 1.0:
        raise ValueError("alpha_level must lie in (0, 1)")
    return 2.0 / (alpha_level * math.sqrt(2.0 * math.pi))


def rate_C(setup: ModelSetup, alpha_level: float, spec: MonotoneFunctionSpec = None) -> float:
    """Rate-equation C whose model-corrected effective constant meets alpha_level."""
    C = effective_C(alpha_level) * setup.correction
    if setup.model == "density":
        C *= math.sqrt(spec.f_at_zero)
    return C


def rate_table(spec: MonotoneFunctionSpec, C: float, n_values) -> list[dict]:
    """Rate-equation solutions plus their residuals, one row per n."""
    rows = []
    for n in n_values:
        sol = solve_rates(spec, C, float(n))
        target = C / math.sqrt(n)
        rows.append({
            "n": float(n),
            "a": sol.a, "r_a": sol.r_a, "b": sol.b, "r_b": sol.r_b,
            "rate": sol.rate,
            "parametric_right": sol.parametric_right,
            "parametric_left": sol.parametric_left,
            "resid_eq1_a": _eq1_resid(spec, sol, "a"),
            "resid_eq1_b": _eq1_resid(spec, sol, "b"),
            "resid_eq2_a": abs(math.sqrt(sol.r_a) * sol.a - target),
            "resid_eq2_b": abs(math.sqrt(sol.r_b) * sol.b - target),
        })
    return rows


def _eq1_resid(spec, sol: RateSolution, which: str):
    # a lives on the right side in regression mode, on the left in density mode
    a_side_sign = 1.0 if spec.mode == "regression" else -1.0
    sgn = a_side_sign if which == "a" else -a_side_sign
    parametric = sol.parametric_right if sgn > 0 else sol.parametric_left
    if parametric:
        return math.nan
    rate, radius = (sol.a, sol.r_a) if which == "a" else (sol.b, sol.r_b)
    return abs(float(spec.F0(sgn * radius)) - rate * radius)


def fit_loglog_slope(ns, rates) -> float:
    """Least-squares slope of log10(rate) against log10(n)."""
    return float(np.polyfit(np.log10(np.asarray(ns, float)), np.log10(np.asarray(rates, float)), 1)[0])


def wn_grid_points(spec: MonotoneFunctionSpec, C: float, epsilon: float,
                   per_radius: int = 120, lo: int = 1000, hi: int = 20000) -> int:
    """Knots per unit so the localization radius r_a holds >= per_radius knots."""
    sol = solve_rates(spec, C, epsilon**-2)
    r = min(sol.r_a, sol.r_b)
    return int(np.clip(math.ceil(per_radius / r), lo, hi))


@dataclass(frozen=True)
class CoverageCell:
    """Empirical deviation probability P(|f_hat(0) - f0(0)| >= max(a, b))."""

    model: str
    size: float
    C: float
    a: float
    b: float
    threshold: float
    p_hat: float
    se: float
    reps: int
    dropped: int

    @property
    def half_width(self):
        return 3.0 * self.se

    def row(self) -> dict:
        return {k: getattr(self, k) for k in (
            "model", "size", "C", "a", "b", "threshold", "p_hat", "se", "reps", "dropped")}


def run_coverage_cell(spec: MonotoneFunctionSpec, setup: ModelSetup, C: float,
                      reps: int, seed: SeedSpec, workers: int = 1) -> CoverageCell:
    """Coverage experiment for one model at one size.

    Non-interior random-design replicates are dropped and reported; the
    deviation guarantee only covers replicates whose read index is interior. ``workers`` only parallelizes the
    replicate loop; every replicate depends on (seed, index) alone, so the
    result is worker-count independent.
    """
    sol = solve_rates(spec, C, setup.size)
    threshold = sol.rate
    target = spec.f_at_zero

    def one(i):
        draw = setup.simulate(spec, seed.replicate(i))
        if not setup.interior(draw):
            return None
        return abs(setup.estimate(draw) - target) >= threshold

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, range(reps)))
    else:
        outcomes = [one(i) for i in range(reps)]
    dropped = sum(o is None for o in outcomes)
    hits = sum(bool(o) for o in outcomes)
    effective = reps - dropped
    p_hat = hits / effective if effective else math.nan
    se = math.sqrt(p_hat * (1.0 - p_hat) / effective) if effective else math.nan
    return CoverageCell(setup.model, setup.size, C, sol.a, sol.b, threshold,
                        p_hat, se, effective, dropped)


def run_limit_scaling(alpha_rv: float, gamma: float, C_values, reps_slope: int,
                      reps_exceed: int, seed: SeedSpec, window: float = 8.0,
                      step: float = 2e-3) -> list[dict]:
    """Brownian-scaling identity rows: exceedance vs slope-quantile per C.

    The slope sample is drawn once per (alpha, gamma) and reused across the
    C grid, since each C maps to a quantile of the same slope law.
    """
    spec = LimitProcessSpec(alpha_rv=alpha_rv, gamma=gamma, window=window, step=step)
    sample = simulate_slope_at_zero(spec, reps_slope, seed)
    rows = []
    for k, C in enumerate(C_values):
        exc = limit_exceedance(alpha_rv, gamma, C, reps_exceed, seed.replicate((k + 1) * reps_slope),
                               window=window, step=step)
        c_quant = C ** ((2.0 * alpha_rv - 2.0) / (2.0 * alpha_rv - 1.0))
        p_slope = sample.survival_pos(c_quant)
        se_slope = math.sqrt(p_slope * (1.0 - p_slope) / reps_slope)
        rows.append({
            "alpha_rv": alpha_rv, "gamma": gamma, "C": float(C),
            "slope_threshold": c_quant,
            "p_exceedance": exc.estimate, "se_exceedance": exc.se,
            "p_slope": p_slope, "se_slope": se_slope,
            "joint_se": math.hypot(exc.se, se_slope),
            "touch_fraction": sample.touch_fraction,
        })
    return rows


def run_lq_moments(spec: MonotoneFunctionSpec, eps_values, qs, reps: int, seed: SeedSpec,
                   C_for_grid: float = 1.0, alpha_lip: float = 1.0) -> list[dict]:
    """Scaled positive-part moments E[(eps^{-2a/(2a+1)} f_hat(0)_+)^q] per epsilon."""
    exponent = 2.0 * alpha_lip / (2.0 * alpha_lip + 1.0)
    rows = []
    for j, eps in enumerate(eps_values):
        m = wn_grid_points(spec, C_for_grid, eps)
        scaled = np.empty(reps)
        base = seed.replicate(j * reps)
        for i in range(reps):
            f_hat = estimate_wn(simulate_wn(spec, eps, m, base.replicate(i)))
            scaled[i] = eps ** (-exponent) * max(f_hat, 0.0)
        row = {"epsilon": float(eps), "grid_points": m, "reps": reps}
        for q in qs:
            row[f"moment_q{q}"] = float(np.mean(scaled**q))
            row[f"se_q{q}"] = float(np.std(scaled**q, ddof=1) / math.sqrt(reps))
        rows.append(row)
    return rows


def run_minimax(spec: MonotoneFunctionSpec, setup: ModelSetup, alpha_level: float,
                beta: float, reps: int, seed: SeedSpec,
                collect_errors: bool = False, C: float = None) -> dict:
    """Full two-point experiment: rates, alternative, risks, bounds, witness.

    ``C`` overrides the constant derived from alpha_level. With
    ``collect_errors`` the per-replicate estimator errors are attached under
    "errors" as (replicate, hypothesis, estimator, error) rows.
    """
    if C is None:
        C = rate_C(setup, alpha_level, spec)
    sol = solve_rates(spec, C, setup.size)
    deviation = "raise" if sol.a >= sol.b else "lower"
    rate = max(sol.a, sol.b)
    f00 = spec.f_at_zero if spec.mode == "density" else None
    d_star = delta_star(setup, C, beta, f00)
    pair = build_alternative(spec, rate, d_star, deviation=deviation)
    sep = separation_bounds(pair, setup, C, beta)
    eta = d_star / 4.0

    estimators = {
        "ls": setup.estimate,
        "constant": constant_estimator(pair.f0.f_at_zero),
        "dichotomy": dichotomy_estimator(pair, setup),
        "local_average": local_average_estimator(setup, sol.r_a),
    }
    threshold = eta * pair.gamma_n
    errors = np.empty((reps, 2, len(estimators)))
    names = list(estimators)
    for h, hyp in enumerate((pair.f0, pair.f1)):
        target = hyp.f_at_zero
        for i in range(reps):
            draw = setup.simulate(hyp, seed.replicate(h * reps + i))
            for e, name in enumerate(names):
                errors[i, h, e] = estimators[name](draw) - target
    exceed = (np.abs(errors) >= threshold).mean(axis=0)  # (hyp, estimator)

    ls_gamma = two_point_risk(pair, setup, setup.estimate, eta=1.0, reps=reps,
                              seed=seed.replicate(7_000_000), C=C, bound=sep.tv)
    witness = lower_bound_witness(pair, setup, reps, seed.replicate(9_000_000))

    suite = {}
    for e, name in enumerate(names):
        p0, p1 = float(exceed[0, e]), float(exceed[1, e])
        suite[name] = {
            "risk0": p0, "risk1": p1, "max_risk": max(p0, p1),
            "se": max(math.sqrt(p * (1.0 - p) / reps) for p in (p0, p1)),
        }

    out = {
        "model": setup.model, "size": setup.size, "C": C,
        "alpha": alpha_level, "beta": beta,
        "rates": {"a": sol.a, "r_a": sol.r_a, "b": sol.b, "r_b": sol.r_b},
        "delta_star": d_star, "eta": eta, "gamma_n": pair.gamma_n,
        "threshold": threshold, "eta_a": pair.eta_a,
        "deviation": pair.deviation, "experimental": pair.experimental,
        "tv_bound": sep.tv,
        "tv_empirical": witness.tv_hat, "tv_se": witness.tv_se,
        "witness": witness.witness, "witness_se": witness.witness_se,
        "ls_risk_at_gamma": {"risk0": ls_gamma.risk0.estimate, "risk1": ls_gamma.risk1.estimate,
                             "max_risk": ls_gamma.max_risk, "se": ls_gamma.max_se},
        "suite": suite,
    }
    if collect_errors:
        out["errors"] = [
            {"replicate": i, "hypothesis": h, "estimator": names[e],
             "error": float(errors[i, h, e])}
            for i in range(reps) for h in (0, 1) for e in range(len(names))
        ]
    return out

"""Seeded randomness, Brownian machinery and boundary-crossing closed forms."""

import math

import numpy as np
import pytest

from isorate.stochastic import (
    SeedSpec,
    brownian_two_sided,
    fixed_time_crossing_bound,
    generator,
    mc_probability,
    p_fixed_time_crossing,
    p_linear_boundary,
    p_twosided_upper,
    std_normal_cdf,
    step_bias_bound,
    truncation_residual_bound,
)


# ---------------------------------------------------------------------------
# normal cdf
# ---------------------------------------------------------------------------

def test_std_normal_cdf_values():
    assert std_normal_cdf(0.0) == 0.5
    # frozen from a 30-digit erf evaluation
    assert std_normal_cdf(2.0) == pytest.approx(0.977249868051820792799717362833, abs=1e-14)
    assert std_normal_cdf(-1.3) == pytest.approx(0.0968004845856103255417155607394, abs=1e-14)


def test_std_normal_cdf_symmetry():
    for x in np.linspace(-6, 6, 25):
        assert std_normal_cdf(x) + std_normal_cdf(-x) == pytest.approx(1.0, abs=1e-14)


# ---------------------------------------------------------------------------
# brownian paths
# ---------------------------------------------------------------------------

def test_brownian_requires_zero_and_sorted():
    with pytest.raises(ValueError):
        brownian_two_sided(SeedSpec(1), [0.5, 1.0])
    with pytest.raises(ValueError):
        brownian_two_sided(SeedSpec(1), [0.0, 1.0, 0.5])


def test_brownian_zero_pinned():
    w = brownian_two_sided(SeedSpec(1), [0.0])
    assert w.values[0] == 0.0


def test_brownian_deterministic():
    grid = np.linspace(-1, 1, 21)
    a = brownian_two_sided(SeedSpec(9, 3), grid)
    b = brownian_two_sided(SeedSpec(9, 3), grid)
    np.testing.assert_array_equal(a.values, b.values)
    c = brownian_two_sided(SeedSpec(9, 4), grid)
    assert np.any(c.values != a.values)


def test_brownian_marginal_variance_and_independence():
    reps = 100_000
    base = SeedSpec(1234)
    w_pos = np.empty(reps)
    w_neg = np.empty(reps)
    for i in range(reps):
        w = brownian_two_sided(base.replicate(i), (-1.0, 0.0, 1.0))
        w_neg[i], w_pos[i] = w.values[0], w.values[2]
    assert np.var(w_pos) == pytest.approx(1.0, abs=3 * math.sqrt(2 / reps))
    # the two sides are independent
    assert np.mean(w_pos * w_neg) == pytest.approx(0.0, abs=3 * 10**-2.5)


def test_brownian_increment_variance_scales_with_dt():
    reps = 20_000
    vals = np.empty(reps)
    for i in range(reps):
        w = brownian_two_sided(SeedSpec(77, i), (0.0, 0.25))
        vals[i] = w.values[1]
    assert np.var(vals) == pytest.approx(0.25, abs=3 * 0.25 * math.sqrt(2 / reps))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def test_p_linear_boundary():
    assert p_linear_boundary(1.0, 1.0) == pytest.approx(0.135335283236612691894, abs=1e-15)
    assert p_linear_boundary(3.0, 0.0) == 1.0
    with pytest.raises(ValueError):
        p_linear_boundary(0.0, 1.0)
    with pytest.raises(ValueError):
        p_linear_boundary(1.0, -0.5)


def test_p_twosided_upper_values():
    exact, bound = p_twosided_upper(1.0)
    assert exact == pytest.approx(0.336204002446341212854, abs=1e-13)
    assert bound == pytest.approx(0.398942280401432677940, abs=1e-15)


def test_p_twosided_upper_bound_inequality():
    for C in np.geomspace(0.1, 10.0, 25):
        exact, bound = p_twosided_upper(float(C))
        assert 0.0 < exact <= bound
        assert exact <= 1.0


def test_p_twosided_upper_mills_asymptotics():
    exact, _ = p_twosided_upper(50.0)
    assert exact * math.sqrt(2 * math.pi) * 50.0 == pytest.approx(1.0, abs=1e-3)


def test_p_twosided_upper_overflow_safe():
    exact, bound = p_twosided_upper(300.0)
    assert 0.0 < exact <= bound


def test_p_fixed_time_crossing_values_and_limits():
    # C -> 0+: the boundary degenerates; 1 - P ~ 2*C*sqrt(tau)*phi(0)
    assert p_fixed_time_crossing(1e-4, 0.5, 1.0) == pytest.approx(1.0, abs=1e-4)
    assert p_fixed_time_crossing(1e-8, 0.5, 1.0) == pytest.approx(1.0, abs=1e-6)
    val = p_fixed_time_crossing(2.0, 0.5, 1.0)
    assert 0.0 < val < 1.0
    with pytest.raises(ValueError):
        p_fixed_time_crossing(1.0, 1.5, 1.0)
    with pytest.raises(ValueError):
        p_fixed_time_crossing(1.0, 0.5, 0.0)


def test_p_fixed_time_crossing_bound_on_grid():
    for C in np.geomspace(0.2, 8.0, 10):
        for tau in np.linspace(0.05, 0.95, 10):
            for rho in np.linspace(0.1, 1.0, 10):
                val = p_fixed_time_crossing(float(C), float(tau), float(rho))
                assert val <= fixed_time_crossing_bound(float(C), float(tau), float(rho)) * (1 + 1e-12)
                assert 0.0 <= val <= 1.0


def test_p_fixed_time_crossing_exact_sampling_oracle():
    # inf_{s<=0} W_s - Cs is exactly -Exp(2C); W_tau is N(0, tau)
    C, tau, rho = 2.0, 0.5, 0.8
    rng = np.random.default_rng(5)
    reps = 200_000
    inf_left = -rng.exponential(1.0 / (2 * C), reps)
    w_tau = rng.normal(0.0, math.sqrt(tau), reps)
    p_hat = np.mean(inf_left <= w_tau - C * rho * tau)
    se = math.sqrt(p_hat * (1 - p_hat) / reps)
    assert p_fixed_time_crossing(C, tau, rho) == pytest.approx(p_hat, abs=3 * se)


# ---------------------------------------------------------------------------
# Monte Carlo driver
# ---------------------------------------------------------------------------

def test_mc_probability_constant_predicate():
    out = mc_probability(lambda s: True, 200, SeedSpec(1))
    assert out.estimate == 1.0 and out.se == 0.0
    with pytest.raises(ValueError):
        mc_probability(lambda s: True, 50, SeedSpec(1))


def test_mc_probability_sign_symmetry():
    def event(seed):
        return brownian_two_sided(seed, (0.0, 1.0)).values[1] > 0.0

    out = mc_probability(event, 100_000, SeedSpec(5))
    assert out.estimate == pytest.approx(0.5, abs=3 * out.se)


def test_mc_probability_brownian_sup():
    # P(sup_[0,1] W >= 1) = 2(1 - Phi(1)), frozen from the reflection identity
    step = 1e-3
    grid = np.arange(0, 1001) * step

    def event(seed):
        w = brownian_two_sided(seed, grid)
        return np.max(w.values) >= 1.0

    out = mc_probability(event, 20_000, SeedSpec(6))
    tol = 3 * out.se + step_bias_bound(step)
    assert out.estimate == pytest.approx(0.317310507862914102830, abs=tol)


def test_p_twosided_upper_matches_mc_probability():
    # the defining event via mc_probability with truncated per-replicate paths
    C, step = 1.0, 5e-3
    S = max(10.0 / C, 10.0)
    grid = np.concatenate((-np.arange(int(S / step), 0, -1) * step, np.arange(0, int(1 / step) + 1) * step))

    def event(seed):
        w = brownian_two_sided(seed, grid)
        k = int(np.nonzero(grid == 0.0)[0][0])
        left = np.min(w.values[: k + 1] - C * grid[: k + 1])
        return left <= np.min(w.values[k:])

    out = mc_probability(event, 20_000, SeedSpec(77))
    exact, _ = p_twosided_upper(C)
    tol = 3 * out.se + step_bias_bound(step) + truncation_residual_bound(C, S)
    assert out.estimate == pytest.approx(exact, abs=tol)


def test_mc_probability_deterministic_and_worker_invariant():
    def event(seed):
        return generator(seed).random() < 0.37

    a = mc_probability(event, 500, SeedSpec(11, 2))
    b = mc_probability(event, 500, SeedSpec(11, 2))
    c = mc_probability(event, 500, SeedSpec(11, 2), workers=4)
    assert a == b == c


def test_truncation_and_bias_bounds_positive():
    assert truncation_residual_bound(1.0, 10.0) > 0.0
    assert step_bias_bound(1e-3) == pytest.approx(0.65 * math.sqrt(1e-3))

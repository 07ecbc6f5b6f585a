"""The four observation models: simulators, estimators, switch consistency."""

import math

import numpy as np
import pytest

from isorate.errors import ConfigError
from isorate.funcspace import PowerSpec
from isorate.hull import pava, switch_event
from isorate.models import (
    DensityDraw,
    DesignSpec,
    estimate_grenander,
    estimate_grid,
    estimate_random,
    estimate_wn,
    simulate_density,
    simulate_grid,
    simulate_random_design,
    simulate_wn,
)
from isorate.stochastic import SeedSpec

LIN = PowerSpec("regression", c=1.0, p=1.0)
TRI = PowerSpec("density", c=1.0, p=1.0)


# ---------------------------------------------------------------------------
# white noise
# ---------------------------------------------------------------------------

def test_wn_noiseless_path_is_primitive():
    draw = simulate_wn(LIN, 0.0, 50, SeedSpec(1))
    np.testing.assert_allclose(draw.path.values, draw.path.knots**2 / 2, atol=1e-15)
    assert draw.path(0.0) == 0.0
    assert draw.path.origin_index == 50


def test_wn_grid_contains_endpoints_exactly():
    draw = simulate_wn(LIN, 0.1, 123, SeedSpec(1))
    assert draw.path.knots[0] == -1.0 and draw.path.knots[-1] == 1.0
    assert 0.0 in draw.path.knots


def test_wn_rejects_density_spec():
    with pytest.raises(ConfigError):
        simulate_wn(TRI, 0.1, 100, SeedSpec(1))


def test_wn_noiseless_estimate_near_zero():
    m = 200
    est = estimate_wn(simulate_wn(LIN, 0.0, m, SeedSpec(2)))
    assert abs(est) <= 1.0 / m
    assert est == pytest.approx(-0.5 / m, rel=1e-9)  # slope of the segment ending at 0


def test_wn_jump_estimate():
    # f0 = sgn(t)/2: the noiseless path is |t|/2, whose GCM left slope at 0 is -1/2
    jump = PowerSpec("regression", c=0.5, p=0.0)
    est = estimate_wn(simulate_wn(jump, 0.0, 150, SeedSpec(3)))
    assert est == pytest.approx(-0.5, abs=1e-9)
    assert -0.5 <= est <= 0.0


def test_wn_path_variance():
    reps = 10_000
    eps = 0.7
    vals = np.empty(reps)
    base = SeedSpec(99)
    for i in range(reps):
        draw = simulate_wn(LIN, eps, 4, base.replicate(i))
        vals[i] = draw.path.values[-1] - 0.5  # Y(1) - F0(1)
    tol = 3 * eps**2 * math.sqrt(2 / reps)
    assert np.var(vals) == pytest.approx(eps**2, abs=tol)


def test_wn_switch_consistency():
    rng = np.random.default_rng(0)
    for i in range(300):
        draw = simulate_wn(LIN, 0.3, 100, SeedSpec(7, i))
        est = estimate_wn(draw)
        path, split = draw.gcm_path()
        for a in (rng.uniform(-1, 1), est - 1e-4, est + 1e-4):
            assert switch_event(path, a, split) == (est >= a)


# ---------------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------------

def test_grid_n1_noiseless_hand_hull():
    draw = simulate_grid(LIN, 1, 0.0, "gaussian", SeedSpec(1))
    path, split = draw.gcm_path()
    np.testing.assert_allclose(path.knots, [-2, -1, 0, 1])
    np.testing.assert_allclose(path.values, [1, 0, 0, 1], atol=1e-15)
    assert estimate_grid(draw) == 0.0


def test_grid_noiseless_minorant_bound():
    for n in (5, 40):
        draw = simulate_grid(LIN, n, 0.0, "gaussian", SeedSpec(2))
        assert estimate_grid(draw) <= float(LIN.value(1.0 / n)) + 1e-12


def test_grid_estimator_equals_pava_at_zero_block():
    for kind in ("gaussian", "uniform", "laplace"):
        for i in range(50):
            draw = simulate_grid(LIN, 25, 0.8, kind, SeedSpec(5, i))
            fit = pava(draw.y)
            # observation at x=0 sits at array position n
            assert estimate_grid(draw) == pytest.approx(fit.levels[25], abs=1e-11)


def test_grid_noise_kinds_have_requested_sd():
    n = 20_000
    for kind in ("gaussian", "uniform", "laplace"):
        draw = simulate_grid(PowerSpec("regression", c=0.0, p=1.0), n, 0.5, kind, SeedSpec(8))
        assert np.std(draw.y) == pytest.approx(0.5, rel=0.05)


def test_grid_switch_consistency():
    rng = np.random.default_rng(1)
    for i in range(300):
        draw = simulate_grid(LIN, 30, 0.6, "laplace", SeedSpec(9, i))
        est = estimate_grid(draw)
        path, split = draw.gcm_path()
        for a in (rng.uniform(-1.5, 1.5), est - 1e-4, est + 1e-4):
            assert switch_event(path, a, split) == (est >= a)


# ---------------------------------------------------------------------------
# random design
# ---------------------------------------------------------------------------

def test_random_noiseless_flat_function():
    flat = PowerSpec("regression", c=0.0, p=1.0)
    draw = simulate_random_design(flat, DesignSpec(), 50, 0.0, "gaussian", SeedSpec(3))
    est = estimate_random(draw)
    assert est.value == 0.0 and est.interior


def test_random_estimator_equals_pava_at_m():
    for i in range(50):
        draw = simulate_random_design(LIN, DesignSpec(), 40, 0.5, "gaussian", SeedSpec(4, i))
        fit = pava(draw.y)
        m = draw.m
        est = estimate_random(draw)
        assert est.value == pytest.approx(fit.levels[m - 1], abs=1e-11)


def test_random_boundary_flags():
    draw = simulate_random_design(LIN, DesignSpec(), 30, 0.1, "gaussian", SeedSpec(5))
    shifted = type(draw)(x=draw.x + 2.0, y=draw.y, sigma=draw.sigma,
                         error_kind=draw.error_kind, design=draw.design, spec=draw.spec)
    est = estimate_random(shifted)  # every design point >= 0 -> m = 1
    assert not est.interior
    shifted_neg = type(draw)(x=draw.x - 2.0, y=draw.y, sigma=draw.sigma,
                             error_kind=draw.error_kind, design=draw.design, spec=draw.spec)
    est2 = estimate_random(shifted_neg)  # no design point >= 0
    assert not est2.interior


def test_random_degenerate_design_rejected():
    draw = simulate_random_design(LIN, DesignSpec(), 5, 0.1, "gaussian", SeedSpec(6))
    bad = type(draw)(x=np.zeros(5) + 0.3, y=draw.y, sigma=draw.sigma,
                     error_kind=draw.error_kind, design=draw.design, spec=draw.spec)
    with pytest.raises(ValueError):
        estimate_random(bad)


def test_random_rate_improves_with_n():
    meds = []
    for n in (1000, 10000):
        vals = []
        for i in range(200):
            draw = simulate_random_design(LIN, DesignSpec(), n, 0.1, "gaussian", SeedSpec(61, i))
            vals.append(abs(estimate_random(draw).value))
        meds.append(np.median(vals))
    assert meds[1] <= meds[0]


def test_random_switch_consistency():
    rng = np.random.default_rng(2)
    for i in range(300):
        draw = simulate_random_design(LIN, DesignSpec(), 30, 0.6, "uniform", SeedSpec(11, i))
        est = estimate_random(draw).value
        path, split = draw.gcm_path()
        for a in (rng.uniform(-1.5, 1.5), est - 1e-4, est + 1e-4):
            assert switch_event(path, a, split) == (est >= a)


# ---------------------------------------------------------------------------
# density / Grenander
# ---------------------------------------------------------------------------

def test_grenander_small_sample_values():
    # anchored at (-1, 0): a single observation gives slope 1/(x+1) at -1
    d = DensityDraw(np.array([0.3]), TRI)
    assert estimate_grenander(d, -1.0) == pytest.approx(1.0 / 1.3, rel=1e-12)
    # three observations, evaluated at 0: single chord from (-1,0) to (0.9,1)
    d3 = DensityDraw(np.array([0.2, 0.5, 0.9]), TRI)
    assert estimate_grenander(d3, 0.0) == pytest.approx(10.0 / 19.0, rel=1e-12)


def test_grenander_monotone_in_evaluation_point():
    draw = simulate_density(TRI, 300, SeedSpec(12))
    points = np.linspace(-0.9, 1.2, 15)
    vals = [estimate_grenander(draw, float(t)) for t in points]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    assert all(v >= 0.0 for v in vals)


def test_grenander_beyond_data_is_zero():
    d = DensityDraw(np.array([-0.8, -0.5]), TRI)
    assert estimate_grenander(d, 0.0) == 0.0


def test_density_sampling_matches_cdf():
    draw = simulate_density(TRI, 50_000, SeedSpec(13))
    for q in (0.1, 0.5, 0.9):
        x_q = float(TRI.inverse_cdf(q))
        emp = np.mean(draw.sample <= x_q)
        assert emp == pytest.approx(q, abs=3 * math.sqrt(q * (1 - q) / 50_000))
    assert np.all(np.diff(draw.sample) >= 0)


def test_density_switch_consistency():
    rng = np.random.default_rng(3)
    for i in range(300):
        draw = simulate_density(TRI, 40, SeedSpec(14, i))
        est = estimate_grenander(draw, 0.0)
        path, split = draw.gcm_path()
        for lam in (rng.uniform(0.0, 1.2), est - 1e-4, est + 1e-4):
            assert switch_event(path, lam, split) == (est >= lam)


def test_draw_csv_serialization(tmp_path):
    draws = [
        simulate_wn(LIN, 0.1, 5, SeedSpec(20)),
        simulate_grid(LIN, 4, 0.1, "gaussian", SeedSpec(21)),
        simulate_random_design(LIN, DesignSpec(), 6, 0.1, "gaussian", SeedSpec(22)),
        simulate_density(TRI, 6, SeedSpec(23)),
    ]
    expected_headers = ["knot,value", "index,x,y", "order,x,y", "order,x"]
    for draw, header in zip(draws, expected_headers):
        out = tmp_path / f"{type(draw).__name__}.csv"
        draw.to_csv(out)
        lines = out.read_text().strip().splitlines()
        assert lines[0] == header
        assert len(lines) > 1

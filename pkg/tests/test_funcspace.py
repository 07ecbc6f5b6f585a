"""Function specs, psi/eta moduli, G0/H0 and the rate-equation solver."""

import json
import math

import numpy as np
import pytest
from scipy.integrate import quad

from isorate.errors import ConfigError, DomainError, InfeasibleRateError
from isorate.funcspace import (
    FlatPowerSpec,
    G0,
    G0_inv,
    H0,
    H0_inv,
    PiecewiseLinearSpec,
    PowerSpec,
    TableSpec,
    chi_exponent,
    eta_modulus,
    load_spec,
    load_spec_json,
    primitive_F0,
    psi,
    solve_rates,
)

LIN = PowerSpec("regression", c=1.0, p=1.0)


# ---------------------------------------------------------------------------
# spec construction, validation, serialization
# ---------------------------------------------------------------------------

def test_power_primitive_examples():
    assert primitive_F0(LIN, 0.4) == pytest.approx(0.08, abs=1e-15)
    assert primitive_F0(LIN, 0.0) == 0.0
    flat = FlatPowerSpec("regression", r0=0.3, c=1.0, p=1.0)
    assert primitive_F0(flat, 0.2) == 0.0
    assert primitive_F0(flat, -0.2) == 0.0


def test_primitive_F0_domain():
    with pytest.raises(DomainError):
        primitive_F0(LIN, 1.5)


def test_primitive_matches_quadrature():
    specs = [
        PowerSpec("regression", c=2.0, p=0.5),
        FlatPowerSpec("regression", r0=0.2, c=1.5, p=2.0, r0_left=0.1, c_left=0.7, p_left=1.0),
        PiecewiseLinearSpec("regression", [-1, -0.4, 0, 0.3, 1], [-2, -0.5, 0, 0, 1.4]),
    ]
    for spec in specs:
        for t in (-0.9, -0.3, 0.15, 0.6, 1.0):
            num, _ = quad(lambda s: float(spec.value(s)), 0.0, t, limit=200)
            assert float(spec.primitive(t)) == pytest.approx(num, abs=1e-9)


def test_density_modes_normalized():
    for spec in (PowerSpec("density", c=1.0, p=1.0),
                 PowerSpec("density", c=0.8, p=2.0),
                 FlatPowerSpec("density", r0=0.15, c=1.0, p=1.0)):
        assert float(spec.cdf(spec.support_end)) == pytest.approx(1.0, abs=1e-12)
        assert spec.f_at_zero > 0
        ts = np.linspace(-1, spec.support_end, 200)
        assert np.all(np.diff(spec.value(ts)) <= 1e-12)


def test_density_F0_transform():
    spec = PowerSpec("density", c=1.0, p=1.0)
    # F0(t) = int_0^t (f0(0) - f0(s)) ds = |t|^2/2 inside the support
    for t in (-0.8, -0.2, 0.1, 0.3):
        assert float(spec.F0(t)) == pytest.approx(t * t / 2, abs=1e-12)
    end = spec.support_end
    assert float(spec.F0(2.0)) == pytest.approx(end**2 / 2 + spec.f_at_zero * (2.0 - end), rel=1e-12)


def test_density_inverse_cdf_roundtrip():
    for spec in (PowerSpec("density", c=1.0, p=1.0), PowerSpec("density", c=0.5, p=1.7)):
        u = np.linspace(1e-9, 1 - 1e-9, 101)
        x = spec.inverse_cdf(u)
        np.testing.assert_allclose(spec.cdf(x), u, atol=1e-10)


def test_piecewise_validation():
    with pytest.raises(ConfigError):
        PiecewiseLinearSpec("regression", [-1, 0, 1], [0.5, 0, 1])  # decreasing start
    with pytest.raises(ConfigError):
        PiecewiseLinearSpec("regression", [-1, 0, 1], [-1, 0.1, 1])  # f0(0) != 0
    with pytest.raises(ConfigError):
        PiecewiseLinearSpec("regression", [-0.5, 0, 1], [-1, 0, 1])  # domain not covered
    with pytest.raises(ConfigError):
        PiecewiseLinearSpec("density", [-1, 0, 1], [1.0, 0.8, 0.9])  # not monotone
    with pytest.raises(ConfigError) as err:
        PiecewiseLinearSpec("density", [-1, 0, 1], [1.0, 0.8, 0.0])  # mass != 1
    assert "integrate" in str(err.value)


def test_table_kind_rejects_non_monotone():
    with pytest.raises(ConfigError):
        TableSpec("regression", [-1, 0, 0.5, 1], [-1, 0, -0.1, 1])
    spec = TableSpec("regression", [-1, 0, 1], [-1, 0, 1])
    assert spec.kind == "table"


def test_json_roundtrip_and_diagnostics():
    spec = FlatPowerSpec("regression", r0=0.2, c=1.5, p=2.0)
    again = load_spec(json.loads(json.dumps(spec.to_dict())))
    assert again == spec
    with pytest.raises(ConfigError) as err:
        load_spec({"kind": "nope", "mode": "regression"})
    assert err.value.field == "kind"
    with pytest.raises(ConfigError) as err:
        load_spec({"kind": "power", "mode": "regression", "c": -1.0})
    assert err.value.field == "c"
    with pytest.raises(ConfigError) as err:
        load_spec_json('{"kind": "power",,}')
    assert "line 1" in str(err.value)


# ---------------------------------------------------------------------------
# psi and eta
# ---------------------------------------------------------------------------

def test_psi_power_closed_form():
    assert psi(LIN, 0.5) == pytest.approx(0.25, abs=1e-15)
    assert psi(PowerSpec("regression", c=2.0, p=2.0), 0.5, "left") == pytest.approx(0.125)
    assert psi(LIN, 1.0) == 1.0 and psi(LIN, 0.0) == 0.0


def test_psi_flat_convention():
    flat = FlatPowerSpec("regression", r0=0.3, c=1.0, p=1.0)
    assert psi(flat, 0.9) == 0.0
    assert psi(flat, 1.0) == 1.0


def test_psi_range_and_errors():
    with pytest.raises(DomainError):
        psi(LIN, 1.5)
    pw = PiecewiseLinearSpec("regression", [-1, 0, 0.25, 1], [-1, 0, 0.25, 2.5])
    for s in np.linspace(0, 1, 21):
        val = psi(pw, float(s))
        assert 0.0 <= val <= s + 1e-15


def test_psi_multiplicative_property_closed_form():
    spec = PowerSpec("regression", c=1.0, p=1.5)
    rng = np.random.default_rng(3)
    for _ in range(50):
        s, u = rng.uniform(0, 1, 2)
        assert psi(spec, s * u) == pytest.approx(psi(spec, s) * psi(spec, u), abs=1e-12)


def test_psi_bounded_by_identity_on_grid_kinds():
    table = TableSpec("regression", [-1, -0.5, 0, 0.5, 1], [-2, -0.3, 0, 0.3, 2])
    for s in np.linspace(0, 1, 11):
        assert psi(table, float(s)) <= s + 1e-15


def test_eta_power_exactly_zero():
    assert eta_modulus(LIN, 0.5, 0.3) == 0.0
    assert eta_modulus(LIN, 0.9, 1.0) == 0.0


def test_eta_flat_construction():
    flat = FlatPowerSpec("regression", r0=0.3, c=1.0, p=1.0)
    assert eta_modulus(flat, 0.5, 0.2) == 0.0  # F0 = 0 there
    assert eta_modulus(flat, 0.5, 0.8) == 1.0  # beyond r0/tau = 0.6
    mid = eta_modulus(flat, 0.5, 0.45)
    assert 0.0 < mid < 1.0


def test_eta_monotone_and_vanishing_for_kinked_f0():
    pw = PiecewiseLinearSpec("regression", [-1, 0, 0.25, 1], [-1, 0, 0.25, 2.5])
    ts = [0.8 * 2.0**-k for k in range(8)]
    vals = [eta_modulus(pw, 0.5, t) for t in ts]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))  # non-increasing along dyadic t
    assert vals[-1] <= 1e-6
    assert all(v >= 0.0 for v in vals)


def test_eta_modulus_inequality_on_grid():
    pw = PiecewiseLinearSpec("regression", [-1, 0, 0.25, 1], [-1, 0, 0.25, 2.5])
    tau = 0.6
    for t in (0.9, 0.5, 0.2, 0.05):
        eta = eta_modulus(pw, tau, t)
        f0t = float(pw.F0(t))
        for s in np.linspace(0.0, tau, 41):
            assert float(pw.F0(s * t)) <= (psi(pw, float(s)) + eta) * f0t + 1e-12


def test_eta_domain():
    with pytest.raises(DomainError):
        eta_modulus(LIN, 1.2, 0.5)
    with pytest.raises(DomainError):
        eta_modulus(LIN, 0.5, 0.0)


# ---------------------------------------------------------------------------
# G0 / H0
# ---------------------------------------------------------------------------

def test_G0_values_and_inverse():
    assert G0(LIN, 0.0) == 0.0
    assert G0(LIN, 0.4) == pytest.approx(0.2)
    assert G0(LIN, -0.4) == pytest.approx(-0.2)
    assert G0_inv(LIN, 0.2) == pytest.approx(0.4, abs=1e-9)
    assert G0_inv(LIN, -0.2) == pytest.approx(-0.4, abs=1e-9)
    with pytest.raises(DomainError):
        G0_inv(LIN, 0.7)  # G0(1) = 0.5 is the max


def test_G0_strictly_increasing():
    ts = np.linspace(-1, 1, 41)
    vals = [G0(LIN, float(t)) for t in ts]
    assert np.all(np.diff(vals) > 0)


def test_H0_example_and_extension():
    # H0(a) = a*sqrt(2a) for f0(t)=t
    assert H0(LIN, 0.08, delta=0.5) == pytest.approx(0.032, abs=1e-12)
    assert H0(LIN, 0.0) == 0.0
    a_delta = G0(LIN, 0.1)  # default delta
    assert H0(LIN, a_delta + 1.0) == pytest.approx(H0(LIN, a_delta) + 1.0, abs=1e-12)
    a_neg = G0(LIN, -0.1)
    assert H0(LIN, a_neg - 1.0) == pytest.approx(H0(LIN, a_neg) - 1.0, abs=1e-12)


def test_H0_strictly_increasing_and_inverse():
    xs = np.linspace(-0.3, 0.3, 31)
    vals = [H0(LIN, float(x)) for x in xs]
    assert np.all(np.diff(vals) > 0)
    for x in (-0.2, -0.04, 0.001, 0.04, 0.2):
        y = H0(LIN, x)
        assert H0_inv(LIN, y) == pytest.approx(x, abs=1e-10)
        assert H0(LIN, H0_inv(LIN, y)) == pytest.approx(y, abs=1e-10)


def test_H0_regular_variation_exponent():
    # for power F0 with exponent alpha, H0 is regularly varying with
    # beta = (2*alpha - 1)/(2*alpha - 2)
    for p in (1.0, 2.0):
        spec = PowerSpec("regression", c=1.0, p=p)
        alpha = p + 1.0
        beta = (2 * alpha - 1) / (2 * alpha - 2)
        for s in (0.25, 0.5, 0.8):
            t = 1e-5
            ratio = H0(spec, s * t) / H0(spec, t)
            assert ratio == pytest.approx(s**beta, rel=1e-6)


# ---------------------------------------------------------------------------
# rate solver
# ---------------------------------------------------------------------------

def test_solve_rates_analytic_linear():
    sol = solve_rates(LIN, C=1.0, n=500.0)
    assert sol.a == pytest.approx(0.1, abs=1e-9)
    assert sol.r_a == pytest.approx(0.2, abs=1e-9)
    assert sol.b == pytest.approx(0.1, abs=1e-9)
    assert sol.r_b == pytest.approx(0.2, abs=1e-9)
    assert not (sol.parametric_left or sol.parametric_right)


def test_solve_rates_residuals():
    for spec in (LIN, PowerSpec("regression", c=0.7, p=2.0),
                 PiecewiseLinearSpec("regression", [-1, 0, 0.3, 1], [-1, 0, 0.6, 2.0])):
        for n in (1e3, 1e6):
            sol = solve_rates(spec, 1.0, n)
            target = 1.0 / math.sqrt(n)
            assert abs(math.sqrt(sol.r_a) * sol.a - target) <= 1e-12
            assert abs(float(spec.F0(sol.r_a)) - sol.a * sol.r_a) <= 1e-9 * max(1.0, sol.a * sol.r_a)
            assert abs(float(spec.F0(-sol.r_b)) - sol.b * sol.r_b) <= 1e-9 * max(1.0, sol.b * sol.r_b)


def test_solve_rates_flat_side_parametric():
    spec = FlatPowerSpec("regression", r0=1.0, c=1.0, p=1.0, r0_left=0.0)
    sol = solve_rates(spec, C=2.0, n=400.0)
    assert sol.parametric_right and not sol.parametric_left
    assert sol.a == pytest.approx(0.1, abs=1e-15)  # C/sqrt(n)
    assert sol.r_a == 1.0
    assert sol.b > 0


def test_solve_rates_flat_region_caps():
    # unsolvable at small n because F0(1) is tiny, flat region present
    spec = FlatPowerSpec("regression", r0=0.5, c=0.01, p=3.0)
    sol = solve_rates(spec, C=1.0, n=30.0)
    assert sol.parametric_right
    assert sol.r_a == 0.5


def test_solve_rates_infeasible_names_minimal_n():
    with pytest.raises(InfeasibleRateError) as err:
        solve_rates(LIN, C=5.0, n=10.0)
    assert err.value.n_min == pytest.approx((5.0 / 0.5) ** 2)
    assert str(round(err.value.n_min)) in str(err.value).replace(".0", "")
    # and it is actually feasible just above n_min
    sol = solve_rates(LIN, C=5.0, n=err.value.n_min * 1.0001)
    assert sol.r_a <= 1.0


def test_solve_rates_density_reversed_sides():
    spec = PowerSpec("density", c=1.0, p=1.0)
    sol = solve_rates(spec, C=1.0, n=1000.0)
    target = 1.0 / math.sqrt(1000.0)
    # density mode: a solves the left equation F0(-r_a) = a r_a
    assert abs(float(spec.F0(-sol.r_a)) - sol.a * sol.r_a) <= 1e-9
    assert abs(float(spec.F0(sol.r_b)) - sol.b * sol.r_b) <= 1e-9
    assert abs(math.sqrt(sol.r_a) * sol.a - target) <= 1e-12


def test_solve_rates_rate_scaling_exponent():
    # a ~ n^(-alpha/(2 alpha + 1)) for Lipschitz exponent alpha
    for alpha in (0.5, 1.0, 2.0):
        spec = PowerSpec("regression", c=1.0, p=alpha)
        ns = [1e3, 1e4, 1e5]
        rates = [solve_rates(spec, 1.0, n).a for n in ns]
        slope = np.polyfit(np.log10(ns), np.log10(rates), 1)[0]
        assert slope == pytest.approx(-alpha / (2 * alpha + 1), abs=0.01)


def test_chi_exponent():
    assert chi_exponent(1.0) == 1.5
    assert chi_exponent(0.5) == 2.0
    assert chi_exponent(1e6) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ConfigError):
        chi_exponent(0.0)

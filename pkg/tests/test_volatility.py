import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvacomplete.curves import PAYER, RECEIVER, CurveSet, SwapSpec, annuity, fair_swap_rate, flat_curve
from cvacomplete.errors import DomainError, InputError, ScheduleError
from cvacomplete.volatility import VolCube, expected_positive_part, norm_cdf, swaption_price, vol_lookup

rates = st.floats(0.001, 0.10)
vols = st.floats(0.01, 1.0)
expiries = st.floats(0.05, 30.0)


def mc_lognormal(F, K, vol, T, n=1_000_000, seed=0):
    z = np.random.default_rng(seed).standard_normal(n)
    s = F * np.exp(-0.5 * vol * vol * T + vol * math.sqrt(T) * z)
    payoff = np.maximum(s - K, 0.0)
    return payoff.mean(), payoff.std(ddof=1) / math.sqrt(n)


def test_singleton_cube_is_flat():
    cube = VolCube.from_points([(5.0, 10.0, 0.0, 0.20)])
    for query in [(0.5, 1.0, 0.0), (5.0, 10.0, 0.05), (40.0, 40.0, -0.03)]:
        assert vol_lookup(cube, *query, atm_rate=0.02) == 0.20


def test_strike_midpoint():
    cube = VolCube.from_points([(5.0, 10.0, -0.01, 0.22), (5.0, 10.0, 0.01, 0.18)])
    assert vol_lookup(cube, 5.0, 10.0, 0.03, 0.03) == pytest.approx(0.20, abs=1e-15)


def test_grid_points_exact():
    rng = np.random.default_rng(7)
    points = [(e, n, k, float(rng.uniform(0.1, 0.4)))
              for e in (1.0, 2.0, 5.0) for n in (2.0, 10.0) for k in (-0.01, 0.0, 0.01)]
    cube = VolCube.from_points(points)
    for e, n, k, v in points:
        assert vol_lookup(cube, e, n, 0.03 + k, 0.03) == v


def test_trilinear_interior():
    points = [(e, n, k, 0.1 + 0.01 * e + 0.002 * n + 2.0 * k)
              for e in (1.0, 3.0) for n in (2.0, 6.0) for k in (-0.01, 0.01)]
    cube = VolCube.from_points(points)
    # a linear function is reproduced exactly
    assert vol_lookup(cube, 2.5, 3.0, 0.025, 0.02) == pytest.approx(0.1 + 0.025 + 0.006 + 0.01, abs=1e-15)


@pytest.mark.parametrize("points", [
    [],
    [(1.0, 1.0, 0.0, 0.2), (1.0, 1.0, 0.0, 0.3)],
    [(1.0, 1.0, 0.0, -0.2)],
    [(1.0, 1.0, 0.0, 0.2), (2.0, 2.0, 0.0, 0.2)],
])
def test_cube_validation(points):
    with pytest.raises(InputError):
        VolCube.from_points(points)


def test_lookup_domain():
    with pytest.raises(DomainError):
        vol_lookup(VolCube.flat(0.2), 0.0, 1.0, 0.02, 0.02)


def test_black_degenerate_cases():
    assert expected_positive_part(0.02, 0.02, 0.0, 5.0, PAYER) == 0.0
    assert expected_positive_part(0.02, 0.02, 0.0, 5.0, RECEIVER) == 0.0
    assert expected_positive_part(0.03, 0.02, 0.0, 3.0, PAYER) == pytest.approx(0.01, abs=1e-17)
    assert expected_positive_part(0.03, 0.02, 0.0, 3.0, RECEIVER) == 0.0
    assert expected_positive_part(0.03, 0.0, 0.3, 3.0, PAYER) == 0.03
    with pytest.raises(DomainError):
        expected_positive_part(-0.01, 0.02, 0.2, 1.0)
    with pytest.raises(DomainError):
        expected_positive_part(0.02, 0.02, -0.2, 1.0)


def test_black_atm_against_mc():
    black = expected_positive_part(0.02, 0.02, 0.20, 5.0, PAYER)
    mc, se = mc_lognormal(0.02, 0.02, 0.20, 5.0)
    assert abs(black - mc) < 3 * se
    # the 0.4 F vol sqrt(T) shortcut is only an approximation of the exact value
    assert black == pytest.approx(0.02 * 0.2 * math.sqrt(5) * 0.4, rel=0.02)


def test_black_random_draws_against_mc():
    rng = np.random.default_rng(11)
    for i in range(20):
        F = rng.uniform(0.01, 0.05)
        K = F * math.exp(rng.uniform(-0.5, 0.5))
        vol, T = rng.uniform(0.1, 0.5), rng.uniform(0.5, 10.0)
        mc, se = mc_lognormal(F, K, vol, T, seed=100 + i)
        assert abs(expected_positive_part(F, K, vol, T) - mc) < 3 * se


@settings(max_examples=200, deadline=None)
@given(rates, rates, vols, expiries)
def test_parity_and_bounds(F, K, vol, T):
    payer = expected_positive_part(F, K, vol, T, PAYER)
    receiver = expected_positive_part(F, K, vol, T, RECEIVER)
    assert abs((payer - receiver) - (F - K)) < 1e-12
    assert max(F - K, 0.0) - 1e-15 <= payer <= F
    assert max(K - F, 0.0) - 1e-15 <= receiver <= K


@settings(max_examples=100, deadline=None)
@given(rates, rates, vols, vols, st.floats(0.5, 10.0))
def test_monotone_in_vol(F, K, v1, v2, T):
    lo, hi = sorted((v1, v2))
    # outside this regime the vega is below double precision of the price
    if hi - lo < 1e-3 or lo * math.sqrt(T) < 0.05 or abs(math.log(F / K)) > 0.5:
        return
    for side in (PAYER, RECEIVER):
        assert expected_positive_part(F, K, hi, T, side) > expected_positive_part(F, K, lo, T, side)


def test_norm_cdf_against_mpmath():
    mpmath.mp.dps = 40
    for x in np.linspace(-8.0, 8.0, 3201):
        reference = float(mpmath.ncdf(mpmath.mpf(float(x))))
        assert abs(norm_cdf(float(x)) - reference) < 1e-12


# composed from the separately verified annuity and residual fair rate
ORACLE_SWAPTION_5Y5Y = 0.015235431405270903


def test_swaption_composition():
    flat = flat_curve(0.02)
    curves = CurveSet(flat, flat)
    K = fair_swap_rate(flat, flat, SwapSpec(0.0, 10.0, 0.0, 1.0), 0.0)
    spec = SwapSpec(0.0, 10.0, K, 1.0)
    price = swaption_price(curves, spec, VolCube.flat(0.20), 5.0, K, PAYER)
    fwd = fair_swap_rate(flat, flat, spec, 5.0)
    assert price == pytest.approx(annuity(flat, spec, 5.0) * expected_positive_part(fwd, K, 0.20, 5.0), rel=1e-14)
    assert price == pytest.approx(ORACLE_SWAPTION_5Y5Y, rel=1e-10)


def test_swaption_parity(synthetic_curves):
    spec = SwapSpec(0.0, 20.0, 0.03)
    cube = VolCube.from_points([(e, 10.0, k, 0.2 - 2 * k) for e in (1.0, 10.0) for k in (-0.01, 0.01)])
    for expiry in (0.5, 3.0, 10.0, 19.5):
        payer = swaption_price(synthetic_curves, spec, cube, expiry, 0.03, PAYER)
        receiver = swaption_price(synthetic_curves, spec, cube, expiry, 0.03, RECEIVER)
        level = annuity(synthetic_curves.discount, spec, expiry)
        fwd = fair_swap_rate(synthetic_curves.tenor, synthetic_curves.discount, spec, expiry)
        assert payer - receiver == pytest.approx(level * (fwd - 0.03), abs=1e-14)


def test_swaption_zero_vol_at_last_roll():
    flat = flat_curve(0.02)
    spec = SwapSpec(0.0, 10.0, 0.0, 0.5)
    K = fair_swap_rate(flat, flat, spec, 9.5)
    price = swaption_price(CurveSet(flat, flat), spec.with_rate(K), VolCube.flat(1e-12), 9.5, K)
    assert 0.0 <= price < 1e-12


def test_swaption_expiry_after_maturity(synthetic_curves):
    with pytest.raises(ScheduleError):
        swaption_price(synthetic_curves, SwapSpec(0.0, 5.0, 0.03), VolCube.flat(0.2), 5.0, 0.03)

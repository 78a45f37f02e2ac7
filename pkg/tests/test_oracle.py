import math

import numpy as np
import pytest

from cvacomplete.curves import PAYER, RECEIVER, CurveSet, atm_swap, flat_curve
from cvacomplete.errors import InputError
from cvacomplete.funding import CONSTANT_AVERAGE, FLAT, build_funding_curve, swap_funding_cost
from cvacomplete.oracle import SimConfig, mc_expected_positive_part, mc_swap_funding_exact, validate_approximation
from cvacomplete.volatility import VolCube, expected_positive_part


@pytest.mark.parametrize("kwargs", [{"n_paths": 0}, {"correlation": 1.5}, {"rate_vol": -0.1}, {"seed": -1}])
def test_config_validation(kwargs):
    with pytest.raises(InputError):
        SimConfig(**kwargs)


def test_zero_vol_is_exact():
    assert mc_expected_positive_part(0.03, 0.02, 0.0, 5.0, SimConfig()) == (0.03 - 0.02, 0.0)
    assert mc_expected_positive_part(0.03, 0.02, 0.0, 5.0, SimConfig(), RECEIVER) == (0.0, 0.0)


def test_zero_strike_recovers_forward():
    est, se = mc_expected_positive_part(0.02, 0.0, 0.3, 4.0, SimConfig(n_paths=200_000))
    assert abs(est - 0.02) < 3 * se


def test_black_agreement():
    est, se = mc_expected_positive_part(0.02, 0.02, 0.20, 5.0, SimConfig(n_paths=1_000_000))
    assert abs(est - expected_positive_part(0.02, 0.02, 0.20, 5.0)) < 3 * se


def test_reproducible():
    cfg = SimConfig(n_paths=50_000, seed=42)
    assert mc_expected_positive_part(0.02, 0.021, 0.25, 3.0, cfg) == \
        mc_expected_positive_part(0.02, 0.021, 0.25, 3.0, cfg)
    other = mc_expected_positive_part(0.02, 0.021, 0.25, 3.0, SimConfig(n_paths=50_000, seed=43))
    assert other != mc_expected_positive_part(0.02, 0.021, 0.25, 3.0, cfg)


def test_standard_error_scaling():
    errors = [mc_expected_positive_part(0.02, 0.02, 0.2, 5.0, SimConfig(n_paths=n))[1]
              for n in (10_000, 100_000, 1_000_000)]
    for coarse, fine in zip(errors, errors[1:]):
        assert coarse / fine == pytest.approx(math.sqrt(10.0), rel=0.20)


def test_zero_funding_is_zero(synthetic_curves):
    spec = atm_swap(synthetic_curves, 5.0)
    zero = build_funding_curve(CONSTANT_AVERAGE, spread=0.0, horizon=5.0)
    assert mc_swap_funding_exact(spec, synthetic_curves, zero, SimConfig(n_paths=1000)) == (0.0, 0.0)


def test_zero_correlation_suite():
    rng = np.random.default_rng(2024)
    for _ in range(10):
        rate = rng.uniform(0.01, 0.05)
        curves = CurveSet(flat_curve(rate), flat_curve(rate + rng.uniform(0.0, 0.005)))
        spec = atm_swap(curves, float(rng.integers(2, 11)), direction=str(rng.choice([PAYER, RECEIVER])))
        funding = build_funding_curve(FLAT, curves=curves, horizon=spec.maturity)
        cfg = SimConfig(n_paths=20_000, seed=int(rng.integers(2 ** 32)), rate_vol=rng.uniform(0.1, 0.4))
        eq5 = swap_funding_cost(spec, curves, VolCube.flat(cfg.rate_vol), funding)
        mc, se = mc_swap_funding_exact(spec, curves, funding, cfg)
        assert abs(mc - eq5) < 3 * se


def test_positive_covariance_raises_cost(synthetic_curves):
    spec = atm_swap(synthetic_curves, 10.0)
    funding = build_funding_curve(FLAT, curves=synthetic_curves, horizon=10.0)
    cfg = SimConfig(n_paths=100_000, correlation=0.5, spread_vol=0.3)
    # receiver fixed leg posts against (S - K)+, which co-moves with the spread when correlation > 0
    report = validate_approximation(spec, synthetic_curves, funding, cfg, RECEIVER)
    assert report["eq2_mc"] - 3 * report["std_error"] > report["eq5_value"]
    assert report["discrepancy_pct"] > 0.0
    assert set(report) == {"eq5_value", "eq2_mc", "std_error", "discrepancy_pct"}

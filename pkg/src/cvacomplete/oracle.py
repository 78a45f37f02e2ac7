"""Monte Carlo oracle for annuity-measure expectations and the exact funding cost.

Random numbers: numpy's PCG64 (PCG-XSL-RR 128/64) seeded through a
``SeedSequence``; each 64-bit output keeps its top 53 bits, shifted to the
cell midpoint so that u lies strictly inside (0, 1), and is mapped to a
standard normal with the inverse normal CDF.  Every roll date draws from its
own spawned substream and paths are consumed in fixed-size chunks, so
results depend only on (seed, n_paths) and not on how the work is split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import ndtri

from .curves import PAYER, SIDES, CurveSet, SwapSpec
from .errors import InputError
from .funding import FundingCurve, exposure_option, roll_terms, swap_funding_cost
from .volatility import VolCube

CHUNK = 1 << 18


@dataclass(frozen=True)
class SimConfig:
    n_paths: int = 100_000
    seed: int = 20100916
    correlation: float = 0.0
    rate_vol: float = 0.20
    spread_vol: float = 0.0

    def __post_init__(self) -> None:
        if int(self.n_paths) != self.n_paths or self.n_paths < 1:
            raise InputError(f"n_paths must be a positive integer, got {self.n_paths}")
        if not (0 <= self.seed < 2 ** 64):
            raise InputError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if not (math.isfinite(self.correlation) and -1.0 <= self.correlation <= 1.0):
            raise InputError(f"correlation must lie in [-1, 1], got {self.correlation}")
        if not (self.rate_vol >= 0.0 and self.spread_vol >= 0.0):
            raise InputError("vols must be non-negative")


def _streams(seed: int, count: int) -> list[np.random.PCG64]:
    return [np.random.PCG64(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _normals(bitgen: np.random.PCG64, n: int) -> np.ndarray:
    raw = bitgen.random_raw(n)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53
    return ndtri(u)


class _Moments:
    """Mean and variance accumulated chunk by chunk (Chan et al. merge)."""

    def __init__(self) -> None:
        self.n = 0
        self.mean = 0.0
        self.m2 = 0.0

    def add(self, x: np.ndarray) -> None:
        nb = x.size
        mb = float(np.mean(x))
        m2b = float(np.sum((x - mb) ** 2))
        n = self.n + nb
        delta = mb - self.mean
        self.mean += delta * nb / n
        self.m2 += m2b + delta * delta * self.n * nb / n
        self.n = n

    @property
    def std_error(self) -> float:
        if self.n < 2:
            return 0.0
        return math.sqrt(self.m2 / (self.n - 1) / self.n)


def _lognormal(level: float, vol: float, t: float, z: np.ndarray) -> np.ndarray:
    sd = vol * math.sqrt(t)
    return level * np.exp(-0.5 * sd * sd + sd * z)


def _payoff(s: np.ndarray, strike: float, side: str) -> np.ndarray:
    return np.maximum(s - strike, 0.0) if side == PAYER else np.maximum(strike - s, 0.0)


def mc_expected_positive_part(F: float, K: float, vol: float, T: float, cfg: SimConfig,
                              side: str = PAYER) -> tuple[float, float]:
    """(estimate, standard error) of E[(S_T - K)+] (payer) or E[(K - S_T)+] (receiver)."""
    if side not in SIDES:
        raise InputError(f"side must be one of {SIDES}, got {side!r}")
    if vol == 0.0 or T == 0.0:
        return float(_payoff(np.array([F]), K, side)[0]), 0.0
    bitgen = _streams(cfg.seed, 1)[0]
    acc = _Moments()
    remaining = cfg.n_paths
    while remaining:
        n = min(CHUNK, remaining)
        acc.add(_payoff(_lognormal(F, vol, T, _normals(bitgen, n)), K, side))
        remaining -= n
    return acc.mean, acc.std_error


def mc_swap_funding_exact(spec: SwapSpec, curves: CurveSet, funding: FundingCurve, cfg: SimConfig,
                          side: Optional[str] = None) -> tuple[float, float]:
    """Simulate the funding cost with the spread kept inside the expectation.

    On each roll date the residual swap rate and the funding spread are
    jointly lognormal around their forwards, with ``cfg.correlation`` between
    their drivers.  No drift or measure-change correction is applied.
    """
    side = side or spec.direction
    terms = roll_terms(spec, curves, VolCube.flat(cfg.rate_vol or 1.0), side)
    option = exposure_option(side)
    tau, K = spec.float_tenor, spec.fixed_rate
    rho = cfg.correlation
    rho_c = math.sqrt(max(0.0, 1.0 - rho * rho))
    estimate, variance = 0.0, 0.0
    for t, level, fwd, bitgen in zip(terms.dates, terms.annuities, terms.forwards,
                                     _streams(cfg.seed, terms.dates.size)):
        foo = funding.foo(t)
        acc = _Moments()
        remaining = cfg.n_paths
        while remaining:
            n = min(CHUNK, remaining)
            z_rate = _normals(bitgen, n)
            z_spread = rho * z_rate + rho_c * _normals(bitgen, n)
            rate = _lognormal(fwd, cfg.rate_vol, t, z_rate)
            spread = _lognormal(foo, cfg.spread_vol, t, z_spread)
            acc.add(tau * level * spread * _payoff(rate, K, option))
            remaining -= n
        estimate += acc.mean
        variance += acc.std_error ** 2
    return estimate, math.sqrt(variance)


def validate_approximation(spec: SwapSpec, curves: CurveSet, funding: FundingCurve, cfg: SimConfig,
                           side: Optional[str] = None) -> dict:
    """Compare the shipped funding pricer with the simulated exact cost."""
    eq5 = swap_funding_cost(spec, curves, VolCube.flat(cfg.rate_vol or 1.0), funding, side) \
        if cfg.rate_vol > 0.0 else _zero_vol_cost(spec, curves, funding, side)
    mc, se = mc_swap_funding_exact(spec, curves, funding, cfg, side)
    discrepancy = 100.0 * (mc - eq5) / eq5 if eq5 != 0.0 else 0.0
    return {"eq5_value": eq5, "eq2_mc": mc, "std_error": se, "discrepancy_pct": discrepancy}


def _zero_vol_cost(spec: SwapSpec, curves: CurveSet, funding: FundingCurve, side: Optional[str]) -> float:
    terms = roll_terms(spec, curves, VolCube.flat(1.0), side)
    intrinsic = _payoff(terms.forwards, spec.fixed_rate, terms.option)
    return float(np.sum(spec.float_tenor * terms.annuities * funding.foo(terms.dates) * intrinsic))

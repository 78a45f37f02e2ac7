"""Discount curves, swap schedules, annuities and fair swap rates.

Times are ACT/365F year fractions measured from the valuation date.
Discount factors are interpolated log-linearly between pillars (piecewise
constant instantaneous forwards) and extrapolated with a flat continuously
compounded zero rate beyond the last pillar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, InputError, ScheduleError

_SCHEDULE_TOL = 1e-9

PAYER = "payer"
RECEIVER = "receiver"
SIDES = (PAYER, RECEIVER)


def _check_times(times: Sequence[float], what: str) -> None:
    for t in times:
        if not math.isfinite(t):
            raise InputError(f"{what}: non-finite time {t!r}")
    if len(times) == 0:
        raise ScheduleError(f"{what}: no pillars")
    if times[0] <= 0.0:
        raise ScheduleError(f"{what}: first pillar time must be > 0, got {times[0]}")
    for a, b in zip(times, times[1:]):
        if not b > a:
            raise ScheduleError(f"{what}: pillar times must be strictly increasing ({a} then {b})")


@dataclass(frozen=True, eq=False)
class DiscountCurve:
    """Log-linear discount curve anchored at df(0) = 1.

    ``times`` and ``log_dfs`` include the anchor point at t = 0.
    """

    times: np.ndarray
    log_dfs: np.ndarray
    curve_id: str = "curve"
    valuation_date: Optional[date] = None
    _tail_rate: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        log_dfs = np.asarray(self.log_dfs, dtype=float)
        if times.ndim != 1 or times.shape != log_dfs.shape or times.size < 2:
            raise InputError("curve needs matching 1-d time and discount arrays with at least one pillar")
        if times[0] != 0.0 or log_dfs[0] != 0.0:
            raise InputError("curve must be anchored at df(0) = 1")
        if not np.all(np.isfinite(log_dfs)):
            raise InputError(f"{self.curve_id}: discount factors must be finite and strictly positive")
        _check_times(list(times[1:]), self.curve_id)
        times.setflags(write=False)
        log_dfs.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "log_dfs", log_dfs)
        object.__setattr__(self, "_tail_rate", -log_dfs[-1] / times[-1])

    @classmethod
    def from_discount_factors(cls, pillars: Iterable[Tuple[float, float]], curve_id: str = "curve",
                              valuation_date: Optional[date] = None) -> "DiscountCurve":
        pillars = list(pillars)
        times = [float(t) for t, _ in pillars]
        _check_times(times, curve_id)
        dfs = [float(d) for _, d in pillars]
        if any(not (math.isfinite(d) and d > 0.0) for d in dfs):
            raise InputError(f"{curve_id}: discount factors must be finite and strictly positive")
        return cls(np.array([0.0] + times), np.array([0.0] + [math.log(d) for d in dfs]),
                   curve_id=curve_id, valuation_date=valuation_date)

    @property
    def pillars(self) -> list[tuple[float, float]]:
        return [(float(t), math.exp(l)) for t, l in zip(self.times[1:], self.log_dfs[1:])]

    @property
    def breakpoints(self) -> np.ndarray:
        """Times where the instantaneous forward rate may jump."""
        return self.times[1:]

    @property
    def last_pillar(self) -> float:
        return float(self.times[-1])

    def df(self, t):
        """Discount factor from 0 to ``t``; accepts scalars or arrays."""
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
            raise DomainError(f"discount factor requested at invalid time {t!r}")
        log_df = np.where(arr <= self.times[-1],
                          np.interp(arr, self.times, self.log_dfs),
                          -self._tail_rate * arr)
        out = np.exp(log_df)
        return float(out) if out.ndim == 0 else out

    def zero_rate(self, t: float) -> float:
        if t <= 0.0:
            return float((self.log_dfs[1]) / -self.times[1])
        return -math.log(self.df(t)) / t

    def instantaneous_forward(self, a: float, b: float) -> float:
        """Constant forward rate on [a, b]; exact when [a, b] spans no pillar."""
        return (math.log(self.df(a)) - math.log(self.df(b))) / (b - a)

    def forward_rate(self, t1: float, t2: float) -> float:
        """Simply compounded forward rate for the period [t1, t2]."""
        if not t2 > t1:
            raise DomainError(f"forward period must have t2 > t1 (got {t1}, {t2})")
        return (self.df(t1) / self.df(t2) - 1.0) / (t2 - t1)


def build_discount_curve(pillars: Iterable[Tuple[float, float]], curve_id: str = "curve",
                         valuation_date: Optional[date] = None) -> DiscountCurve:
    """Curve from (time, continuously compounded zero rate) pillars."""
    pillars = list(pillars)
    times = [float(t) for t, _ in pillars]
    rates = [float(r) for _, r in pillars]
    for r in rates:
        if not math.isfinite(r):
            raise InputError(f"{curve_id}: non-finite zero rate {r!r}")
    _check_times(times, curve_id)
    log_dfs = [-r * t for t, r in zip(times, rates)]
    return DiscountCurve(np.array([0.0] + times), np.array([0.0] + log_dfs),
                         curve_id=curve_id, valuation_date=valuation_date)


def flat_curve(rate: float, curve_id: str = "flat") -> DiscountCurve:
    return build_discount_curve([(1.0, rate)], curve_id=curve_id)


def discount(curve: DiscountCurve, t):
    return curve.df(t)


@dataclass(frozen=True)
class CurveSet:
    """Overnight curve for discounting, tenor curve for forward projection."""

    discount: DiscountCurve
    tenor: DiscountCurve


@dataclass(frozen=True)
class SwapSpec:
    start: float
    maturity: float
    fixed_rate: float
    float_tenor: float = 0.5
    direction: str = PAYER
    notional: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.start) and math.isfinite(self.maturity)):
            raise InputError("swap dates must be finite")
        if self.start < 0.0 or not self.maturity > self.start:
            raise ScheduleError(f"swap needs 0 <= start < maturity (got {self.start}, {self.maturity})")
        if not self.float_tenor > 0.0:
            raise ScheduleError(f"float tenor must be positive, got {self.float_tenor}")
        if self.direction not in SIDES:
            raise InputError(f"direction must be one of {SIDES}, got {self.direction!r}")
        n = (self.maturity - self.start) / self.float_tenor
        if abs(n - round(n)) > _SCHEDULE_TOL * max(1.0, n) or round(n) < 1:
            raise ScheduleError(
                f"irregular schedule: (maturity - start) / tenor = {n} is not a positive integer")

    @property
    def n_periods(self) -> int:
        return int(round((self.maturity - self.start) / self.float_tenor))

    def payment_dates(self) -> np.ndarray:
        """Fixed and floating payment dates T_alpha+tau, ..., T_beta."""
        k = np.arange(1, self.n_periods + 1)
        dates = self.start + k * self.float_tenor
        dates[-1] = self.maturity
        return dates

    def roll_dates(self) -> np.ndarray:
        """Funding roll dates strictly inside the swap: tau, 2 tau, ..., T_beta - tau."""
        return self.payment_dates()[:-1]

    def with_rate(self, fixed_rate: float) -> "SwapSpec":
        return SwapSpec(self.start, self.maturity, fixed_rate, self.float_tenor, self.direction, self.notional)


def _remaining(spec: SwapSpec, as_of: float) -> np.ndarray:
    if as_of < 0.0:
        raise DomainError(f"as_of must be >= 0, got {as_of}")
    dates = spec.payment_dates()
    remaining = dates[dates > as_of + _SCHEDULE_TOL]
    if remaining.size == 0 or as_of > spec.maturity - spec.float_tenor + _SCHEDULE_TOL:
        raise ScheduleError(f"empty schedule: as_of {as_of} is beyond the last accrual start "
                            f"{spec.maturity - spec.float_tenor}")
    return remaining


def annuity(curve: DiscountCurve, spec: SwapSpec, as_of: float = 0.0) -> float:
    """Value today of a unit fixed leg paying on the dates after ``as_of``."""
    dates = _remaining(spec, as_of)
    return float(np.sum(spec.float_tenor * curve.df(dates)))


def _float_leg(fwd_curve: DiscountCurve, disc_curve: DiscountCurve, spec: SwapSpec, as_of: float) -> float:
    ends = _remaining(spec, as_of)
    starts = ends - spec.float_tenor
    starts[0] = max(starts[0], spec.start)
    return float(np.sum((fwd_curve.df(starts) / fwd_curve.df(ends) - 1.0) * disc_curve.df(ends)))


def fair_swap_rate(fwd_curve: DiscountCurve, disc_curve: DiscountCurve, spec: SwapSpec,
                   as_of: float = 0.0) -> float:
    """Rate equating fixed and floating legs over the periods paying after ``as_of``.

    Forwards are projected on ``fwd_curve`` and every cash flow is discounted
    on ``disc_curve``.
    """
    if as_of >= spec.maturity:
        raise ScheduleError(f"degenerate schedule: as_of {as_of} >= maturity {spec.maturity}")
    return _float_leg(fwd_curve, disc_curve, spec, as_of) / annuity(disc_curve, spec, as_of)


def swap_leg_pvs(fwd_curve: DiscountCurve, disc_curve: DiscountCurve, spec: SwapSpec,
                 as_of: float = 0.0) -> tuple[float, float]:
    """(fixed leg PV, floating leg PV) in currency."""
    fixed = spec.notional * spec.fixed_rate * annuity(disc_curve, spec, as_of)
    floating = spec.notional * _float_leg(fwd_curve, disc_curve, spec, as_of)
    return fixed, floating


def atm_swap(curves: CurveSet, maturity: float, float_tenor: float = 0.5, direction: str = PAYER,
             start: float = 0.0, notional: float = 1.0) -> SwapSpec:
    """Swap struck at its own fair rate (zero value at inception)."""
    probe = SwapSpec(start, maturity, 0.0, float_tenor, direction, notional)
    return probe.with_rate(fair_swap_rate(curves.tenor, curves.discount, probe, start))

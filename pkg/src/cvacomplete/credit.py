"""Piecewise-constant hazard curves bootstrapped from running CDS spreads."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple

import numpy as np

from .curves import DiscountCurve
from .errors import ArbitrageError, CalibrationError, DomainError, InputError, ScheduleError

HAZARD_BRACKET = (0.0, 10.0)
HAZARD_TOL = 1e-12


@dataclass(frozen=True)
class CdsQuoteSet:
    """Running CDS spreads (decimal per annum) by maturity."""

    maturities: Tuple[float, ...]
    spreads: Tuple[float, ...]
    recovery: float = 0.40
    premium_frequency: int = 4

    def __post_init__(self) -> None:
        object.__setattr__(self, "maturities", tuple(float(m) for m in self.maturities))
        object.__setattr__(self, "spreads", tuple(float(s) for s in self.spreads))
        if len(self.maturities) == 0 or len(self.maturities) != len(self.spreads):
            raise InputError("need the same, non-zero number of maturities and spreads")
        if not all(math.isfinite(m) for m in self.maturities) or self.maturities[0] <= 0.0:
            raise ScheduleError("CDS maturities must be finite and > 0")
        for a, b in zip(self.maturities, self.maturities[1:]):
            if not b > a:
                raise ScheduleError(f"CDS maturities must be strictly increasing ({a} then {b})")
        for s in self.spreads:
            if not (math.isfinite(s) and s >= 0.0):
                raise InputError(f"CDS spreads must be finite and non-negative, got {s}")
        if not (0.0 <= self.recovery < 1.0):
            raise InputError(f"recovery must lie in [0, 1), got {self.recovery}")
        if int(self.premium_frequency) != self.premium_frequency or self.premium_frequency < 1:
            raise InputError(f"premium frequency must be a positive integer, got {self.premium_frequency}")

    @classmethod
    def from_bps(cls, rows: Iterable[Tuple[float, float]], recovery: float = 0.40,
                 premium_frequency: int = 4) -> "CdsQuoteSet":
        rows = list(rows)
        return cls(tuple(m for m, _ in rows), tuple(s * 1e-4 for _, s in rows), recovery, premium_frequency)

    def __len__(self) -> int:
        return len(self.maturities)


@dataclass(frozen=True, eq=False)
class CreditCurve:
    """Hazard ``hazards[i]`` applies on (times[i-1], times[i]]; the last one extends flat."""

    times: np.ndarray
    hazards: np.ndarray
    recovery: float = 0.40
    _knots: np.ndarray = field(init=False, repr=False)
    _cum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        times = np.array(self.times, dtype=float, ndmin=1)
        hazards = np.array(self.hazards, dtype=float, ndmin=1)
        if times.shape != hazards.shape or times.size == 0:
            raise InputError("credit curve needs one hazard per knot")
        if times[0] <= 0.0 or np.any(np.diff(times) <= 0.0):
            raise ScheduleError("credit curve knots must be positive and strictly increasing")
        if not np.all(np.isfinite(hazards)) or np.any(hazards < 0.0):
            raise InputError("hazard rates must be finite and non-negative")
        # full recovery is a valid curve (zero loss); only bootstrapping needs LGD > 0
        if not (0.0 <= self.recovery <= 1.0):
            raise InputError(f"recovery must lie in [0, 1], got {self.recovery}")
        knots = np.concatenate(([0.0], times))
        cum = np.concatenate(([0.0], np.cumsum(hazards * np.diff(knots))))
        for arr in (times, hazards, knots, cum):
            arr.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "hazards", hazards)
        object.__setattr__(self, "_knots", knots)
        object.__setattr__(self, "_cum", cum)

    @classmethod
    def flat(cls, hazard: float, recovery: float = 0.40) -> "CreditCurve":
        return cls(np.array([1.0]), np.array([hazard]), recovery)

    @property
    def lgd(self) -> float:
        return 1.0 - self.recovery

    @property
    def breakpoints(self) -> np.ndarray:
        return self.times

    def _segment(self, t: np.ndarray) -> np.ndarray:
        return np.clip(np.searchsorted(self.times, t, side="left"), 0, self.times.size - 1)

    def hazard(self, t):
        arr = np.asarray(t, dtype=float)
        out = self.hazards[self._segment(arr)]
        return float(out) if out.ndim == 0 else out

    def cumulative_hazard(self, t):
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
            raise DomainError(f"survival requested at invalid time {t!r}")
        i = self._segment(arr)
        out = self._cum[i] + self.hazards[i] * (arr - self._knots[i])
        return float(out) if out.ndim == 0 else out

    def survival(self, t):
        """Q(default time > t)."""
        out = np.exp(-np.asarray(self.cumulative_hazard(t)))
        return float(out) if out.ndim == 0 else out

    def bumped(self, shift: float) -> "CreditCurve":
        return CreditCurve(self.times, self.hazards + shift, self.recovery)


def survival(curve: CreditCurve, t):
    return curve.survival(t)


def default_in_interval(curve: CreditCurve, t1: float, t2: float) -> float:
    """Probability of default in (t1, t2]."""
    if t1 < 0.0:
        raise DomainError(f"t1 must be >= 0, got {t1}")
    if t1 > t2:
        raise DomainError(f"need t1 <= t2 (got {t1}, {t2})")
    return curve.survival(t1) - curve.survival(t2)


def _expm1_ratio(z: np.ndarray) -> np.ndarray:
    """(1 - exp(-z)) / z with the z -> 0 limit."""
    small = np.abs(z) < 1e-8
    safe = np.where(small, 1.0, z)
    return np.where(small, 1.0 - 0.5 * z, -np.expm1(-safe) / safe)


def protection_integral(credit: CreditCurve, disc: DiscountCurve, a: float, b: float) -> float:
    """Integral of df(u) dQ(default <= u) over (a, b], in closed form.

    The interval is split at hazard knots and discount pillars so that both
    the hazard and the instantaneous forward rate are constant on each piece.
    """
    if b <= a:
        return 0.0
    cuts = np.concatenate(([a], credit.breakpoints, disc.breakpoints, [b]))
    cuts = np.unique(cuts[(cuts >= a) & (cuts <= b)])
    x, y = cuts[:-1], cuts[1:]
    lam = credit.hazard(0.5 * (x + y))
    df_x = disc.df(x)
    fwd = (np.log(df_x) - np.log(disc.df(y))) / (y - x)
    dt = y - x
    terms = lam * df_x * credit.survival(x) * dt * _expm1_ratio((lam + fwd) * dt)
    return float(np.sum(terms))


def protection_integral_grid(credit: CreditCurve, disc: DiscountCurve, a: float, b: float,
                             step: float = 1.0 / 365.0) -> float:
    """Daily-grid fallback: sum of df(mid) times default probability per cell."""
    if b <= a:
        return 0.0
    n = max(1, int(math.ceil((b - a) / step)))
    grid = np.linspace(a, b, n + 1)
    q = credit.survival(grid)
    return float(np.sum(disc.df(0.5 * (grid[:-1] + grid[1:])) * (q[:-1] - q[1:])))


def premium_schedule(maturity: float, frequency: int) -> np.ndarray:
    """Payment dates rolled back from maturity; a short stub sits at the front."""
    step = 1.0 / frequency
    n = int(math.ceil(maturity / step - 1e-9))
    dates = maturity - step * np.arange(n - 1, -1, -1)
    dates = dates[dates > 1e-9]
    return np.concatenate(([0.0], dates))


def cds_legs(credit: CreditCurve, disc: DiscountCurve, maturity: float, frequency: int = 4) -> tuple[float, float]:
    """(protection leg incl. LGD, risky annuity incl. accrual-on-default) per unit notional.

    Accrued premium on default is paid at the middle of the period in which
    default happens.
    """
    dates = premium_schedule(maturity, frequency)
    accruals = np.diff(dates)
    q = credit.survival(dates)
    mids = 0.5 * (dates[:-1] + dates[1:])
    rpv01 = np.sum(accruals * disc.df(dates[1:]) * q[1:]) \
        + np.sum(0.5 * accruals * disc.df(mids) * (q[:-1] - q[1:]))
    protection = credit.lgd * protection_integral(credit, disc, 0.0, maturity)
    return protection, float(rpv01)


def par_spread(credit: CreditCurve, disc: DiscountCurve, maturity: float, frequency: int = 4) -> float:
    protection, rpv01 = cds_legs(credit, disc, maturity, frequency)
    return protection / rpv01


def bootstrap_hazard(quotes: CdsQuoteSet, disc: DiscountCurve) -> CreditCurve:
    """Strip one hazard per quote so that every quoted CDS has zero NPV.

    Each segment is solved by bisection on [0, 10] to 1e-12 in hazard.
    """
    times = np.array(quotes.maturities)
    hazards = np.zeros_like(times)
    lo_bound, hi_bound = HAZARD_BRACKET

    for i, (maturity, spread) in enumerate(zip(quotes.maturities, quotes.spreads)):
        knots, fixed = times[: i + 1], hazards[:i]

        def npv(h: float) -> float:
            curve = CreditCurve(knots, np.append(fixed, h), quotes.recovery)
            protection, rpv01 = cds_legs(curve, disc, maturity, quotes.premium_frequency)
            return protection - spread * rpv01

        at_zero = npv(lo_bound)
        if at_zero > 0.0:
            raise ArbitrageError(
                f"quote {spread * 1e4:.4g}bp at {maturity}y implies a negative hazard rate", maturity)
        if at_zero == 0.0:
            hazards[i] = 0.0
            continue
        if npv(hi_bound) < 0.0:
            raise CalibrationError(
                f"no hazard in [{lo_bound}, {hi_bound}] reprices the {maturity}y quote", maturity)
        lo, hi = lo_bound, hi_bound
        while hi - lo > HAZARD_TOL:
            mid = 0.5 * (lo + hi)
            if npv(mid) < 0.0:
                lo = mid
            else:
                hi = mid
        hazards[i] = 0.5 * (lo + hi)

    return CreditCurve(times, hazards, quotes.recovery)


def _accrual_dates(t_a: float, t_b: float, tenor: float) -> np.ndarray:
    if not t_b > t_a:
        raise ScheduleError(f"empty accrual schedule for [{t_a}, {t_b}]")
    if not tenor > 0.0:
        raise ScheduleError(f"accrual tenor must be positive, got {tenor}")
    n = int(math.ceil((t_b - t_a) / tenor - 1e-9))
    dates = t_a + tenor * np.arange(1, n + 1)
    dates[-1] = t_b
    return np.concatenate(([t_a], dates))


def forward_cds_rate(curve: CreditCurve, disc: DiscountCurve, t_a: float, t_b: float,
                     accrual_tenor: float = 0.25, discounted_premium: bool = False) -> float:
    """Forward CDS spread for protection over (t_a, t_b].

    The default premium leg is sum(accrual * survival) with no discounting,
    as in the reference formula; ``discounted_premium`` also discounts it.
    """
    if t_a < 0.0:
        raise DomainError(f"t_a must be >= 0, got {t_a}")
    dates = _accrual_dates(t_a, t_b, accrual_tenor)
    accruals = np.diff(dates)
    q = curve.survival(dates[1:])
    if discounted_premium:
        q = q * disc.df(dates[1:])
    premium = float(np.sum(accruals * q))
    return curve.lgd * protection_integral(curve, disc, t_a, t_b) / premium

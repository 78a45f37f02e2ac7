"""Swaption volatility cube and Black pricing in the annuity measure."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from .curves import PAYER, RECEIVER, SIDES, CurveSet, SwapSpec, annuity, fair_swap_rate
from .errors import DomainError, InputError, ScheduleError

_SQRT2 = math.sqrt(2.0)


def norm_cdf(x: float) -> float:
    # erfc keeps full relative precision in the lower tail, unlike 1 + erf
    return 0.5 * math.erfc(-x / _SQRT2)


@dataclass(frozen=True, eq=False)
class VolCube:
    """Lognormal vols on a full (expiry, tenor, strike offset) grid.

    Strike offsets are decimals relative to the ATM forward swap rate.
    """

    expiries: np.ndarray
    tenors: np.ndarray
    offsets: np.ndarray
    vols: np.ndarray

    @classmethod
    def from_points(cls, points: Iterable[Tuple[float, float, float, float]]) -> "VolCube":
        points = [tuple(float(v) for v in p) for p in points]
        if not points:
            raise InputError("empty vol cube")
        table = {}
        for e, n, k, v in points:
            if not all(math.isfinite(x) for x in (e, n, k, v)):
                raise InputError(f"non-finite vol cube entry {(e, n, k, v)}")
            if e <= 0.0 or n <= 0.0:
                raise InputError(f"vol cube expiry and tenor must be positive, got {(e, n)}")
            if v <= 0.0:
                raise InputError(f"vols must be positive, got {v} at {(e, n, k)}")
            if (e, n, k) in table:
                raise InputError(f"duplicate vol cube key {(e, n, k)}")
            table[(e, n, k)] = v
        axes = [np.array(sorted({key[i] for key in table})) for i in range(3)]
        vols = np.empty(tuple(a.size for a in axes))
        for i, e in enumerate(axes[0]):
            for j, n in enumerate(axes[1]):
                for m, k in enumerate(axes[2]):
                    try:
                        vols[i, j, m] = table[(e, n, k)]
                    except KeyError:
                        raise InputError(f"vol cube is not a full grid: missing {(e, n, k)}") from None
        return cls(*axes, vols)

    @classmethod
    def flat(cls, vol: float) -> "VolCube":
        return cls.from_points([(1.0, 1.0, 0.0, vol)])

    def points(self) -> list[tuple[float, float, float, float]]:
        return [(float(e), float(n), float(k), float(self.vols[i, j, m]))
                for i, e in enumerate(self.expiries)
                for j, n in enumerate(self.tenors)
                for m, k in enumerate(self.offsets)]


def _bracket(axis: np.ndarray, x: float) -> tuple[int, float]:
    if axis.size == 1:
        return 0, 0.0
    x = min(max(x, axis[0]), axis[-1])
    i = int(np.clip(np.searchsorted(axis, x, side="right") - 1, 0, axis.size - 2))
    return i, (x - axis[i]) / (axis[i + 1] - axis[i])


def vol_lookup(cube: VolCube, expiry: float, tenor: float, strike: float, atm_rate: float) -> float:
    """Trilinear interpolation in (expiry, tenor, strike - atm), flat outside the grid."""
    if cube.vols.size == 0:
        raise InputError("empty vol cube")
    if not (expiry > 0.0 and tenor > 0.0):
        raise DomainError(f"expiry and tenor must be positive, got {expiry}, {tenor}")
    brackets = [_bracket(ax, x) for ax, x in
                ((cube.expiries, expiry), (cube.tenors, tenor), (cube.offsets, strike - atm_rate))]
    total = 0.0
    for corner in range(8):
        weight, index = 1.0, []
        for axis, (i, w) in enumerate(brackets):
            upper = (corner >> axis) & 1
            if upper and w == 0.0:
                weight = 0.0
                break
            weight *= w if upper else 1.0 - w
            index.append(i + upper)
        if weight:
            total += weight * cube.vols[tuple(index)]
    return float(total)


def expected_positive_part(fwd_swap_rate: float, strike: float, vol: float, expiry: float,
                           side: str = PAYER) -> float:
    """Undiscounted Black value of (S - K)+ (payer) or (K - S)+ (receiver).

    S is lognormal with mean ``fwd_swap_rate`` and total deviation vol * sqrt(expiry).
    """
    F, K = fwd_swap_rate, strike
    if side not in SIDES:
        raise InputError(f"side must be one of {SIDES}, got {side!r}")
    if not all(math.isfinite(x) for x in (F, K, vol, expiry)):
        raise DomainError("non-finite Black input")
    if F <= 0.0 or K < 0.0 or vol < 0.0 or expiry < 0.0:
        raise DomainError(f"need F > 0, K >= 0, vol >= 0, expiry >= 0 (got {F}, {K}, {vol}, {expiry})")
    sd = vol * math.sqrt(expiry)
    if sd == 0.0:
        return max(F - K, 0.0) if side == PAYER else max(K - F, 0.0)
    if K == 0.0:
        return F if side == PAYER else 0.0
    d1 = (math.log(F / K) + 0.5 * sd * sd) / sd
    d2 = d1 - sd
    if side == PAYER:
        return F * norm_cdf(d1) - K * norm_cdf(d2)
    return K * norm_cdf(-d2) - F * norm_cdf(-d1)


def swaption_price(curves: CurveSet, spec: SwapSpec, cube: VolCube, expiry: float, strike: float,
                   side: str = PAYER, atm_only: bool = False) -> float:
    """Option at ``expiry`` on the residual swap to ``spec.maturity``, per unit notional.

    The strike stays fixed while the residual swap shortens, which is what
    makes the price humped as expiry moves toward maturity.
    """
    if expiry >= spec.maturity:
        raise ScheduleError(f"swaption expiry {expiry} must precede swap maturity {spec.maturity}")
    level = annuity(curves.discount, spec, expiry)
    fwd = fair_swap_rate(curves.tenor, curves.discount, spec, expiry)
    if expiry == 0.0:
        return level * expected_positive_part(fwd, strike, 0.0, 0.0, side)
    vol = vol_lookup(cube, expiry, spec.maturity - expiry, fwd if atm_only else strike, fwd)
    return level * expected_positive_part(fwd, strike, vol, expiry, side)


__all__ = ["VolCube", "vol_lookup", "expected_positive_part", "swaption_price", "norm_cdf",
           "PAYER", "RECEIVER"]

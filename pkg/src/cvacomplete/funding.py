"""Funding cost and self-default CVA for the contingent funding of collateralized swaps.

A party to a collateralized swap posts cash whenever the swap is out of the
money to it, and funds that cash unsecured at its term rate while earning
only the overnight rate on the collateral.  Sampling the exposure on the
funding roll dates T_a gives

    cost = sum_a tau * A_a(0) * FOO(0, T_a) * E[(option payoff at T_a)]
    cva  = LGD * sum_a (Q(T_a) - Q(T_a + tau)) * A_a(0) * E[(option payoff at T_a)]

where A_a(0) is today's value of the residual annuity from T_a and the
expectation is a Black price of the residual swap struck at the original K.

Side mapping: the fixed payer posts when the residual swap rate is below K,
so its exposure is the receiver option (K - S)+; the fixed receiver posts
when S > K and carries the payer option (S - K)+.
"""

from __future__ import annotations

import math
import statistics
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .credit import CreditCurve, forward_cds_rate
from .curves import PAYER, RECEIVER, SIDES, CurveSet, SwapSpec, annuity, atm_swap, fair_swap_rate
from .errors import ConfigError, InputError, ScheduleError
from .volatility import VolCube, expected_positive_part, vol_lookup

FLAT = "flat"
DECOMPOSED = "decomposed"
CONSTANT_AVERAGE = "constant-average"
MODES = (FLAT, DECOMPOSED, CONSTANT_AVERAGE)

ATM_TOLERANCE = 1e-4


class NotAtmWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class SpreadCurve:
    """Piecewise-linear spread term structure, flat outside its points."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = np.array(self.times, dtype=float, ndmin=1)
        values = np.array(self.values, dtype=float, ndmin=1)
        if times.size == 0 or times.shape != values.shape:
            raise InputError("spread curve needs matching, non-empty times and values")
        if np.any(np.diff(times) <= 0.0) or times[0] < 0.0:
            raise ScheduleError("spread curve times must be >= 0 and strictly increasing")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise InputError("spread curve contains non-finite values")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def value(self, t):
        out = np.interp(np.asarray(t, dtype=float), self.times, self.values)
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class FundingCurve:
    """Funding-over-overnight spread FOO(0, T) for a given roll tenor."""

    times: np.ndarray
    spreads: np.ndarray
    roll_tenor: float = 0.5
    source: str = FLAT

    def __post_init__(self) -> None:
        curve = SpreadCurve(self.times, self.spreads)
        object.__setattr__(self, "times", curve.times)
        object.__setattr__(self, "spreads", curve.values)
        if not self.roll_tenor > 0.0:
            raise ScheduleError(f"roll tenor must be positive, got {self.roll_tenor}")

    def foo(self, t):
        out = np.interp(np.asarray(t, dtype=float), self.times, self.spreads)
        return float(out) if np.ndim(out) == 0 else out

    def scaled(self, factor: float) -> "FundingCurve":
        return FundingCurve(self.times, self.spreads * factor, self.roll_tenor, self.source)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])


@dataclass(frozen=True)
class ScarcityDecomposition:
    funding_spread: float
    credit_spread: float
    scarcity_spread: float


def scarcity_spread(deposit_rate: float, overnight_rate: float, median_bank_cds: float) -> ScarcityDecomposition:
    """Split (deposit - overnight) into market credit and a residual scarcity spread.

    The scarcity part can be negative when bank CDS trades above the
    unsecured-over-overnight spread.
    """
    for x in (deposit_rate, overnight_rate, median_bank_cds):
        if not math.isfinite(x):
            raise InputError(f"non-finite rate {x!r}")
    scarcity = (deposit_rate - overnight_rate) - median_bank_cds
    return ScarcityDecomposition(median_bank_cds + scarcity, median_bank_cds, scarcity)


def median_bank_cds(spreads: Sequence[float], n_best: int = 10) -> float:
    """Median of the ``n_best`` tightest spreads."""
    if len(spreads) == 0:
        raise InputError("no bank CDS spreads given")
    if not 1 <= n_best <= len(spreads):
        raise InputError(f"n_best must be in [1, {len(spreads)}], got {n_best}")
    return float(statistics.median(sorted(spreads)[:n_best]))


def _roll_grid(horizon: float, tau: float) -> np.ndarray:
    n = int(math.ceil(horizon / tau - 1e-9))
    return tau * np.arange(n + 1)


def build_funding_curve(mode: str, *, curves: Optional[CurveSet] = None, credit: Optional[CreditCurve] = None,
                        scarcity: Optional[SpreadCurve] = None, spread: Optional[float] = None,
                        roll_tenor: float = 0.5, horizon: float = 30.0,
                        discounted_premium: bool = False) -> FundingCurve:
    """Funding-over-overnight curve on the roll grid 0, tau, ..., horizon.

    flat: tenor forward minus overnight forward for each roll period.
    decomposed: forward CDS for each roll period plus the forward scarcity curve.
    constant-average: a single spread at every roll date.
    """
    if mode not in MODES:
        raise ConfigError(f"unknown funding mode {mode!r}; expected one of {MODES}")
    if not roll_tenor > 0.0:
        raise ScheduleError(f"roll tenor must be positive, got {roll_tenor}")
    grid = _roll_grid(horizon, roll_tenor)
    if mode == CONSTANT_AVERAGE:
        if spread is None or not math.isfinite(spread):
            raise ConfigError("constant-average funding needs a spread")
        return FundingCurve(grid, np.full(grid.size, float(spread)), roll_tenor, mode)
    if curves is None:
        raise ConfigError(f"{mode} funding needs tenor and overnight curves")
    if mode == FLAT:
        foo = [curves.tenor.forward_rate(t, t + roll_tenor) - curves.discount.forward_rate(t, t + roll_tenor)
               for t in grid]
        return FundingCurve(grid, np.array(foo), roll_tenor, mode)
    if credit is None or scarcity is None:
        raise ConfigError("decomposed funding needs a credit curve and a forward scarcity curve")
    foo = [forward_cds_rate(credit, curves.discount, t, t + roll_tenor, roll_tenor, discounted_premium)
           + scarcity.value(t) for t in grid]
    return FundingCurve(grid, np.array(foo), roll_tenor, mode)


def exposure_option(side: str) -> str:
    """Option whose payoff is the collateral the given fixed-leg side must post."""
    if side not in SIDES:
        raise InputError(f"side must be one of {SIDES}, got {side!r}")
    return RECEIVER if side == PAYER else PAYER


@dataclass(frozen=True)
class RollTerms:
    """Per-roll-date ingredients shared by the cost and CVA sums."""

    dates: np.ndarray
    annuities: np.ndarray
    forwards: np.ndarray
    vols: np.ndarray
    epp: np.ndarray
    option: str


def roll_terms(spec: SwapSpec, curves: CurveSet, cube: VolCube, side: Optional[str] = None,
               atm_only: bool = False) -> RollTerms:
    side = side or spec.direction
    option = exposure_option(side)
    inception = fair_swap_rate(curves.tenor, curves.discount, spec, spec.start)
    if abs(inception - spec.fixed_rate) > ATM_TOLERANCE:
        warnings.warn(f"swap fixed rate {spec.fixed_rate:.6f} is not within 1bp of the fair rate "
                      f"{inception:.6f}; the funding formulas assume an ATM swap", NotAtmWarning, stacklevel=3)
    dates = spec.roll_dates()
    annuities, forwards, vols, epp = [], [], [], []
    K = spec.fixed_rate
    for t in dates:
        a = annuity(curves.discount, spec, t)
        f = fair_swap_rate(curves.tenor, curves.discount, spec, t)
        v = vol_lookup(cube, t, spec.maturity - t, f if atm_only else K, f)
        annuities.append(a)
        forwards.append(f)
        vols.append(v)
        epp.append(expected_positive_part(f, K, v, t, option))
    return RollTerms(dates, np.array(annuities), np.array(forwards), np.array(vols), np.array(epp), option)


def _check_coverage(funding: FundingCurve, spec: SwapSpec) -> None:
    if not math.isclose(funding.roll_tenor, spec.float_tenor, rel_tol=1e-12):
        raise ConfigError(f"funding roll tenor {funding.roll_tenor} differs from swap tenor {spec.float_tenor}")
    last = spec.maturity - spec.float_tenor
    if last > funding.horizon + 1e-9:
        raise ConfigError(f"funding curve ends at {funding.horizon}y but the swap rolls until {last}y")


def swap_funding_cost(spec: SwapSpec, curves: CurveSet, cube: VolCube, funding: FundingCurve,
                      side: Optional[str] = None, atm_only: bool = False,
                      terms: Optional[RollTerms] = None) -> float:
    """Expected cost of funding posted collateral, per unit notional."""
    _check_coverage(funding, spec)
    terms = terms or roll_terms(spec, curves, cube, side, atm_only)
    tau = spec.float_tenor
    return float(np.sum(tau * terms.annuities * funding.foo(terms.dates) * terms.epp))


def swap_funding_cva(spec: SwapSpec, curves: CurveSet, cube: VolCube, credit: CreditCurve,
                     side: Optional[str] = None, atm_only: bool = False,
                     terms: Optional[RollTerms] = None) -> float:
    """Own-default CVA on the contingent funding, per unit notional.

    Funding is drawn only if the firm survives to the roll date and is lost
    if it defaults before the next roll.
    """
    terms = terms or roll_terms(spec, curves, cube, side, atm_only)
    tau = spec.float_tenor
    q = credit.survival(terms.dates)
    q_next = credit.survival(terms.dates + tau)
    return float(credit.lgd * np.sum((q - q_next) * terms.annuities * terms.epp))


def aggregate(specs: Iterable[SwapSpec], pricer: Callable[..., float], *args, **kwargs) -> float:
    """Sum a per-swap result across a book; no netting or CSA terms are modelled."""
    return float(sum(s.notional * pricer(s, *args, **kwargs) for s in specs))


@dataclass(frozen=True)
class FundingRow:
    maturity: float
    side: str
    funding_cost: float
    funding_cva: float
    funding_cost_new: Optional[float] = None
    funding_cva_new: Optional[float] = None

    @property
    def cost_change(self) -> Optional[float]:
        return None if self.funding_cost_new is None else self.funding_cost_new - self.funding_cost

    @property
    def cva_change(self) -> Optional[float]:
        return None if self.funding_cva_new is None else self.funding_cva_new - self.funding_cva


def _price_side(market, funding: FundingCurve, maturity: float, side: str, atm_only: bool) -> tuple[float, float]:
    spec = atm_swap(market.curves, maturity, funding.roll_tenor, side)
    terms = roll_terms(spec, market.curves, market.cube, side, atm_only)
    return (swap_funding_cost(spec, market.curves, market.cube, funding, side, terms=terms),
            swap_funding_cva(spec, market.curves, market.cube, market.credit, side, terms=terms))


def funding_report(maturities: Iterable[float], market, funding: FundingCurve, market_new=None,
                   funding_new: Optional[FundingCurve] = None, sides: Sequence[str] = SIDES,
                   atm_only: bool = False) -> list[FundingRow]:
    """Funding cost and CVA for spot ATM swaps of each maturity and side.

    ``market`` needs ``curves``, ``cube`` and ``credit`` attributes.  With a
    second market the rows also carry the new values, so changes can be read
    off directly.  Each date uses its own ATM strike.
    """
    if (market_new is None) != (funding_new is None):
        raise ConfigError("a change report needs both the new market and its funding curve")
    rows = []
    for m in maturities:
        for side in sides:
            cost, cva = _price_side(market, funding, m, side, atm_only)
            if market_new is None:
                rows.append(FundingRow(float(m), side, cost, cva))
            else:
                cost_new, cva_new = _price_side(market_new, funding_new, m, side, atm_only)
                rows.append(FundingRow(float(m), side, cost, cva, cost_new, cva_new))
    return rows

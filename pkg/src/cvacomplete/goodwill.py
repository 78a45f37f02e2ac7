"""CVA on firm-level Goodwill.

Goodwill is written down to zero when the firm defaults, so its CVA is the
expected discounted value lost at default before the horizon T:

    CVA = int_0^T G(s) df(s) lambda(s) Q(s) ds

with three models for the future value G(s).  Under STOCK the discounted
value is a martingale and the integral collapses to G(0) (1 - Q(T)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .credit import CreditCurve
from .curves import DiscountCurve
from .errors import DomainError, InputError

AMORTIZING = "amortizing"
CONSTANT = "constant"
STOCK = "stock"
MODELS = (AMORTIZING, CONSTANT, STOCK)

WEEKLY = 1.0 / 52.0


class GoodwillModelError(InputError):
    pass


@dataclass(frozen=True)
class GoodwillModel:
    variant: str
    current_value: float
    amortization: Optional[float] = None

    def __post_init__(self) -> None:
        if self.variant not in MODELS:
            raise GoodwillModelError(f"unknown Goodwill model {self.variant!r}; expected one of {MODELS}")
        if not (math.isfinite(self.current_value) and self.current_value >= 0.0):
            raise GoodwillModelError(f"Goodwill value must be finite and >= 0, got {self.current_value}")
        if self.variant == AMORTIZING:
            if self.amortization is None or not (self.amortization > 0.0):
                raise GoodwillModelError(f"AMORTIZING needs a positive horizon, got {self.amortization}")

    @classmethod
    def amortizing(cls, value: float, horizon: float) -> "GoodwillModel":
        return cls(AMORTIZING, value, horizon)

    @classmethod
    def constant(cls, value: float) -> "GoodwillModel":
        return cls(CONSTANT, value)

    @classmethod
    def stock(cls, value: float) -> "GoodwillModel":
        return cls(STOCK, value)

    def value(self, s):
        """Deterministic value path; for STOCK this is the discounted expectation."""
        s = np.asarray(s, dtype=float)
        if self.variant == AMORTIZING:
            out = self.current_value * np.maximum(0.0, 1.0 - s / self.amortization)
        else:
            out = np.full_like(s, self.current_value)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GoodwillCvaResult:
    cva: float
    cva_fraction: float
    horizon_used: float


def _simpson_nodes(cuts: np.ndarray, step: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Composite Simpson nodes/weights on each [cuts[i], cuts[i+1]] plus each piece's midpoint."""
    nodes, weights, mids = [], [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        n = max(2, int(math.ceil((b - a) / step - 1e-9)))
        n += n % 2
        x = np.linspace(a, b, n + 1)
        w = np.ones(n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        nodes.append(x)
        weights.append(w * (b - a) / (3.0 * n))
        mids.append(np.full(n + 1, 0.5 * (a + b)))
    return np.concatenate(nodes), np.concatenate(weights), np.concatenate(mids)


def goodwill_cva(model: GoodwillModel, credit: CreditCurve, disc: DiscountCurve,
                 horizon: Optional[float] = None, step: float = WEEKLY) -> GoodwillCvaResult:
    """CVA on Goodwill up to ``horizon`` (defaults to the amortization horizon)."""
    if horizon is None:
        if model.variant != AMORTIZING:
            raise DomainError(f"{model.variant} model needs an explicit horizon")
        horizon = model.amortization
    if not (math.isfinite(horizon) and horizon > 0.0):
        raise DomainError(f"horizon must be positive, got {horizon}")
    if not step > 0.0:
        raise DomainError(f"integration step must be positive, got {step}")
    g0 = model.current_value

    if model.variant == STOCK:
        fraction = 1.0 - credit.survival(horizon)
    else:
        knots = [0.0, horizon, *credit.breakpoints, *disc.breakpoints]
        if model.variant == AMORTIZING:
            knots.append(model.amortization)
        cuts = np.unique(np.array(knots))
        cuts = cuts[cuts <= horizon]
        s, w, mid = _simpson_nodes(cuts, step)
        shape = GoodwillModel(model.variant, 1.0, model.amortization).value(s)
        integrand = shape * disc.df(s) * credit.hazard(mid) * credit.survival(s)
        fraction = float(np.dot(w, integrand))
    return GoodwillCvaResult(g0 * fraction, fraction, float(horizon))


def goodwill_cva_change(model: GoodwillModel, credit_old: CreditCurve, credit_new: CreditCurve,
                        disc_old: DiscountCurve, disc_new: DiscountCurve,
                        horizon: Optional[float] = None, step: float = WEEKLY) -> tuple[float, float]:
    """(new CVA - old CVA, same as a fraction of current Goodwill); positive is a loss."""
    old = goodwill_cva(model, credit_old, disc_old, horizon, step)
    new = goodwill_cva(model, credit_new, disc_new, horizon, step)
    change = new.cva - old.cva
    return change, new.cva_fraction - old.cva_fraction


def headline_pnl(cva_change: float, reported_derivative_cva_benefit: float) -> float:
    """Net firm-level CVA result; positive is a benefit."""
    return reported_derivative_cva_benefit - cva_change


def goodwill_sweep(variant: str, credit: CreditCurve, disc: DiscountCurve, maturities: Iterable[float],
                   horizon: Optional[float] = None, step: float = WEEKLY) -> list[tuple[float, float]]:
    """(maturity, cva_fraction) per maturity.

    For AMORTIZING the maturity is the amortization horizon M and the CVA
    horizon is M unless ``horizon`` fixes it; for CONSTANT and STOCK the
    maturity is the CVA horizon itself.
    """
    out = []
    for m in maturities:
        if variant == AMORTIZING:
            result = goodwill_cva(GoodwillModel.amortizing(1.0, m), credit, disc, horizon or m, step)
        else:
            result = goodwill_cva(GoodwillModel(variant, 1.0), credit, disc, m, step)
        out.append((float(m), result.cva_fraction))
    return out

"""Cell usage fairness metrics and the converter vs converter-less cost comparison."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

import numpy as np

from converterless.electrolyser_stack import StackState

STA_DIVISORS = ("instantaneous", "time-averaged")


@dataclass(frozen=True, eq=False)
class FairnessSnapshot:
    """Per-cell time-active fraction ``ta``, its standardised form ``sta``, and
    the spread ``max(sta) - min(sta)``.
    """

    ta: np.ndarray
    sta: np.ndarray
    max_delta_sta: float


def fairness(stack: StackState, elapsed: float,
             divisor: str = "instantaneous") -> FairnessSnapshot:
    """Usage metrics at simulation time ``elapsed``.

    ``sta = ta / (n_active / n_total)``. With ``divisor="instantaneous"`` the
    current active count is used; ``"time-averaged"`` uses the mean active
    count since t = 0, which makes ``mean(sta)`` exactly 1.
    """
    if elapsed <= 0:
        raise ValueError(f"fairness metrics are undefined at elapsed={elapsed}")
    if divisor not in STA_DIVISORS:
        raise ValueError(f"divisor must be one of {STA_DIVISORS}, got {divisor!r}")
    ta = stack.t_on_total / elapsed
    if divisor == "instantaneous":
        share = stack.n_active / stack.n_total
    else:
        share = ta.sum() / stack.n_total
    sta = ta / share if share > 0 else np.zeros_like(ta)
    return FairnessSnapshot(ta=ta, sta=sta, max_delta_sta=float(sta.max() - sta.min()))


@dataclass(frozen=True)
class CostInputs:
    converter_upfront: float = 2000.0
    years: int = 10
    annual_energy: float = 10_000.0  # kWh
    rate_with_converter: float = 0.15  # $/kWh
    rate_without_converter: float = 0.14

    def __post_init__(self):
        for name in ("converter_upfront", "annual_energy", "rate_with_converter",
                     "rate_without_converter"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.years < 1:
            raise ValueError(f"years must be >= 1, got {self.years}")


@dataclass(frozen=True)
class CostComparison:
    cost_with: float
    cost_without: float
    savings: float
    pct: float


def cost_comparison(inputs: CostInputs) -> CostComparison:
    """Lifetime cost with and without a power converter.

    The saving percentage is relative to the converter system and is not
    rounded.
    """
    # decimal arithmetic keeps currency results free of binary rounding
    d = {k: Decimal(repr(getattr(inputs, k))) for k in (
        "converter_upfront", "years", "annual_energy", "rate_with_converter",
        "rate_without_converter")}
    energy = d["years"] * d["annual_energy"]
    cost_with = d["converter_upfront"] + energy * d["rate_with_converter"]
    cost_without = energy * d["rate_without_converter"]
    if cost_with == 0:
        raise ZeroDivisionError("cost with converter is zero; percentage saving undefined")
    savings = cost_with - cost_without
    return CostComparison(float(cost_with), float(cost_without), float(savings),
                          float(100 * savings / cost_with))

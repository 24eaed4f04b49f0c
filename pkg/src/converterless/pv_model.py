"""Ideal single-diode PV array model, calibrated to datasheet-style anchors.

The array current is::

    I(V, G) = I_ph_ref * G / G_ref - I_0 * (exp(V / a) - 1)

with no series or shunt resistance, so three parameters are fixed by three
conditions: the short-circuit current, the open-circuit voltage and a zero
power slope at the maximum power voltage. The anchor power is then checked
rather than imposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from converterless._numerics import bisect, golden_section_max

# bracket for the modified ideality voltage search
A_BRACKET = (1.0, 50.0)
PMP_REL_TOL = 0.005
SLOPE_TOL = 1e-6  # W/V


class CalibrationError(ValueError):
    """The anchors cannot be reproduced by the ideal single-diode law."""

    def __init__(self, anchor: str, message: str):
        super().__init__(f"{anchor}: {message}")
        self.anchor = anchor


@dataclass(frozen=True)
class PvAnchors:
    """Reference operating points of the array.

    Defaults are the 1000 W/m², 25 °C values of the simulated array; ``voc``
    is not a published value and is chosen so the ideal model reproduces
    ``pmp`` at ``vmp``.
    """

    isc: float = 5.83
    vmp: float = 108.4
    pmp: float = 590.0
    voc: float = 129.0
    g_ref: float = 1000.0
    t_ref: float = 25.0

    def __post_init__(self):
        if not 0 < self.vmp < self.voc:
            raise ValueError(f"need 0 < vmp < voc, got vmp={self.vmp}, voc={self.voc}")
        if not 0 < self.pmp / self.vmp < self.isc:
            raise ValueError(
                f"need 0 < pmp/vmp < isc, got pmp/vmp={self.pmp / self.vmp:.6g}, isc={self.isc}")
        if self.g_ref <= 0:
            raise ValueError(f"g_ref must be positive, got {self.g_ref}")


@dataclass(frozen=True)
class PvParams:
    i_ph_ref: float
    i_0: float
    a: float
    g_ref: float = 1000.0

    def __post_init__(self):
        if self.i_ph_ref <= 0 or self.i_0 <= 0 or self.a <= 0:
            raise ValueError(f"PV parameters must be positive: {self}")


def pv_current(params: PvParams, v, g):
    """Array output current at terminal voltage ``v`` and irradiance ``g``.

    Works on scalars or arrays. Goes negative above the open-circuit voltage;
    the blocking diode is applied by the caller.
    """
    i_ph = params.i_ph_ref * (g / params.g_ref)
    if isinstance(v, np.ndarray):
        return i_ph - params.i_0 * np.expm1(v / params.a)
    return i_ph - params.i_0 * math.expm1(v / params.a)


def open_circuit_voltage(params: PvParams, g: float) -> float:
    if g <= 0:
        return 0.0
    return params.a * math.log1p(params.i_ph_ref * (g / params.g_ref) / params.i_0)


def _params_for(anchors: PvAnchors, a: float) -> PvParams:
    i_0 = anchors.isc / math.expm1(anchors.voc / a)
    return PvParams(i_ph_ref=anchors.isc, i_0=i_0, a=a, g_ref=anchors.g_ref)


def _power_slope(params: PvParams, v: float) -> float:
    # d(V*I)/dV = I + V*dI/dV
    di_dv = -params.i_0 / params.a * math.exp(v / params.a)
    return pv_current(params, v, params.g_ref) + v * di_dv


def calibrate(anchors: PvAnchors) -> PvParams:
    """Fit ``(i_ph_ref, i_0, a)`` to the anchors.

    ``I(0) = isc`` and ``I(voc) = 0`` hold by construction for any ``a``; ``a``
    is then found by bisection so the power slope vanishes at ``vmp``.

    Raises
    ------
    CalibrationError
        If no ``a`` in the search bracket puts the maximum at ``vmp``, or the
        resulting power at ``vmp`` misses ``pmp`` by more than 0.5 %.
    """
    def slope(a):
        return _power_slope(_params_for(anchors, a), anchors.vmp)

    try:
        a = bisect(slope, *A_BRACKET, xtol=1e-13)
    except ValueError as exc:
        raise CalibrationError("vmp", f"no ideality voltage in {A_BRACKET} V places "
                               f"the maximum at {anchors.vmp} V ({exc})") from None

    params = _params_for(anchors, a)
    if abs(_power_slope(params, anchors.vmp)) > SLOPE_TOL:
        raise CalibrationError("vmp", "power slope at vmp did not converge")
    p_at_vmp = anchors.vmp * pv_current(params, anchors.vmp, anchors.g_ref)
    if abs(p_at_vmp - anchors.pmp) > PMP_REL_TOL * anchors.pmp:
        raise CalibrationError(
            "pmp", f"model gives {p_at_vmp:.3f} W at vmp={anchors.vmp} V, "
                   f"more than {PMP_REL_TOL:.1%} from {anchors.pmp} W; adjust voc")
    return params


def pv_mpp(params: PvParams, g: float, xtol: float = 1e-3) -> tuple[float, float]:
    """Maximum power point ``(v, p)`` at irradiance ``g`` by golden-section search."""
    if g <= 0:
        return 0.0, 0.0
    v_oc = open_circuit_voltage(params, g)
    return golden_section_max(lambda v: v * pv_current(params, v, g), 0.0, v_oc, xtol)

"""Bracketing root finder and unimodal maximiser used across the package."""

import math
from typing import Callable

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-12,
           maxiter: int = 200) -> float:
    """Root of ``f`` on ``[lo, hi]`` by bisection.

    Raises ValueError if ``f(lo)`` and ``f(hi)`` share a sign.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]: f={flo:.6g}, {fhi:.6g}")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
        if hi - lo <= xtol:
            break
    return 0.5 * (lo + hi)


def golden_section_max(f: Callable[[float], float], lo: float, hi: float,
                       xtol: float = 1e-3) -> tuple[float, float]:
    """Maximiser of a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    x1 = hi - INVPHI * (hi - lo)
    x2 = lo + INVPHI * (hi - lo)
    f1 = f(x1)
    f2 = f(x2)
    while hi - lo > xtol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INVPHI * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INVPHI * (hi - lo)
            f1 = f(x1)
    x = 0.5 * (lo + hi)
    return x, f(x)

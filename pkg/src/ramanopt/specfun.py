"""Bessel functions of order 0 and 1.

The exponentially scaled modified functions ``exp(-x) * I_n(x)`` are the
primary API; every kernel in the package combines them with an explicit
exponent so nothing overflows at large optical depth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .core import InvalidArgument


class UnsupportedOrder(ValueError):
    pass


@dataclass(frozen=True)
class BesselResult:
    value: float
    scaled: bool


# exp(709.78) is the largest double
_UNSCALED_LIMIT = 700.0


def _check_order(n):
    if n not in (0, 1):
        raise UnsupportedOrder(f"only orders 0 and 1 are implemented, got {n!r}")


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def bessel_j(n: int, x):
    """J_n(x) for n in {0, 1}; vectorised over ``x``."""
    _check_order(n)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InvalidArgument("bessel_j needs finite arguments")
    return _out(special.j0(x) if n == 0 else special.j1(x))


def bessel_i_scaled(n: int, x):
    """exp(-x) * I_n(x) for x >= 0."""
    _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise InvalidArgument("bessel_i_scaled needs x >= 0")
    return _out(special.i0e(x) if n == 0 else special.i1e(x))


def bessel_i(n: int, x):
    """Unscaled I_n(x); raises beyond x = 700 instead of overflowing."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr > _UNSCALED_LIMIT):
        raise InvalidArgument(
            f"unscaled I_n overflows for x > {_UNSCALED_LIMIT:g}; use bessel_i_scaled"
        )
    return _out(bessel_i_scaled(n, x_arr) * np.exp(x_arr))


def bessel(n: int, x: float, scaled: bool = True) -> BesselResult:
    value = bessel_i_scaled(n, x) if scaled else bessel_i(n, x)
    return BesselResult(float(value), scaled)


def i0_product_exponent(a, b):
    """exp(-(a + b)/2) * I_0(sqrt(a * b)) for a, b >= 0, computed without overflow."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = np.sqrt(a * b)
    # -(a+b)/2 + sqrt(ab) = -(sqrt(a) - sqrt(b))^2 / 2 <= 0
    return special.i0e(s) * np.exp(-0.5 * (np.sqrt(a) - np.sqrt(b)) ** 2)

"""Black-76 pricing and implied volatility, with an optional shift.

Used for quoting: model prices are converted to (shifted) lognormal
implied vols of the forward rate.  ``shift`` displaces both forward and
strike, so negative rates down to ``-shift`` remain quotable.
"""

from __future__ import annotations

import math

from scipy.optimize import brentq
from scipy.stats import norm

from .errors import OutOfBounds

_VOL_LO = 1e-12
_VOL_HI = 20.0


def black_price(
    forward: float,
    strike: float,
    expiry: float,
    vol: float,
    annuity: float = 1.0,
    call: bool = True,
    shift: float = 0.0,
) -> float:
    f = forward + shift
    k = strike + shift
    if f <= 0 or k <= 0:
        raise OutOfBounds(f"shifted forward/strike must be positive, got {f}, {k}")
    if expiry < 0:
        raise OutOfBounds("expiry must be >= 0")
    intrinsic = max(f - k, 0.0) if call else max(k - f, 0.0)
    if vol <= 0 or expiry == 0:
        return annuity * intrinsic
    sd = vol * math.sqrt(expiry)
    d1 = (math.log(f / k) + 0.5 * sd * sd) / sd
    d2 = d1 - sd
    if call:
        return annuity * (f * norm.cdf(d1) - k * norm.cdf(d2))
    return annuity * (k * norm.cdf(-d2) - f * norm.cdf(-d1))


def black_implied_vol(
    price: float,
    forward: float,
    strike: float,
    expiry: float,
    annuity: float = 1.0,
    call: bool = True,
    shift: float = 0.0,
    price_tol: float = 1e-12,
) -> float:
    """Invert the (shifted) Black formula.

    Returns 0.0 when the price equals intrinsic; raises OutOfBounds when
    the price lies outside the attainable [intrinsic, sup] range, which a
    caller may interpret as an undefined vol (e.g. strikes under a
    model-implied forward-rate floor).
    """
    f = forward + shift
    k = strike + shift
    if f <= 0 or k <= 0:
        raise OutOfBounds(f"shifted forward/strike must be positive, got {f}, {k}")
    if annuity <= 0:
        raise OutOfBounds("annuity must be positive")
    intrinsic = annuity * (max(f - k, 0.0) if call else max(k - f, 0.0))
    sup = annuity * (f if call else k)
    scale = max(abs(price), abs(intrinsic), annuity * f)
    tol = price_tol * max(1.0, scale)
    if price < intrinsic - tol:
        raise OutOfBounds(
            f"price {price} below intrinsic {intrinsic}; implied vol undefined"
        )
    if price <= intrinsic + tol:
        return 0.0
    if price >= sup - tol:
        raise OutOfBounds(f"price {price} at or above the supremum {sup}")

    def gap(vol: float) -> float:
        return (
            black_price(forward, strike, expiry, vol, annuity, call, shift) - price
        )

    lo, hi = _VOL_LO, 1.0
    while gap(hi) < 0:
        hi *= 2.0
        if hi > _VOL_HI:
            raise OutOfBounds("implied vol exceeds the search cap")
    return float(brentq(gap, lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=200))

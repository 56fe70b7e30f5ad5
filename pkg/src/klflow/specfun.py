"""Special functions: the principal Lambert branch W0, an overflow-safe
W0(e^a), the cardinal sine with its first two derivatives, and harmonic
numbers.

Conventions used throughout the package:

    sinc(x) = sin(x)/x            sinc(0) = 1
    psi(x)  = -sinc'(x)           psi(0)  = 0
    phi(x)  = -sinc''(x)          phi(0)  = 1/3

phi is positive and decreasing on [0, x0] where x0 ~ 2.0815 is its first
positive zero; the periodic-signal certificates are only admissible for
arguments below x0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_E = math.e
_TAYLOR_CUT = 1e-2
_W_MAX_ITERS = 50


def lambert_w0(x: float) -> float:
    """Principal Lambert branch on [0, inf): the w >= 0 with w * e^w = x.

    Halley iteration from initial guess x (for x < e) or log(x) - log(log(x))
    (otherwise).  Converges to |w e^w - x| <= 1e-12 * max(1, x) within 50
    iterations.
    """
    if not (x >= 0.0) or math.isinf(x):
        raise ValueError(f"lambert_w0 expects finite x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    w = x if x < _E else math.log(x) - math.log(math.log(x))
    tol = 1e-13 * max(1.0, x)
    for _ in range(_W_MAX_ITERS):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= tol:
            return w
        wp1 = w + 1.0
        # Halley step for f(w) = w e^w - x.
        w -= f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
    if abs(w * math.exp(w) - x) <= 1e-12 * max(1.0, x):
        return w
    raise RuntimeError(f"lambert_w0 failed to converge for x = {x}")


def lambert_w0_of_exp(a: float) -> float:
    """W0(e^a) without forming e^a when that would overflow.

    For a <= 700 this is lambert_w0(exp(a)).  Beyond that the same value is
    the root of w + log(w) = a, solved by Newton from w0 = a - log(max(a, 2));
    the two branches agree to 1e-10 relative at the seam.  This is what makes
    Lambert-style bound curves evaluable at arbitrarily large horizons.
    """
    if math.isnan(a):
        raise ValueError("lambert_w0_of_exp expects a real argument")
    if a <= 700.0:
        return lambert_w0(math.exp(a))
    w = a - math.log(max(a, 2.0))
    for _ in range(_W_MAX_ITERS):
        f = w + math.log(w) - a
        if abs(f) <= 1e-14 * max(1.0, abs(a)):
            break
        w -= f * w / (w + 1.0)
    return w


@dataclass(frozen=True)
class SincTriple:
    """Values (sinc, psi, phi) = (sinc, -sinc', -sinc'') at one point."""

    s: float
    psi: float
    phi: float


def sinc_triple(x: float) -> SincTriple:
    """Evaluate sinc, -sinc', -sinc'' with a Taylor crossover at |x| < 1e-2.

    The closed forms lose precision near 0 through cancellation; below the
    crossover the truncated series

        sinc   = 1 - x^2/6 + x^4/120
        sinc'  = -x/3 + x^3/30
        sinc'' = -1/3 + x^2/10 - x^4/168

    are exact to double precision.  At x = 0 the triple is (1, 0, 1/3).
    """
    ax = abs(x)
    if ax < _TAYLOR_CUT:
        x2 = x * x
        s = 1.0 - x2 / 6.0 + x2 * x2 / 120.0
        ds = -x / 3.0 + x * x2 / 30.0
        dds = -1.0 / 3.0 + x2 / 10.0 - x2 * x2 / 168.0
        return SincTriple(s=s, psi=-ds, phi=-dds)
    sx = math.sin(x)
    cx = math.cos(x)
    s = sx / x
    ds = cx / x - sx / (x * x)
    dds = 2.0 * sx / x**3 - 2.0 * cx / x**2 - sx / x
    return SincTriple(s=s, psi=-ds, phi=-dds)


def first_zero_of_phi() -> float:
    """First positive zero x0 of phi = -sinc'', by bisection on [1.5, 2.5].

    phi changes sign exactly once on that bracket; the result is accurate
    to 1e-10 and sits near 2.0815.
    """
    lo, hi = 1.5, 2.5
    flo = sinc_triple(lo).phi
    if not (flo > 0.0 > sinc_triple(hi).phi):
        raise RuntimeError("phi does not change sign on [1.5, 2.5]")
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if sinc_triple(mid).phi > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def harmonic(m: int) -> float:
    """Harmonic number H_m = sum_{k=1..m} 1/k, summed in ascending k."""
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"harmonic expects an integer m >= 1, got {m!r}")
    total = 0.0
    for k in range(1, m + 1):
        total += 1.0 / k
    return total

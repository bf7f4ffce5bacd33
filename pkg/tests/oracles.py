"""Reference values computed by routes the package never takes.

mpmath supplies arbitrary-precision Bessel and Gamma evaluation, a
Gauss-Jacobi rule integrates the compactly supported kernel profile
directly against the oscillation, and the exponent classifier is
re-derived in exact rational arithmetic.  Agreement between these and
the package is evidence, not an identity check against shared code.
"""

from fractions import Fraction

import mpmath
import numpy as np
from scipy.special import roots_jacobi

mpmath.mp.dps = 40


def bessel_reference(nu: float, rho: float) -> float:
    return float(mpmath.besselj(mpmath.mpf(nu), mpmath.mpf(rho)))


def scaled_bessel_reference(nu: float, rho: float) -> float:
    """J_nu(rho) / rho^nu with its finite limit at rho = 0."""
    nu = mpmath.mpf(nu)
    if rho == 0.0:
        return float(1 / (2**nu * mpmath.gamma(nu + 1)))
    return float(mpmath.besselj(nu, rho) / mpmath.mpf(rho) ** nu)


def envelope_reference(nu: float, rho: float) -> float:
    """Leading large-argument cosine term sqrt(2/(pi rho)) cos(rho - nu pi/2 - pi/4)."""
    nu, rho = mpmath.mpf(nu), mpmath.mpf(rho)
    phase = rho - nu * mpmath.pi / 2 - mpmath.pi / 4
    return float(mpmath.sqrt(2 / (mpmath.pi * rho)) * mpmath.cos(phase))


def profile_transform_reference(alpha: float, xi: float, nodes: int = 1500) -> float:
    """One-dimensional kernel profile transform by Gauss-Jacobi quadrature.

    The profile gamma_c (1 - u^2)^(-lam) on (-1, 1) carries exactly the
    Jacobi weight with both exponents -lam, so the rule absorbs the
    endpoint singularities and only the smooth cosine gets sampled.
    The normalising constant is evaluated in arbitrary precision.
    """
    lam = mpmath.mpf(1) - mpmath.mpf(alpha)
    gamma_c = mpmath.pi ** (-lam) / mpmath.gamma(1 - lam)
    u, w = roots_jacobi(nodes, -float(lam), -float(lam))
    return float(gamma_c) * float(w @ np.cos(2.0 * np.pi * float(xi) * u))


def zero_frequency_reference(alpha: float, n: int) -> float:
    """Total kernel mass pi^nu / Gamma(nu + 1) at the profile's Bessel order."""
    nu = mpmath.mpf(n + 1) / (2 * n) * mpmath.mpf(alpha) - mpmath.mpf(1) / 2
    return float(mpmath.pi**nu / mpmath.gamma(nu + 1))


def gaussian_lp_reference(width: float, p: float, n: int = 1) -> float:
    """||exp(-pi |x|^2 / w^2)||_p in n dimensions: (w^n / p^{n/2})^{1/p}."""
    w, p = mpmath.mpf(width), mpmath.mpf(p)
    return float((w**n / p ** (mpmath.mpf(n) / 2)) ** (1 / p))


# ---------------------------------------------------------------------------
# exact rational re-derivation of the exponent-region map
#
# Binary64 inputs are exact rationals, and every compared quantity is a
# rational function of them, so each comparison below is decided exactly:
# a zero-width interval computation with no rounding direction to track.

_TOL = Fraction(1e-12)  # the same binary64 tolerance constant the package uses


def classify_reference(inv_p: float, inv_q: float, alpha: float, n: int) -> str:
    ip, iq, a = Fraction(inv_p), Fraction(inv_q), Fraction(alpha)
    t = a / n
    if abs(ip - iq - t) > _TOL:
        return "ScalingViolated"

    lo = Fraction(n - 1, 2 * n) + Fraction(n + 1, 2 * n) * t
    hi = Fraction(n + 1, 2 * n) + Fraction(n - 1, 2 * n) * t
    if abs(ip - lo) <= _TOL or abs(ip - hi) <= _TOL:
        return "Boundary"
    if not lo < ip < hi:
        return "OutsideNecessary"

    # the region threshold is contract data in binary64 (like the 1e-12
    # tolerance): alpha values are floats, and the spec's comparison is
    # against the float closest to n/(n+1), not the unrepresentable real
    if a >= Fraction(n / (n + 1)):
        return "RegionI"

    half = Fraction(1, 2)
    if abs(ip - half) <= _TOL or abs(ip - (half + t)) <= _TOL:
        return "Boundary"
    if half < ip < half + t:
        return "RegionII"
    return "OpenGap"

"""The unit-ball power kernel family and its frequency-side forms.

A member is indexed by an order alpha in (0, n) for spatial dimension n,
plus an imaginary offset v used for analytic continuation.  The real-space
density gamma_c * (1 - |x|^2)^(-lam) only exists as a locally integrable
function on the strip 0 < Re lam < 1; its Fourier transform, by contrast,
extends to the whole family and is the workhorse here:

    spectral profile(xi) = (2 pi)^nu * J_nu(2 pi |xi|) / (2 pi |xi|)^nu

with nu = (n+1)/(2n) * alpha - 1/2.  The regularized J form keeps the
profile smooth through xi = 0, where it takes the value pi^nu / Gamma(nu+1).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .specialfn import bessel_j_scaled, bessel_main_term, reciprocal_gamma

__all__ = [
    "KernelValidityError",
    "UnsupportedParameterError",
    "KernelSpec",
    "lambda_of",
    "gamma_const",
    "omega_physical",
    "omega_hat",
    "omega_hat_adjoint",
    "omega_hat_dilated",
    "multiplier_split",
    "write_kernel_tables",
]


class KernelValidityError(ValueError):
    """Parameters outside the family's domain of definition."""


class UnsupportedParameterError(ValueError):
    """Parameters valid in principle but not implemented on this path."""


def _check_dim(n) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise KernelValidityError(f"dimension must be an integer >= 1, got {n!r}")
    n = int(n)
    if n < 1:
        raise KernelValidityError(f"dimension must be >= 1, got {n}")
    return n


def lambda_of(alpha: float, n: int, v: float = 0.0) -> complex:
    """Continuation parameter (n+1)/2 * (1 - alpha/n) + i v for alpha in (0, n)."""
    n = _check_dim(n)
    alpha = float(alpha)
    v = float(v)
    if not (np.isfinite(alpha) and 0.0 < alpha < n):
        raise KernelValidityError(f"order must satisfy 0 < alpha < {n}, got {alpha}")
    if not np.isfinite(v):
        raise KernelValidityError(f"imaginary offset must be finite, got {v}")
    return complex(0.5 * (n + 1) * (1.0 - alpha / n), v)


@dataclass(frozen=True)
class KernelSpec:
    """One member of the kernel family.

    alpha : order of integration, 0 < alpha < n (open)
    n     : spatial dimension, >= 1
    v     : imaginary offset of the continuation parameter; 0 selects the
            distinguished member every operator path supports
    """

    alpha: float
    n: int
    v: float = 0.0

    def __post_init__(self):
        lambda_of(self.alpha, self.n, self.v)  # validates all three
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "v", float(self.v))

    @property
    def lam(self) -> complex:
        return lambda_of(self.alpha, self.n, self.v)

    @property
    def gamma_c(self) -> complex:
        return gamma_const(self)

    @property
    def bessel_order(self) -> float:
        # n/2 - Re(lam), linear in alpha; ranges over (-1/2, (n+1)/2 - 1/2)
        return (self.n + 1) / (2 * self.n) * self.alpha - 0.5

    @property
    def time_scale_power(self) -> float:
        # exponent coupling the dilation parameter to the order:
        # the radial measure below is r^(time_scale_power * alpha - 1) dr
        return (self.n + 1) / self.n


def gamma_const(spec: KernelSpec) -> complex:
    """Normalizing constant pi^(-lam) / Gamma(1 - lam).

    Entire in lam thanks to the reciprocal gamma; vanishes exactly where
    1 - lam hits a nonpositive integer, which is how the continuation
    absorbs what would otherwise be poles of the unnormalized density.
    """
    lam = spec.lam
    return complex(np.pi ** (-lam) * reciprocal_gamma(1.0 - lam))


def _require_distinguished(spec: KernelSpec, what: str) -> None:
    if spec.v != 0.0:
        raise UnsupportedParameterError(
            f"{what} is implemented for v = 0 only (got v = {spec.v})"
        )


def omega_physical(x, spec: KernelSpec):
    """Real-space kernel density at |x| (scalar or array of radii or points).

    Only defined on the strip 0 < Re lam < 1, i.e. for orders with
    n (n-1)/(n+1) < alpha < n; elsewhere the family exists only as a
    distribution and this raises.  Zero outside the open unit ball.
    """
    _require_distinguished(spec, "the real-space density")
    lam = spec.lam.real
    if not 0.0 < lam < 1.0:
        raise KernelValidityError(
            f"real-space density needs 0 < Re lam < 1, got Re lam = {lam:g}"
        )
    r = np.abs(np.asarray(x, dtype=float))
    out = np.zeros_like(r)
    inside = r < 1.0
    g = gamma_const(spec).real
    out[inside] = g * (1.0 - r[inside] ** 2) ** (-lam)
    if np.ndim(x) == 0:
        return float(out[()])
    return out


def omega_hat(xi, spec: KernelSpec):
    """Spectral profile at frequency xi (radial; accepts |xi| or points).

    Smooth at 0 with value pi^nu / Gamma(nu+1); decays like |xi|^(-nu-1/2)
    with an oscillating phase.  Real-valued for v = 0.
    """
    _require_distinguished(spec, "the spectral profile")
    nu = spec.bessel_order
    rho = 2.0 * np.pi * np.abs(np.asarray(xi, dtype=float))
    out = (2.0 * np.pi) ** nu * np.asarray(bessel_j_scaled(nu, rho))
    if np.ndim(xi) == 0:
        return float(out[()])
    return out


def omega_hat_adjoint(xi, spec: KernelSpec):
    """Spectral profile of the reflected conjugate kernel.

    The profile of v = 0 members is real and even, so this coincides with
    omega_hat there; it exists separately so composition identities read
    the same way they do for general v.
    """
    return np.conjugate(omega_hat(xi, spec))


def omega_hat_dilated(xi, r: float, spec: KernelSpec):
    """Profile of the mass-preserving dilation: omega_hat(r * xi).

    Mass-preserving means the total integral (the value at xi = 0) is
    independent of r, which pins the normalization used everywhere else.
    """
    r = float(r)
    if not (np.isfinite(r) and r > 0.0):
        raise KernelValidityError(f"dilation scale must be > 0, got {r}")
    return omega_hat(np.asarray(xi, dtype=float) * r, spec)


def multiplier_split(xi, spec: KernelSpec):
    """Decompose the profile as a main oscillation plus a remainder.

    Returns (main, rest) with main + rest == omega_hat(xi) exactly (rest
    is defined by subtraction).  The main part is

        |xi|^(-nu) * sqrt(2/(pi rho)) cos(rho - nu pi/2 - pi/4),  rho = 2 pi |xi|,

    equivalently (1/pi) |xi|^(-a) cos(2 pi |xi| - pi a / 2) with
    a = nu + 1/2; the remainder then inherits the Bessel remainder's decay,
    one extra power of 1/|xi| beyond the main term.  Requires xi != 0.
    """
    _require_distinguished(spec, "the multiplier split")
    nu = spec.bessel_order
    r = np.abs(np.asarray(xi, dtype=float))
    if r.size and np.any(r == 0.0):
        raise ValueError("multiplier split is undefined at xi = 0")
    rho = 2.0 * np.pi * r
    main = r ** (-nu) * np.asarray(bessel_main_term(nu, rho))
    rest = np.asarray(omega_hat(r, spec)) - main
    if np.ndim(xi) == 0:
        return float(main[()]), float(rest[()])
    return main, rest


def _g(value: float) -> str:
    # repr is the shortest decimal that round-trips a 64-bit float
    return repr(float(value))


def write_kernel_tables(spec: KernelSpec, xi_values, x_values,
                        spectral_path, physical_path) -> dict:
    """Write CSV tables of the spectral profile (with its split) and the
    real-space density.

    The spectral table always has a row per frequency; the split columns
    are left empty at xi = 0 where the decomposition is undefined.  The
    physical table is written header-only when the parameters sit outside
    the density's strip, so a refusal is visible in the artifact rather
    than silently absent.  Returns row counts.
    """
    _require_distinguished(spec, "kernel tables")
    xi_values = np.asarray(xi_values, dtype=float).ravel()
    x_values = np.asarray(x_values, dtype=float).ravel()

    with open(spectral_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["xi", "omega_hat", "main", "remainder"])
        for xi in xi_values:
            oh = omega_hat(float(xi), spec)
            if xi == 0.0:
                w.writerow([_g(xi), _g(oh), "", ""])
            else:
                main, rest = multiplier_split(float(xi), spec)
                w.writerow([_g(xi), _g(oh), _g(main), _g(rest)])

    physical_rows = 0
    with open(physical_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "omega"])
        if 0.0 < spec.lam.real < 1.0:
            for x in x_values:
                w.writerow([_g(x), _g(omega_physical(float(x), spec))])
                physical_rows += 1

    return {"spectral_rows": int(xi_values.size), "physical_rows": physical_rows}

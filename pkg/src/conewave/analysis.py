"""Norm functionals, inequality checkers, and the exponent-region map.

Everything here is measurement: norms and ratios are computed from sampled
fields and reported as evidence (lower bounds, fitted constants, trends),
never as certified operator norms.  The region classifier, by contrast,
is exact arithmetic on exponents and carries a 1e-12 equality tolerance
only because its inputs are floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .conop import RadialQuadrature
from .fields import Field, SpacetimeField, convolve_omega
from .kernel import KernelSpec, omega_hat, omega_hat_adjoint
from .specialfn import bessel_remainder
from . import fields as _fields

__all__ = [
    "Region",
    "ExponentPoint",
    "classify_exponents",
    "classify",
    "necessary_window",
    "scaling_line_point",
    "lp_norm",
    "MixedNormSpec",
    "mixed_norm",
    "SteinWeissParams",
    "InadmissibleParamsError",
    "sw_derived_params",
    "stein_weiss_ratio",
    "crucial_estimate_ratio",
    "CaseFit",
    "CaseBoundReport",
    "case_bound_check",
    "RatioStats",
    "operator_ratio_estimate",
    "TrendVerdict",
    "boundedness_verdict",
]

_EQ_TOL = 1e-12  # classification equality tolerance: pure arithmetic, no noise


# ---------------------------------------------------------------------------
# exponent-region classification


class Region(Enum):
    SCALING_VIOLATED = "ScalingViolated"
    OUTSIDE_NECESSARY = "OutsideNecessary"
    REGION_I = "RegionI"
    REGION_II = "RegionII"
    OPEN_GAP = "OpenGap"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class ExponentPoint:
    """A candidate (1/p, 1/q, alpha, n) for L^p -> L^q boundedness."""

    inv_p: float
    inv_q: float
    alpha: float
    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"dimension must be an integer >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        for name in ("inv_p", "inv_q"):
            val = float(getattr(self, name))
            if not (np.isfinite(val) and 0.0 < val < 1.0):
                raise ValueError(f"{name} must lie in (0, 1), got {val}")
            object.__setattr__(self, name, val)
        alpha = float(self.alpha)
        if not (np.isfinite(alpha) and 0.0 < alpha < self.n):
            raise ValueError(f"alpha must lie in (0, {self.n}), got {alpha}")
        object.__setattr__(self, "alpha", alpha)


def necessary_window(alpha: float, n: int) -> tuple:
    """The open interval of 1/p values not excluded by scaling arguments.

    Lower end (n-1)/(2n) + (n+1)/(2n) * alpha/n, upper end with the two
    coefficient roles swapped; boundedness is impossible outside the
    closure, conjectural inside.
    """
    t = alpha / n
    lo = (n - 1) / (2 * n) + (n + 1) / (2 * n) * t
    hi = (n + 1) / (2 * n) + (n - 1) / (2 * n) * t
    return lo, hi


def scaling_line_point(alpha: float, n: int, inv_p: float) -> ExponentPoint:
    """The point on the scaling line alpha/n = 1/p - 1/q at this 1/p."""
    return ExponentPoint(inv_p, inv_p - alpha / n, alpha, n)


def classify_exponents(pt: ExponentPoint) -> Region:
    """Exactly one label per point; equality within 1e-12 is Boundary.

    Order of decision: scaling line membership first (off-line points are
    ScalingViolated no matter what), then the necessary window, then the
    two proved regions.  alpha >= n/(n+1) points inside the window are
    RegionI, including the equality case, which the high-alpha result
    covers; below that threshold the proved sub-window (1/2, 1/2 + alpha/n)
    is RegionII and the rest of the necessary window is OpenGap.
    """
    n = pt.n
    t = pt.alpha / n
    if abs(pt.inv_p - pt.inv_q - t) > _EQ_TOL:
        return Region.SCALING_VIOLATED

    lo, hi = necessary_window(pt.alpha, n)
    if abs(pt.inv_p - lo) <= _EQ_TOL or abs(pt.inv_p - hi) <= _EQ_TOL:
        return Region.BOUNDARY
    if not lo < pt.inv_p < hi:
        return Region.OUTSIDE_NECESSARY

    if pt.alpha >= n / (n + 1):
        return Region.REGION_I

    lo2, hi2 = 0.5, 0.5 + t
    if abs(pt.inv_p - lo2) <= _EQ_TOL or abs(pt.inv_p - hi2) <= _EQ_TOL:
        return Region.BOUNDARY
    if lo2 < pt.inv_p < hi2:
        return Region.REGION_II
    return Region.OPEN_GAP


def classify(inv_p: float, inv_q: float, alpha: float, n: int) -> Region:
    return classify_exponents(ExponentPoint(inv_p, inv_q, alpha, n))


# ---------------------------------------------------------------------------
# norms


def lp_norm(f, p: float) -> float:
    """(sum |f|^p cell)^{1/p} on either field kind; max norm at p = inf."""
    if not isinstance(f, (Field, SpacetimeField)):
        raise TypeError("lp_norm acts on fields")
    p = float(p)
    if not p > 1.0:
        raise ValueError(f"exponent must satisfy p > 1, got {p}")
    mags = np.abs(f.samples)
    if not np.all(np.isfinite(mags)):
        raise ValueError("field has non-finite samples")
    if math.isinf(p):
        return float(mags.max())
    return float((np.sum(mags**p) * f.cell_volume) ** (1.0 / p))


@dataclass(frozen=True)
class MixedNormSpec:
    """Exponents and radial grid for the mixed norm in (x, r).

    s is the outer exponent in r, q the inner one in x; the estimate being
    probed interpolates from s = q, and only s >= q >= 1 makes sense here.
    """

    q: float
    s: float
    alpha: float
    r_grid: RadialQuadrature

    def __post_init__(self):
        q, s = float(self.q), float(self.s)
        if not (np.isfinite(q) and np.isfinite(s)):
            raise ValueError("mixed-norm exponents must be finite")
        if not 1.0 <= q <= s:
            raise ValueError(f"need s >= q >= 1, got q={q}, s={s}")
        if not float(self.alpha) > 0.0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "alpha", float(self.alpha))


def mixed_norm(f: Field, spec: KernelSpec, mn: MixedNormSpec) -> float:
    """( integral r^(alpha s) ||f * Omega_r||_q^s dr/r )^(1/s) over the r grid.

    Physical-space route: each node costs one spatial convolution, and the
    q-norm is taken on the physical samples.  The (0, r_min) mass is
    restored in closed form when the grid asks for completion: there the
    convolution tends to omega_hat(0) * f, so the integrand's limit is
    known exactly.
    """
    if not isinstance(f, Field):
        raise TypeError("mixed_norm acts on spatial fields")
    if spec.alpha != mn.alpha:
        raise ValueError(
            f"kernel alpha {spec.alpha:g} != mixed-norm alpha {mn.alpha:g}"
        )
    quad = mn.r_grid
    r = quad.nodes()
    # measure r^(alpha s - 1) dr, one-sided: r here is a scale, not a shift
    w = quad.measure_weights(mn.alpha * mn.s - 1.0, both_signs=False)
    total = 0.0
    for j in range(quad.count):
        total += w[j] * lp_norm(convolve_omega(f, spec, r[j]), mn.q) ** mn.s
    if quad.completion:
        mass = quad.completion_mass(mn.alpha * mn.s - 1.0, both_signs=False)
        total += mass * (omega_hat(0.0, spec) * lp_norm(f, mn.q)) ** mn.s
    return float(total ** (1.0 / mn.s))


# ---------------------------------------------------------------------------
# weighted one-dimensional inequality checker


class InadmissibleParamsError(ValueError):
    """Parameter set outside the inequality's admissible range."""


@dataclass(frozen=True)
class SteinWeissParams:
    """Exponents of the weighted inequality

        || |x|^(-gamma_w) integral f(u) |u|^(-delta_w) |x-u|^(a-N) du ||_q
            <= C ||f||_p.

    The kernel power a must lie in (0, N) for the potential to exist at
    all; the four admissibility conditions on top of that are checked by
    constraint_failures, not the constructor, so inadmissible-but-
    meaningful sets can still be probed deliberately.
    """

    N: int
    a: float
    gamma_w: float
    delta_w: float
    p: float
    q: float

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise ValueError(f"dimension must be an integer >= 1, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        for name in ("a", "gamma_w", "delta_w", "p", "q"):
            val = float(getattr(self, name))
            if not np.isfinite(val):
                raise ValueError(f"{name} must be finite, got {val}")
            object.__setattr__(self, name, val)
        if not 0.0 < self.a < self.N:
            raise ValueError(f"kernel power must lie in (0, {self.N}), got {self.a}")
        for name in ("p", "q"):
            if not getattr(self, name) > 1.0:
                raise ValueError(f"{name} must exceed 1, got {getattr(self, name)}")

    def constraint_failures(self) -> list:
        """Names of the admissibility conditions this set violates.

        All four are required: the two weight bounds are strict (equality
        already breaks the inequality), the joint weight bound allows
        equality, and the scaling relation is an exact identity.
        """
        fails = []
        if not self.gamma_w < self.N / self.q:
            fails.append(f"gamma_w < N/q (got {self.gamma_w:g} >= {self.N / self.q:g})")
        dual = self.N * (self.p - 1.0) / self.p
        if not self.delta_w < dual:
            fails.append(f"delta_w < N(p-1)/p (got {self.delta_w:g} >= {dual:g})")
        if not self.gamma_w + self.delta_w >= 0.0:
            fails.append(
                f"gamma_w + delta_w >= 0 (got {self.gamma_w + self.delta_w:g})"
            )
        gap = self.a / self.N - (
            1.0 / self.p - 1.0 / self.q + (self.gamma_w + self.delta_w) / self.N
        )
        if abs(gap) > _EQ_TOL:
            fails.append(f"a/N = 1/p - 1/q + (gamma_w+delta_w)/N (off by {gap:.3e})")
        return fails

    def admissible(self) -> bool:
        return not self.constraint_failures()


def sw_derived_params(alpha: float, n: int) -> SteinWeissParams:
    """The one-dimensional weighted-inequality exponents that the kernel
    composition argument needs at order alpha in dimension n.

    q is pinned by alpha/n = 1/2 - 1/q, p is its conjugate, the two weight
    exponents are equal at 1/q - (n-1) alpha / (2n), and the kernel power
    follows from the scaling identity, a = 2(alpha/n + gamma_w).  For
    n = 1 the set is degenerate: gamma_w hits N/q exactly and a hits N, so
    it is rejected by construction; from n = 2 on it is strictly
    admissible.  A published statement of this reduction carries the
    kernel power with the opposite sign on gamma_w, a = 2(alpha/n -
    gamma_w), which fails the scaling identity; the derived value is used
    here and the discrepancy is surfaced by the CLI report.
    """
    n = int(n)
    if n < 1 or not 0.0 < alpha < n:
        raise ValueError(f"need 0 < alpha < n with n >= 1, got alpha={alpha}, n={n}")
    inv_q = 0.5 - alpha / n
    if not 0.0 < inv_q < 0.5:
        raise ValueError(f"derived 1/q = {inv_q:g} leaves (0, 1/2); alpha too large")
    q = 1.0 / inv_q
    p = q / (q - 1.0)
    gamma = inv_q - (n - 1) * alpha / (2.0 * n)
    a = 2.0 * (alpha / n + gamma)
    return SteinWeissParams(N=1, a=a, gamma_w=gamma, delta_w=gamma, p=p, q=q)


@lru_cache(maxsize=32)
def _gl_rule(nodes: int):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return x, w


def _dyadic_panel_rule(a: float, b: float, singular, depth: int, nodes: int):
    """Composite Gauss-Legendre rule on [a, b], panels halving dyadically
    toward each singular point.

    Budget: at most 2*depth + 1 panels per singular point plus the base
    panel structure, each carrying `nodes` Gauss points; endpoints are
    never evaluated.
    """
    breaks = {a, b}
    span = b - a
    for s in singular:
        if s < a - 1e-15 * abs(span) or s > b + 1e-15 * abs(span):
            continue
        breaks.add(min(max(s, a), b))
        for k in range(1, depth + 1):
            h = span * 0.5**k
            for cand in (s - h, s + h):
                if a < cand < b:
                    breaks.add(cand)
    cuts = np.array(sorted(breaks))
    keep = np.concatenate([[True], np.diff(cuts) > 1e-15 * max(abs(span), 1.0)])
    cuts = cuts[keep]
    gx, gw = _gl_rule(nodes)
    lo = cuts[:-1]
    widths = np.diff(cuts)
    pts = (lo[:, None] + widths[:, None] * (gx[None, :] + 1.0) * 0.5).ravel()
    wts = (widths[:, None] * gw[None, :] * 0.5).ravel()
    return pts, wts


def stein_weiss_ratio(params: SteinWeissParams, f: Field,
                      depth: int = 12, nodes_per_panel: int = 8,
                      allow_inadmissible: bool = False) -> float:
    """Measured constant of the weighted inequality on one input.

    Direct one-dimensional quadrature: the potential integral refines
    dyadically toward its singular points u = 0 and u = x, the outer norm
    toward x = 0, both over the field's box.  Inadmissible parameter sets
    raise, naming every violated condition; passing allow_inadmissible
    runs them anyway, which is exactly how the failure of the inequality
    is demonstrated (the measured value then tracks the truncation depth
    instead of converging).
    """
    fails = params.constraint_failures()
    if fails and not allow_inadmissible:
        raise InadmissibleParamsError("; ".join(fails))
    if params.N != 1:
        raise ValueError("direct quadrature is implemented for N = 1")
    if not isinstance(f, Field) or f.grid.n != 1:
        raise TypeError("stein_weiss_ratio takes a one-dimensional spatial field")
    vals = f.samples
    if np.max(np.abs(vals.imag)) > 1e-12 * max(np.max(np.abs(vals)), 1e-300):
        raise ValueError("input must be real and nonnegative")
    fr = vals.real
    if fr.min() < -1e-12 * max(fr.max(), 1e-300):
        raise ValueError("input must be nonnegative")

    grid_x = f.grid.axis()
    half = f.grid.extent / 2.0

    def fval(u):
        return np.interp(u, grid_x, fr, left=0.0, right=0.0)

    xs, xw = _dyadic_panel_rule(-half, half, (0.0,), depth, nodes_per_panel)
    pot = np.empty_like(xs)
    for i, x in enumerate(xs):
        us, uw = _dyadic_panel_rule(-half, half, (0.0, float(x)), depth,
                                    nodes_per_panel)
        integrand = fval(us) * np.abs(us) ** (-params.delta_w) \
            * np.abs(x - us) ** (params.a - params.N)
        pot[i] = float(np.sum(uw * integrand))
    weighted = np.abs(xs) ** (-params.gamma_w) * pot
    out_norm = float(np.sum(xw * weighted**params.q) ** (1.0 / params.q))

    fs, fw = _dyadic_panel_rule(-half, half, (0.0,), depth, nodes_per_panel)
    in_norm = float(np.sum(fw * fval(fs) ** params.p) ** (1.0 / params.p))
    if in_norm == 0.0:
        raise ValueError("input field is identically zero")
    return out_norm / in_norm


# ---------------------------------------------------------------------------
# composition (two-kernel) estimate and its case-by-case symbol bound


def crucial_estimate_ratio(spec: KernelSpec, q: float, r: float, s: float,
                           f: Field) -> float:
    """||f * Omega_r * reflected Omega_s||_q against its predicted envelope.

    The envelope is r^(-A) |r-s|^(-(n-1)/n alpha) s^(-A) ||f||_{q'},
    A = (n+1)/(2n) alpha.  Boundedness of this ratio over (r, s, f) is the
    quantitative content of the composition estimate; the ratio itself is
    invariant under (r, s, f) -> (dr, ds, f(./d)).  At n = 1 the middle
    factor's exponent is exactly 0, so r = s is allowed there; for n >= 2
    the envelope degenerates at r = s and the call is refused.
    """
    if not isinstance(f, Field):
        raise TypeError("crucial_estimate_ratio acts on spatial fields")
    q = float(q)
    if not q > 1.0:
        raise ValueError(f"exponent must exceed 1, got {q}")
    r, s = float(r), float(s)
    if not (r > 0.0 and s > 0.0):
        raise ValueError(f"radii must be > 0, got r={r}, s={s}")
    n = spec.n
    if n > 1 and r == s:
        raise ValueError("envelope degenerates at r = s for n > 1")
    if spec.n != f.grid.n:
        raise ValueError(f"kernel dimension {spec.n} != grid dimension {f.grid.n}")

    xi = f.grid.freq_radius()
    symbol = omega_hat(r * xi, spec) * omega_hat_adjoint(s * xi, spec)
    spacings = (f.grid.spacing,) * n
    fhat = _fields.forward_axes(f.samples, range(n), spacings)
    g = Field(f.grid, _fields.inverse_axes(fhat * symbol, range(n), spacings))

    big_a = (n + 1) / (2.0 * n) * spec.alpha
    mid = 1.0 if n == 1 else abs(r - s) ** (-(n - 1) / n * spec.alpha)
    envelope = r ** (-big_a) * mid * s ** (-big_a)
    dual = q / (q - 1.0)
    return lp_norm(g, q) / (envelope * lp_norm(f, dual))


@dataclass(frozen=True)
class CaseFit:
    """Fitted constant within one frequency regime."""

    count: int
    fitted_c: float
    argmax_xi: float


@dataclass(frozen=True)
class CaseBoundReport:
    """Per-regime evidence for the oscillatory-tail symbol bound."""

    fitted_c: float
    max_at_edge: bool
    cases: dict
    split_lo: float  # 1/(2 pi r): below it both remainders are pre-asymptotic
    split_hi: float  # 1/(2 pi s)


def case_bound_check(spec: KernelSpec, samples) -> CaseBoundReport:
    """Evaluate the remainder-product bound on a list of (xi, r, s) samples.

    For each sample the left side is
    |xi|^(-B alpha) (r|xi|)^(1/2) (s|xi|)^(1/2) |e(2 pi r |xi|)| |e(2 pi s |xi|)|
    with e the Bessel remainder at the kernel's order, and the claim is
    LHS <= C (r-s)^(-(n-1)/n alpha) |xi|^(-2 alpha) with one constant for
    the whole run.  The report splits the samples at xi = 1/(2 pi r) and
    1/(2 pi s) (requires r >= s, so the splits are ordered) and flags a
    fitted constant attained at the largest sampled xi, which would mean
    the sampling window, not the bound, sets the constant.
    """
    n = spec.n
    nu = spec.bessel_order
    b_alpha = spec.time_scale_power * spec.alpha
    rows = []
    for xi, r, s in samples:
        xi, r, s = float(xi), float(r), float(s)
        if not (xi > 0.0 and r >= s > 0.0):
            raise ValueError(f"need xi > 0 and r >= s > 0, got {(xi, r, s)}")
        if n > 1 and r == s:
            raise ValueError("envelope degenerates at r = s for n > 1")
        e_r = abs(float(bessel_remainder(nu, 2.0 * np.pi * r * xi)))
        e_s = abs(float(bessel_remainder(nu, 2.0 * np.pi * s * xi)))
        lhs = xi ** (-b_alpha) * np.sqrt(r * xi) * np.sqrt(s * xi) * e_r * e_s
        mid = 1.0 if n == 1 else (r - s) ** (-(n - 1) / n * spec.alpha)
        env = mid * xi ** (-2.0 * spec.alpha)
        rows.append((xi, r, s, lhs / env))

    if not rows:
        raise ValueError("no samples given")
    r0, s0 = rows[0][1], rows[0][2]
    split_lo = 1.0 / (2.0 * np.pi * r0)
    split_hi = 1.0 / (2.0 * np.pi * s0)

    def regime(xi, r, s):
        if xi <= 1.0 / (2.0 * np.pi * r):
            return 1
        if xi <= 1.0 / (2.0 * np.pi * s):
            return 2
        return 3

    cases = {}
    for idx in (1, 2, 3):
        sub = [(xi, ratio) for xi, r, s, ratio in rows if regime(xi, r, s) == idx]
        if sub:
            arg, best = max(sub, key=lambda t: t[1])
            cases[idx] = CaseFit(len(sub), float(best), float(arg))
        else:
            cases[idx] = CaseFit(0, 0.0, float("nan"))
    overall = max(fit.fitted_c for fit in cases.values())
    top = max((fit for fit in cases.values() if fit.count), key=lambda f: f.fitted_c)
    xi_max = max(xi for xi, _, _, _ in rows)
    at_edge = bool(top.count and np.isclose(top.argmax_xi, xi_max, rtol=1e-9))
    return CaseBoundReport(float(overall), at_edge, cases, split_lo, split_hi)


# ---------------------------------------------------------------------------
# empirical operator ratios and trend verdicts


@dataclass(frozen=True)
class RatioStats:
    """Ensemble of ||T f||_q / ||f||_p values; a lower-bound witness for
    the operator norm, never the norm itself."""

    ratios: tuple
    labels: tuple
    maximum: float
    median: float
    mean: float


def operator_ratio_estimate(op, inv_p: float, inv_q: float, family,
                            labels=None) -> RatioStats:
    """Apply op to every family member and collect the norm ratios."""
    for name, val in (("inv_p", inv_p), ("inv_q", inv_q)):
        if not 0.0 < float(val) < 1.0:
            raise ValueError(f"{name} must lie in (0, 1), got {val}")
    family = list(family)
    if not family:
        raise ValueError("empty test-function family")
    labels = list(labels) if labels is not None else [f"member-{i}" for i in range(len(family))]
    if len(labels) != len(family):
        raise ValueError("labels and family lengths differ")
    p, q = 1.0 / float(inv_p), 1.0 / float(inv_q)
    ratios = []
    for f in family:
        denom = lp_norm(f, p)
        if denom == 0.0:
            raise ValueError("family member with zero norm")
        ratios.append(lp_norm(op(f), q) / denom)
    arr = np.asarray(ratios)
    return RatioStats(tuple(float(v) for v in ratios), tuple(labels),
                      float(arr.max()), float(np.median(arr)), float(arr.mean()))


@dataclass(frozen=True)
class TrendVerdict:
    """Stability-vs-drift summary of a ratio ladder."""

    spread: float
    fitted_exponent: float
    monotone: bool
    verdict: str  # pass | fail | inconclusive


def boundedness_verdict(scales, ratios, spread_limit: float = 2.0,
                        growth_cutoff: float = 0.05) -> TrendVerdict:
    """Trend-based call on a ladder of ratios indexed by a scale.

    pass: total spread below spread_limit.  fail: strictly monotone drift
    with fitted |exponent| above growth_cutoff (a power-law trend is how
    unboundedness shows up on a finite grid).  Anything else is
    inconclusive.  Thresholds are configuration; these defaults match the
    reporting contract.
    """
    scales = np.asarray(list(scales), dtype=float)
    ratios = np.asarray(list(ratios), dtype=float)
    if scales.size != ratios.size or scales.size < 2:
        raise ValueError("need matching ladders with at least two entries")
    if np.any(ratios <= 0.0) or np.any(scales <= 0.0):
        raise ValueError("scales and ratios must be positive")
    order = np.argsort(scales)
    scales, ratios = scales[order], ratios[order]
    spread = float(ratios.max() / ratios.min())
    diffs = np.diff(ratios)
    monotone = bool(np.all(diffs > 0.0) or np.all(diffs < 0.0))
    slope = float(np.polyfit(np.log(scales), np.log(ratios), 1)[0])
    if monotone and abs(slope) > growth_cutoff:
        verdict = "fail"
    elif spread < spread_limit:
        verdict = "pass"
    else:
        verdict = "inconclusive"
    return TrendVerdict(spread, slope, monotone, verdict)

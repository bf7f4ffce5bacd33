"""Command-line driver.

Five subcommands map onto the package's experiment surfaces: kernel-table
dumps the kernel's spectral and physical profiles, verify runs a named
check battery, scan-region sweeps exponent space along the scaling line,
op-apply pushes a stored field through the operator, and norm-test probes
one exponent point with a dilation ladder.

A run is a pure function of (config, seed): reports carry the full merged
configuration (defaults included, nothing hidden), floats are written in
shortest round-trip decimal, and the one nondeterministic quantity, wall
time, goes to stderr and never into a report file.  Exit codes: 0 all
checks passed, 2 a numerical check failed, 3 the configuration or usage
was invalid.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import os
import platform
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy
from scipy.special import roots_jacobi

from . import __version__
from .analysis import (
    ExponentPoint,
    MixedNormSpec,
    Region,
    SteinWeissParams,
    boundedness_verdict,
    case_bound_check,
    classify_exponents,
    crucial_estimate_ratio,
    lp_norm,
    mixed_norm,
    operator_ratio_estimate,
    stein_weiss_ratio,
    sw_derived_params,
)
from .conop import RadialQuadrature, UnderResolvedWarning, apply_path, convergence_check
from .ensembles import gaussian, gaussian_spacetime, random_bumps
from .fields import FieldFormatError, Grid, SpacetimeField, SpacetimeGrid, load_field, save_field
from .kernel import KernelSpec, multiplier_split, omega_hat, write_kernel_tables
from .specialfn import bessel_remainder, reciprocal_gamma


class ConfigError(ValueError):
    """Invalid run configuration; reported on stderr with exit code 3."""


# ---------------------------------------------------------------------------
# configuration: flat INI sections, defaults echoed in full


_DEFAULTS = {
    "kernel": {"alpha": "0.5", "n": "1", "v": "0.0"},
    "kernel-table": {
        "xi_max": "10.0",
        "xi_count": "201",
        "x_max": "1.25",
        "x_count": "201",
    },
    "case-bounds": {"n": "2"},
    "stein-weiss": {"bumps": "200", "depth": "12"},
    "scan-region": {
        "n": "1",
        "alpha_min": "0.2",
        "alpha_max": "0.8",
        "alpha_step": "0.2",
        "inv_p_min": "0.1",
        "inv_p_max": "0.9",
        "inv_p_step": "0.05",
        "with_ratios": "false",
        "ratio_deltas": "0.5 1.0 2.0",
        "ratio_points": "256",
        "ratio_extent": "32.0",
    },
    "op-apply": {
        "input": "",
        "path": "multiplier",
        "cross_check": "auto",
        "cross_tol": "auto",
        "convergence_tol": "1e-3",
        "r_min": "auto",
        "r_max": "auto",
        "count": "160",
    },
    "norm-test": {
        "alpha": "0.4",
        "n": "1",
        "inv_p": "0.7",
        "inv_q": "auto",
        "deltas": "0.25 0.5 1.0 2.0 4.0",
        "path": "multiplier",
        "points": "1024",
        "extent": "64.0",
        "t_points": "1024",
        "t_extent": "64.0",
    },
}


def load_config(path=None) -> dict:
    """Merge a key/value file over the defaults.

    Unknown sections or keys are rejected outright; a typo that silently
    falls back to a default would poison the full-echo guarantee.
    """
    cfg = {sec: dict(keys) for sec, keys in _DEFAULTS.items()}
    if path is None:
        return cfg
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}")
    for sec in parser.sections():
        if sec not in cfg:
            raise ConfigError(f"unknown config section [{sec}]; known: {sorted(cfg)}")
        for key, val in parser.items(sec):
            if key not in cfg[sec]:
                raise ConfigError(
                    f"unknown key {key!r} in [{sec}]; known: {sorted(cfg[sec])}"
                )
            cfg[sec][key] = val.strip()
    return cfg


def _to_float(cfg, sec, key) -> float:
    raw = cfg[sec][key]
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{sec}] {key} must be a number, got {raw!r}")


def _to_int(cfg, sec, key) -> int:
    raw = cfg[sec][key]
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{sec}] {key} must be an integer, got {raw!r}")


def _to_bool(cfg, sec, key) -> bool:
    raw = cfg[sec][key].lower()
    if raw in ("true", "yes", "on", "1"):
        return True
    if raw in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"[{sec}] {key} must be a boolean, got {cfg[sec][key]!r}")


def _to_floats(cfg, sec, key) -> list:
    raw = cfg[sec][key].split()
    if not raw:
        raise ConfigError(f"[{sec}] {key} must list at least one number")
    try:
        return [float(tok) for tok in raw]
    except ValueError:
        raise ConfigError(f"[{sec}] {key} must be numbers, got {cfg[sec][key]!r}")


def _kernel_from(cfg) -> KernelSpec:
    try:
        return KernelSpec(
            _to_float(cfg, "kernel", "alpha"),
            _to_int(cfg, "kernel", "n"),
            _to_float(cfg, "kernel", "v"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc))


# ---------------------------------------------------------------------------
# report plumbing


def _rec(name, value=None, threshold=None, passed=True, provenance="", note=""):
    """One check record: a measured value against its gate, with the grid
    and quadrature it came from."""
    return {
        "name": str(name),
        "value": None if value is None else float(value),
        "threshold": None if threshold is None else float(threshold),
        "passed": bool(passed),
        "provenance": str(provenance),
        "note": str(note),
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def write_report(path, payload) -> None:
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def write_records_csv(path, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["name", "value", "threshold", "passed", "provenance", "note"])
        for r in records:
            w.writerow(
                [
                    r["name"],
                    "" if r["value"] is None else repr(float(r["value"])),
                    "" if r["threshold"] is None else repr(float(r["threshold"])),
                    "true" if r["passed"] else "false",
                    r["provenance"],
                    r["note"],
                ]
            )


def _versions() -> dict:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "conewave": __version__,
    }


def _report(command, cfg, seed, records, **extra) -> dict:
    # no jobs field: the pool size is execution plumbing, and reports must
    # stay byte-identical for a fixed (config, seed) whatever the pool
    payload = {
        "command": command,
        "config": cfg,
        "seed": int(seed),
        "records": records,
        "passed": all(r["passed"] for r in records),
        "versions": _versions(),
    }
    payload.update(extra)
    return payload


def _grid_prov(stg: SpacetimeGrid) -> str:
    return (
        f"grid n={stg.space.n} N={stg.space.points} L={stg.space.extent:g} "
        f"Nt={stg.t_points} Lt={stg.t_extent:g}"
    )


def _quad_prov(quad: RadialQuadrature) -> str:
    tail = " with completion" if quad.completion else ""
    return f"radial nodes {quad.count} on [{quad.r_min:.6g}, {quad.r_max:.6g}]{tail}"


def _pool_map(fn, items, jobs):
    # ordered collection keeps reports byte-identical whatever the pool size
    if jobs <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# verify batteries


def battery_bessel() -> list:
    """Oscillatory-remainder battery.

    Two families of checks: the half-integer orders where the remainder
    vanishes identically, and the envelope sup |remainder| rho^{3/2} over
    a long tail window, which must be finite and stable under grid
    refinement for the two-term reduction to carry any content.
    """
    records = []
    rho = np.exp(np.linspace(np.log(1e-2), np.log(1e3), 4096))
    for nu in (-0.5, 0.5):
        worst = float(np.max(np.abs(bessel_remainder(nu, rho))))
        records.append(
            _rec(
                f"remainder vanishes at order {nu:g}",
                worst,
                1e-12,
                worst <= 1e-12,
                "log grid rho in [1e-2, 1e3], 4096 points",
                "closed trigonometric form leaves no remainder",
            )
        )
    for nu in (-0.4, -0.1, 0.0, 0.5, 1.0):
        sups = []
        for m in (4096, 16384):
            rr = np.exp(np.linspace(0.0, np.log(1e3), m))[1:]
            sups.append(float(np.max(np.abs(bessel_remainder(nu, rr)) * rr**1.5)))
        drift = abs(sups[1]) if sups[0] == 0.0 else abs(sups[1] - sups[0]) / sups[0]
        records.append(
            _rec(
                f"tail envelope at order {nu:g}",
                sups[1],
                0.01,
                drift <= 0.01,
                "sup |remainder| rho^{3/2} on (1, 1e3], 16384 vs 4096 log points",
                f"refinement drift {drift:.3e}",
            )
        )
        small = np.exp(np.linspace(np.log(1e-3), 0.0, 2048))
        head = float(np.max(np.abs(bessel_remainder(nu, small)) * np.sqrt(small)))
        records.append(
            _rec(
                f"head envelope at order {nu:g}",
                head,
                None,
                bool(np.isfinite(head)),
                "sup |remainder| rho^{1/2} on [1e-3, 1], 2048 log points",
                "finiteness only; the main term alone carries the rho^{-1/2} blowup",
            )
        )
    return records


def _ft_quadrature_oracle(spec: KernelSpec, xi: float, nodes: int = 1200) -> float:
    # independent route to the spectral profile: integrate the density
    # itself with a Gauss rule built for its endpoint singularities,
    # bypassing the package's series/asymptotic evaluation entirely
    lam = spec.lam.real
    x, w = roots_jacobi(nodes, -lam, -lam)
    return spec.gamma_c.real * float(w @ np.cos(2.0 * np.pi * xi * x))


def battery_ft_identity() -> list:
    """Physical-vs-spectral agreement for the distinguished n=1 kernels."""
    records = []
    xis = (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)
    for alpha in (0.3, 0.5, 0.6, 0.8):
        spec = KernelSpec(alpha, 1)
        worst = max(
            abs(_ft_quadrature_oracle(spec, xi) - omega_hat(xi, spec)) for xi in xis
        )
        records.append(
            _rec(
                f"transform identity alpha={alpha:g}",
                worst,
                1e-6,
                worst <= 1e-6,
                "n=1; 1200-node Jacobi quadrature of the density vs the "
                "spectral profile; xi in {0, 0.5, 1, 2, 5, 10}",
            )
        )
    for alpha, n in ((0.5, 1), (0.5, 2), (1.0, 2), (1.5, 3)):
        spec = KernelSpec(alpha, n)
        nu = spec.bessel_order
        want = float(np.pi**nu * reciprocal_gamma(nu + 1.0).real)
        got = omega_hat(0.0, spec)
        diff = abs(got - want)
        records.append(
            _rec(
                f"zero-frequency mass alpha={alpha:g} n={n}",
                got,
                1e-13,
                diff <= 1e-13,
                "closed-form total mass",
                f"expected {want!r}",
            )
        )
    return records


def battery_case_bounds(n: int = 2) -> list:
    """Symbol-product bound against the separation envelope.

    Fits the best constant over a wide log grid of frequencies and radius
    pairs, then refuses to trust it unless the fit is stable under a 4x
    denser grid, attained away from the grid edges, and fed by samples in
    every frequency regime.
    """
    records = []
    n = int(n)
    if n == 1:
        records.append(
            _rec(
                "separation exponent note",
                0.0,
                None,
                True,
                "n=1",
                "the separation factor carries exponent (n-1)/n * alpha = 0 "
                "in one dimension, so the bound reduces to a plain "
                "|xi|^{-2 alpha} comparison with no blowup as r -> s",
            )
        )
        spec = KernelSpec(0.4, 1)
        xi = np.exp(np.linspace(np.log(1e-4), np.log(1e3), 2500))
        rep = case_bound_check(spec, [(x, 2.0, 1.0) for x in xi])
        records.append(
            _rec(
                "fitted constant alpha=0.4 r=2 s=1",
                rep.fitted_c,
                None,
                bool(np.isfinite(rep.fitted_c)) and not rep.max_at_edge,
                "n=1; 2500 log-spaced xi in [1e-4, 1e3]",
                "maximum attained away from the grid edges",
            )
        )
        return records

    for alpha in (0.3, 0.5, 2.0 / 3.0):
        spec = KernelSpec(alpha, n)
        for r, s in ((2.0, 1.0), (4.0, 1.0), (1.5, 1.0)):
            fits = []
            rep = None
            for m in (2500, 10000):
                xi = np.exp(np.linspace(np.log(1e-4), np.log(1e3), m))
                rep = case_bound_check(spec, [(x, r, s) for x in xi])
                fits.append(rep.fitted_c)
            drift = abs(fits[1] - fits[0]) / fits[0]
            counts = tuple(rep.cases[k].count for k in sorted(rep.cases))
            ok = drift <= 0.05 and not rep.max_at_edge and all(c > 0 for c in counts)
            records.append(
                _rec(
                    f"case bound alpha={alpha:.4g} r={r:g} s={s:g}",
                    rep.fitted_c,
                    0.05,
                    ok,
                    f"n={n}; log xi grid [1e-4, 1e3], 10000 vs 2500 points; "
                    f"regime splits at {rep.split_lo:.6g} and {rep.split_hi:.6g}",
                    f"refinement drift {drift:.3e}; regime sample counts {counts}",
                )
            )
    return records


_SW_PREFIXES = (
    "gamma_w < N/q",
    "delta_w < N(p-1)/p",
    "gamma_w + delta_w >= 0",
    "a/N = 1/p - 1/q",
)

# label, constructor kwargs, expected failure prefixes ("reject" = the
# constructor itself must refuse the set)
_SW_TRUTH_TABLE = (
    ("hls fractional integration", dict(N=1, a=0.5, gamma_w=0.0, delta_w=0.0, p=4 / 3, q=4.0), ()),
    ("derived n=2 alpha=0.3", dict(N=1, a=0.85, gamma_w=0.275, delta_w=0.275, p=20 / 13, q=20 / 7), ()),
    ("derived n=2 alpha=0.4", dict(N=1, a=0.8, gamma_w=0.2, delta_w=0.2, p=10 / 7, q=10 / 3), ()),
    ("derived n=2 alpha=0.5", dict(N=1, a=0.75, gamma_w=0.125, delta_w=0.125, p=4 / 3, q=4.0), ()),
    ("derived n=3 alpha=0.6", dict(N=1, a=0.6, gamma_w=0.1, delta_w=0.1, p=10 / 7, q=10 / 3), ()),
    ("generic balanced", dict(N=1, a=0.3, gamma_w=0.1, delta_w=0.1, p=2.0, q=2.5), ()),
    ("one-sided weight", dict(N=1, a=0.4, gamma_w=0.0, delta_w=0.2, p=5 / 3, q=2.5), ()),
    ("asymmetric signs", dict(N=1, a=0.55, gamma_w=0.25, delta_w=-0.1, p=10 / 7, q=10 / 3), ()),
    ("tiny outer weight", dict(N=1, a=0.501, gamma_w=0.001, delta_w=0.0, p=4 / 3, q=4.0), ()),
    ("outer weight at the edge", dict(N=1, a=0.9, gamma_w=0.3, delta_w=0.2, p=10 / 7, q=10 / 3), ("gamma_w < N/q",)),
    ("outer weight above the edge", dict(N=1, a=0.95, gamma_w=0.35, delta_w=0.2, p=10 / 7, q=10 / 3), ("gamma_w < N/q",)),
    ("inner weight at the edge", dict(N=1, a=0.8, gamma_w=0.1, delta_w=0.3, p=10 / 7, q=10 / 3), ("delta_w < N(p-1)/p",)),
    ("inner weight above the edge", dict(N=1, a=0.8, gamma_w=0.05, delta_w=0.35, p=10 / 7, q=10 / 3), ("delta_w < N(p-1)/p",)),
    ("negative joint weight", dict(N=1, a=0.2, gamma_w=-0.3, delta_w=0.2, p=2.0, q=5.0), ("gamma_w + delta_w >= 0",)),
    ("broken scaling", dict(N=1, a=0.35, gamma_w=0.1, delta_w=0.1, p=2.0, q=2.5), ("a/N = 1/p - 1/q",)),
    ("two failures at once", dict(N=1, a=0.8, gamma_w=0.45, delta_w=0.1, p=10 / 7, q=10 / 3), ("a/N = 1/p - 1/q", "gamma_w < N/q")),
    ("kernel power at dimension", dict(N=1, a=1.0, gamma_w=0.0, delta_w=0.0, p=4 / 3, q=4.0), "reject"),
    ("kernel power nonpositive", dict(N=1, a=0.0, gamma_w=0.0, delta_w=0.0, p=4 / 3, q=4.0), "reject"),
    ("order not above one", dict(N=1, a=0.5, gamma_w=0.0, delta_w=0.0, p=1.0, q=4.0), "reject"),
)


def battery_stein_weiss(seed: int = 0, jobs: int = 1, bumps: int = 200, depth: int = 12) -> list:
    """Weighted-inequality battery: validator truth table, measured
    constants on a bump ensemble, and growth ladders that separate an
    admissible set from a just-inadmissible one."""
    records = []
    for label, kwargs, expected in _SW_TRUTH_TABLE:
        if expected == "reject":
            try:
                SteinWeissParams(**kwargs)
                ok, note = False, "constructor accepted an out-of-domain set"
            except ValueError as exc:
                ok, note = True, f"rejected at construction: {exc}"
            records.append(
                _rec(f"validator {label}", None, None, ok, "constructor domain check", note)
            )
            continue
        params = SteinWeissParams(**kwargs)
        fails = params.constraint_failures()
        got = tuple(
            sorted(p for p in _SW_PREFIXES if any(f.startswith(p) for f in fails))
        )
        ok = got == tuple(sorted(expected)) and len(fails) == len(got)
        records.append(
            _rec(
                f"validator {label}",
                None,
                None,
                ok,
                "admissibility conditions",
                "; ".join(fails) if fails else "admissible",
            )
        )

    # the derived one-dimensional reduction is degenerate: the outer
    # weight lands exactly on N/q and the kernel power on N
    try:
        sw_derived_params(0.4, 1)
        records.append(
            _rec("validator derived n=1 degenerate", None, None, False,
                 "derived reduction", "degenerate set was accepted")
        )
    except ValueError as exc:
        records.append(
            _rec("validator derived n=1 degenerate", None, None, True,
                 "derived reduction", f"rejected: {exc}")
        )

    # surface the kernel-power sign question: only a = 2(alpha/n + gamma_w)
    # satisfies the scaling identity; the opposite-sign variant does not
    p2 = sw_derived_params(0.5, 2)
    variant = 2.0 * (0.5 / 2.0 - p2.gamma_w)
    alt = SteinWeissParams(N=1, a=variant, gamma_w=p2.gamma_w,
                           delta_w=p2.delta_w, p=p2.p, q=p2.q)
    alt_fails = alt.constraint_failures()
    records.append(
        _rec(
            "derived kernel power sign",
            p2.a,
            None,
            bool(p2.admissible()) and bool(alt_fails),
            "derived reduction at alpha=0.5, n=2",
            f"a = 2(alpha/n + gamma_w) = {p2.a:g} is admissible; the "
            f"opposite-sign variant a = {variant:g} fails: {'; '.join(alt_fails)}",
        )
    )

    grid = Grid.default(1)
    prov = f"grid n=1 N={grid.points} L={grid.extent:g}; dyadic depth {depth}"

    hls = SteinWeissParams(N=1, a=0.5, gamma_w=0.0, delta_w=0.0, p=4 / 3, q=4.0)
    rng = np.random.default_rng(seed)
    # the dyadic panels refine toward the origin, so keep the bumps wide
    # and central enough to be resolved; a narrow bump far out measures
    # panel coarseness, not the inequality
    fields = random_bumps(grid, int(bumps), rng,
                          width_range=(0.75, 2.0), center_range=(-8.0, 8.0))
    ratios = _pool_map(lambda f: stein_weiss_ratio(hls, f, depth=depth), fields, jobs)
    arr = np.asarray(ratios)
    med = float(np.median(arr))
    records.append(
        _rec(
            "hls constant stability",
            float(arr.max()),
            10.0 * med,
            float(arr.max()) < 10.0 * med,
            f"{int(bumps)} seeded random bumps; {prov}",
            f"median {med:.6g}; the max/median gap stays well under the "
            "x10 gate for a bounded inequality",
        )
    )

    inad = SteinWeissParams(N=1, a=0.95, gamma_w=0.35, delta_w=0.2, p=10 / 7, q=10 / 3)
    adm = sw_derived_params(0.4, 2)
    predicted = inad.gamma_w - inad.N / inad.q

    widths = (1.0, 2.0, 4.0, 8.0)
    lad_in, lad_ad = [], []
    for w in widths:
        f = gaussian(grid, w)
        lad_in.append(stein_weiss_ratio(inad, f, depth=depth, allow_inadmissible=True))
        lad_ad.append(stein_weiss_ratio(adm, f, depth=depth))
    tv_in = boundedness_verdict(widths, lad_in)
    records.append(
        _rec(
            "inadmissible width ladder",
            tv_in.fitted_exponent,
            0.02,
            tv_in.monotone and tv_in.fitted_exponent > 0.02,
            f"origin bumps of widths {widths}, fixed truncation floor; {prov}",
            f"outer weight past N/q by {predicted:g}; at a fixed floor the "
            f"measured constants grow like width^{predicted:g}",
        )
    )
    spread = max(lad_ad) / min(lad_ad) - 1.0
    records.append(
        _rec(
            "admissible flat ladder",
            spread,
            0.10,
            spread <= 0.10,
            f"origin bumps of widths {widths}, fixed truncation floor; {prov}",
            "same ladder under the derived admissible set stays flat",
        )
    )

    # concentration: shrink the bump and refine the panel floor with it
    # (floor ~ width^2), the honest protocol for a concentrating probe;
    # the truncated divergence at the weight singularity then climbs
    # monotonically while the admissible twin converges
    conc = (4.0, 2.0, 1.0, 0.5, 0.25)
    conc_in, conc_ad = [], []
    for w in conc:
        d = int(round(depth + 2 - 2 * math.log2(w)))
        f = gaussian(grid, w)
        conc_in.append(stein_weiss_ratio(inad, f, depth=d, allow_inadmissible=True))
        conc_ad.append(stein_weiss_ratio(adm, f, depth=d))
    tv_conc = boundedness_verdict([1.0 / w for w in conc], conc_in)
    records.append(
        _rec(
            "inadmissible concentration growth",
            tv_conc.fitted_exponent,
            0.03,
            tv_conc.monotone and tv_conc.fitted_exponent > 0.03,
            f"origin bumps of widths {conc}, floor refined with the bump; {prov}",
            f"monotone growth under bump concentration at rate close to the "
            f"violation margin {predicted:g} per halving",
        )
    )
    conc_spread = max(conc_ad) / min(conc_ad) - 1.0
    records.append(
        _rec(
            "admissible concentration stability",
            conc_spread,
            0.10,
            conc_spread <= 0.10,
            f"origin bumps of widths {conc}, floor refined with the bump; {prov}",
            "the same concentrating protocol leaves the admissible constant flat",
        )
    )

    depths = (8, 10, 12, 14)
    probe = gaussian(grid, 2.0)
    sweep_in = [stein_weiss_ratio(inad, probe, depth=d, allow_inadmissible=True) for d in depths]
    sweep_ad = [stein_weiss_ratio(adm, probe, depth=d) for d in depths]
    grows = all(b > a for a, b in zip(sweep_in, sweep_in[1:]))
    steps = [abs(b - a) / a for a, b in zip(sweep_ad, sweep_ad[1:])]
    records.append(
        _rec(
            "inadmissible depth divergence",
            sweep_in[-1] / sweep_in[0],
            None,
            grows,
            f"refinement depths {depths}; width-2 origin bump; grid n=1 "
            f"N={grid.points} L={grid.extent:g}",
            "the measured constant keeps climbing as the quadrature "
            "resolves more of the singularity: no inequality to converge to",
        )
    )
    records.append(
        _rec(
            "admissible depth convergence",
            max(steps),
            0.02,
            max(steps) <= 0.02,
            f"refinement depths {depths}; width-2 origin bump; grid n=1 "
            f"N={grid.points} L={grid.extent:g}",
            "successive relative steps shrink under the admissible set",
        )
    )
    return records


def battery_crucial() -> list:
    """Composition-estimate battery on the two-kernel symbol product."""
    records = []
    spec = KernelSpec(0.4, 1)
    g1 = Grid.default(1)
    f1 = gaussian(g1, 1.0)
    base = crucial_estimate_ratio(spec, 10.0, 2.0, 1.0, f1)

    g_fine = Grid(1, 2 * g1.points, g1.extent)
    fine = crucial_estimate_ratio(spec, 10.0, 2.0, 1.0, gaussian(g_fine, 1.0))
    drift = abs(fine - base) / base
    records.append(
        _rec(
            "composition ratio alpha=0.4 r=2 s=1",
            fine,
            0.05,
            bool(np.isfinite(fine)) and drift <= 0.05,
            f"q=10; grid n=1 N={g_fine.points} vs N={g1.points}, L={g1.extent:g}",
            f"grid refinement drift {drift:.3e}",
        )
    )

    swap = crucial_estimate_ratio(spec, 10.0, 1.0, 2.0, f1)
    sym = abs(swap - base) / base
    records.append(
        _rec(
            "radius exchange symmetry",
            sym,
            1e-12,
            sym <= 1e-12,
            f"q=10; grid n=1 N={g1.points} L={g1.extent:g}",
            "the distinguished symbol is real, so swapping the radii "
            "cannot move the ratio",
        )
    )

    scaled = crucial_estimate_ratio(spec, 10.0, 4.0, 2.0, gaussian(g1, 2.0))
    inv = abs(scaled - base) / base
    records.append(
        _rec(
            "joint dilation invariance",
            inv,
            1e-12,
            inv <= 1e-12,
            f"q=10; grid n=1 N={g1.points} L={g1.extent:g}",
            "(r, s, f) -> (2r, 2s, f(./2)) leaves the envelope-normalized "
            "ratio fixed",
        )
    )

    try:
        crucial_estimate_ratio(KernelSpec(0.5, 2), 10.0, 1.0, 1.0, gaussian(Grid(2, 64, 16.0), 1.0))
        records.append(
            _rec("equal radii refusal above n=1", None, None, False,
                 "n=2 envelope", "degenerate call was accepted")
        )
    except ValueError as exc:
        records.append(
            _rec("equal radii refusal above n=1", None, None, True,
                 "n=2 envelope", f"rejected: {exc}")
        )
    return records


def battery_mixed_norm() -> list:
    """Radial mixed-norm battery: width invariance and grid convergence."""
    records = []
    g = Grid.default(1)
    spec = KernelSpec(0.4, 1)
    quad = RadialQuadrature(g.spacing / 4.0, 16.0, 160)
    mn = MixedNormSpec(10.0, 10.0, 0.4, quad)
    prov = f"grid n=1 N={g.points} L={g.extent:g}; {_quad_prov(quad)}"

    vals = []
    for w in (0.25, 0.5, 1.0, 2.0, 4.0):
        f = gaussian(g, w)
        vals.append(mixed_norm(f, spec, mn) / lp_norm(f, 2.0))
    spread = max(vals) / min(vals) - 1.0
    records.append(
        _rec(
            "width invariance",
            spread,
            0.10,
            spread <= 0.10,
            prov,
            "mixed norm over the input's L2 norm across bump widths "
            "0.25 to 4; both sides scale identically, so the ratio must "
            "stay flat",
        )
    )

    f = gaussian(g, 1.0)
    m1 = mixed_norm(f, spec, mn)
    mn2 = MixedNormSpec(10.0, 10.0, 0.4, RadialQuadrature(quad.r_min, quad.r_max, 2 * quad.count))
    m2 = mixed_norm(f, spec, mn2)
    drift = abs(m1 - m2) / m2
    records.append(
        _rec(
            "radial refinement",
            drift,
            0.02,
            drift <= 0.02,
            prov,
            f"node doubling moves the value by {drift:.3e}",
        )
    )

    try:
        MixedNormSpec(10.0, 2.0, 0.4, quad)
        records.append(
            _rec("exponent ordering refusal", None, None, False,
                 "mixed-norm domain", "s < q was accepted")
        )
    except ValueError as exc:
        records.append(
            _rec("exponent ordering refusal", None, None, True,
                 "mixed-norm domain", f"rejected: {exc}")
        )
    return records


_SUITES = ("bessel", "ft-identity", "case-bounds", "stein-weiss", "crucial", "mixed-norm")


# ---------------------------------------------------------------------------
# subcommands


def cmd_kernel_table(cfg, out_dir, seed, jobs) -> int:
    spec = _kernel_from(cfg)
    xi_max = _to_float(cfg, "kernel-table", "xi_max")
    xi_count = _to_int(cfg, "kernel-table", "xi_count")
    x_max = _to_float(cfg, "kernel-table", "x_max")
    x_count = _to_int(cfg, "kernel-table", "x_count")
    if xi_max <= 0 or x_max <= 0 or xi_count < 2 or x_count < 2:
        raise ConfigError("kernel-table ranges must be positive with at least 2 points")

    xi = np.linspace(0.0, xi_max, xi_count)
    x = np.linspace(-x_max, x_max, x_count)
    spectral_path = os.path.join(out_dir, "kernel_spectral.csv")
    physical_path = os.path.join(out_dir, "kernel_physical.csv")
    try:
        counts = write_kernel_tables(spec, xi, x, spectral_path, physical_path)
    except ValueError as exc:
        raise ConfigError(str(exc))

    records = [
        _rec(
            "spectral rows",
            counts["spectral_rows"],
            None,
            counts["spectral_rows"] == xi_count,
            f"xi in [0, {xi_max:g}], {xi_count} points",
        ),
        _rec(
            "physical rows",
            counts["physical_rows"],
            None,
            True,
            f"x in [-{x_max:g}, {x_max:g}], {x_count} points",
            "header-only when the density parameter leaves its strip; "
            "the refusal is visible in the artifact",
        ),
    ]
    pos = xi[xi > 0.0]
    if pos.size:
        worst = 0.0
        for v in pos:
            main, rest = multiplier_split(float(v), spec)
            worst = max(worst, abs(main + rest - omega_hat(float(v), spec)))
        records.append(
            _rec(
                "split reassembly",
                worst,
                1e-12,
                worst <= 1e-12,
                f"{pos.size} positive frequencies",
                "main + remainder columns must re-add to the profile exactly",
            )
        )
    mass = omega_hat(0.0, spec)
    records.append(
        _rec("zero-frequency mass", mass, None, True, "closed-form total mass")
    )

    report = _report("kernel-table", cfg, seed, records,
                     files={"spectral": spectral_path, "physical": physical_path})
    write_report(os.path.join(out_dir, "report.json"), report)
    write_records_csv(os.path.join(out_dir, "records.csv"), records)
    return 0 if report["passed"] else 2


def cmd_verify(suite, cfg, out_dir, seed, jobs) -> int:
    if suite == "bessel":
        records = battery_bessel()
    elif suite == "ft-identity":
        records = battery_ft_identity()
    elif suite == "case-bounds":
        records = battery_case_bounds(_to_int(cfg, "case-bounds", "n"))
    elif suite == "stein-weiss":
        bumps = _to_int(cfg, "stein-weiss", "bumps")
        depth = _to_int(cfg, "stein-weiss", "depth")
        if bumps < 2 or depth < 4:
            raise ConfigError("stein-weiss needs bumps >= 2 and depth >= 4")
        records = battery_stein_weiss(seed=seed, jobs=jobs, bumps=bumps, depth=depth)
    elif suite == "crucial":
        records = battery_crucial()
    elif suite == "mixed-norm":
        records = battery_mixed_norm()
    else:
        raise ConfigError(f"unknown verify suite {suite!r}; known: {', '.join(_SUITES)}")

    report = _report("verify", cfg, seed, records, suite=suite)
    write_report(os.path.join(out_dir, "report.json"), report)
    write_records_csv(os.path.join(out_dir, "records.csv"), records)
    return 0 if report["passed"] else 2


def _ladder(lo: float, hi: float, step: float, what: str) -> list:
    if step <= 0 or hi < lo:
        raise ConfigError(f"{what}: need min <= max and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


def cmd_scan_region(cfg, out_dir, seed, jobs) -> int:
    sec = "scan-region"
    n = _to_int(cfg, sec, "n")
    if n < 1:
        raise ConfigError("scan-region n must be a positive integer")
    alphas = _ladder(_to_float(cfg, sec, "alpha_min"), _to_float(cfg, sec, "alpha_max"),
                     _to_float(cfg, sec, "alpha_step"), "alpha range")
    inv_ps = _ladder(_to_float(cfg, sec, "inv_p_min"), _to_float(cfg, sec, "inv_p_max"),
                     _to_float(cfg, sec, "inv_p_step"), "inv_p range")
    for a in alphas:
        if not 0.0 < a < n:
            raise ConfigError(f"scan-region alpha {a:g} leaves (0, {n})")
    for ip in inv_ps:
        if not 0.0 < ip < 1.0:
            raise ConfigError(f"scan-region inv_p {ip:g} leaves (0, 1)")
    with_ratios = _to_bool(cfg, sec, "with_ratios")
    if with_ratios and n != 1:
        raise ConfigError("ratio probes are implemented for n = 1 scans only")

    points = []
    for alpha in alphas:
        for ip in inv_ps:
            iq = ip - alpha / n
            if not 0.0 < iq < 1.0:
                continue  # the scaling line leaves the exponent square here
            pt = ExponentPoint(ip, iq, alpha, n)
            points.append((pt, classify_exponents(pt)))

    ratio_cols = {}
    if with_ratios:
        deltas = _to_floats(cfg, sec, "ratio_deltas")
        if len(deltas) < 2 or any(d <= 0 for d in deltas):
            raise ConfigError("ratio_deltas needs at least two positive widths")
        pts_count = _to_int(cfg, sec, "ratio_points")
        extent = _to_float(cfg, sec, "ratio_extent")
        try:
            stg = SpacetimeGrid(Grid(1, pts_count, extent), pts_count, extent)
        except ValueError as exc:
            raise ConfigError(str(exc))
        quad = RadialQuadrature.for_grid(stg)
        probes = [(pt, region) for pt, region in points
                  if region in (Region.REGION_I, Region.REGION_II)]

        def probe(item):
            pt, _ = item
            spec = KernelSpec(pt.alpha, 1)
            family = [gaussian_spacetime(stg, d) for d in deltas]
            stats = operator_ratio_estimate(
                lambda f: apply_path("multiplier")(f, spec, quad),
                pt.inv_p, pt.inv_q, family,
                labels=[f"width {d:g}" for d in deltas],
            )
            tv = boundedness_verdict(deltas, stats.ratios)
            return stats.maximum, max(stats.ratios) / min(stats.ratios), tv.verdict

        for item, out in zip(probes, _pool_map(probe, probes, jobs)):
            ratio_cols[item[0]] = out

    csv_path = os.path.join(out_dir, "scan.csv")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["inv_p", "inv_q", "alpha", "n", "region",
                    "ratio_max", "ratio_spread", "verdict"])
        for pt, region in points:
            extra = ratio_cols.get(pt)
            w.writerow([
                repr(float(pt.inv_p)), repr(float(pt.inv_q)),
                repr(float(pt.alpha)), str(n), region.value,
                "" if extra is None else repr(float(extra[0])),
                "" if extra is None else repr(float(extra[1])),
                "" if extra is None else extra[2],
            ])

    tally = {}
    for _, region in points:
        tally[region.value] = tally.get(region.value, 0) + 1
    records = [
        _rec(f"points labeled {name}", count, None, True,
             f"n={n}; {len(alphas)} alpha values x {len(inv_ps)} inv_p values "
             "on the scaling line")
        for name, count in sorted(tally.items())
    ]
    for pt, region in points:
        extra = ratio_cols.get(pt)
        if extra is None:
            continue
        records.append(
            _rec(
                f"ratio probe alpha={pt.alpha:g} inv_p={pt.inv_p:g}",
                extra[0],
                None,
                extra[2] != "fail",
                f"{region.value}; coarse dilation ladder, multiplier path",
                f"spread {extra[1]:.6g}, verdict {extra[2]}",
            )
        )

    report = _report("scan-region", cfg, seed, records,
                     files={"scan": csv_path}, points=len(points), tally=tally)
    write_report(os.path.join(out_dir, "report.json"), report)
    write_records_csv(os.path.join(out_dir, "records.csv"), records)
    return 0 if report["passed"] else 2


def cmd_op_apply(cfg, out_dir, seed, jobs) -> int:
    sec = "op-apply"
    in_path = cfg[sec]["input"]
    if not in_path:
        raise ConfigError("op-apply needs [op-apply] input = <field file>")
    try:
        field = load_field(in_path)
    except FileNotFoundError:
        raise ConfigError(f"input field file not found: {in_path}")
    except (FieldFormatError, ValueError) as exc:
        raise ConfigError(f"unreadable field file {in_path}: {exc}")
    if not isinstance(field, SpacetimeField):
        raise ConfigError("op-apply expects a spacetime field file")

    spec = _kernel_from(cfg)
    path = cfg[sec]["path"]
    if path not in ("slices", "multiplier", "cone-direct"):
        raise ConfigError(f"unknown operator path {path!r}")

    if cfg[sec]["r_min"] == "auto" and cfg[sec]["r_max"] == "auto":
        try:
            quad = RadialQuadrature.for_grid(field.grid, _to_int(cfg, sec, "count"))
        except ValueError as exc:
            raise ConfigError(str(exc))
    else:
        try:
            quad = RadialQuadrature(
                _to_float(cfg, sec, "r_min"), _to_float(cfg, sec, "r_max"),
                _to_int(cfg, sec, "count"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc))

    op = apply_path(path)
    try:
        if path == "slices":
            out_field = op(field, spec, quad, jobs=jobs)
        else:
            out_field = op(field, spec, quad)
    except (ValueError, TypeError) as exc:
        # validity refusals from the operator layer are configuration
        # problems at this level, not numerical failures
        raise ConfigError(str(exc))

    out_path = os.path.join(out_dir, "result.field")
    save_field(out_field, out_path)
    prov = f"{_grid_prov(field.grid)}; {_quad_prov(quad)}; path {path}"
    records = [
        _rec("output L2 norm", lp_norm(out_field, 2.0), None, True, prov),
    ]

    tol = _to_float(cfg, sec, "convergence_tol")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnderResolvedWarning)
        diag = convergence_check(field, spec, quad, path=path, tol=tol)
    for key in ("r_min_halved", "r_max_doubled", "nodes_doubled"):
        flagged = diag[key] > tol
        records.append(
            # diagnostic, not a gate: the library signals a truncation-
            # sensitive window as a warning, and the CLI keeps that severity
            _rec(f"sensitivity {key}", diag[key], None, True, prov,
                 "relative L2 movement of the output under this refinement"
                 + (f"; exceeds the {tol:g} advisory tolerance, widen or "
                    "densify the radial window if the tail matters" if flagged else ""))
        )

    cross = cfg[sec]["cross_check"]
    if cross == "auto":
        cross = "multiplier" if path != "multiplier" else "slices"
    if cross != "none":
        if cross not in ("slices", "multiplier", "cone-direct"):
            raise ConfigError(f"unknown cross_check path {cross!r}")
        raw_tol = cfg[sec]["cross_tol"]
        if raw_tol == "auto":
            cross_tol = 0.02 if "cone-direct" in (path, cross) else 1e-3
        else:
            cross_tol = _to_float(cfg, sec, "cross_tol")
        try:
            other = apply_path(cross)(field, spec, quad)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"cross_check path {cross!r}: {exc}")
        scale = float(np.linalg.norm(out_field.samples))
        diff = float(np.linalg.norm(other.samples - out_field.samples))
        rel = diff / scale if scale > 0.0 else diff
        records.append(
            _rec(f"cross-path agreement vs {cross}", rel, cross_tol,
                 rel <= cross_tol, prov,
                 "relative L2 difference between independent evaluation routes")
        )

    report = _report("op-apply", cfg, seed, records,
                     files={"result": out_path}, diagnostics=diag)
    write_report(os.path.join(out_dir, "report.json"), report)
    write_records_csv(os.path.join(out_dir, "records.csv"), records)
    return 0 if report["passed"] else 2


def cmd_norm_test(cfg, out_dir, seed, jobs) -> int:
    sec = "norm-test"
    alpha = _to_float(cfg, sec, "alpha")
    n = _to_int(cfg, sec, "n")
    inv_p = _to_float(cfg, sec, "inv_p")
    raw_q = cfg[sec]["inv_q"]
    if raw_q == "auto":
        inv_q = inv_p - alpha / n  # the scaling-line partner of inv_p
    else:
        try:
            inv_q = float(raw_q)
        except ValueError:
            raise ConfigError(f"[{sec}] inv_q must be a number or 'auto', got {raw_q!r}")
    deltas = sorted(_to_floats(cfg, sec, "deltas"))
    if len(deltas) < 2 or deltas[0] <= 0:
        raise ConfigError("norm-test deltas needs at least two positive widths")
    path = cfg[sec]["path"]

    try:
        spec = KernelSpec(alpha, n)
        pt = ExponentPoint(inv_p, inv_q, alpha, n)
        stg = SpacetimeGrid(
            Grid(n, _to_int(cfg, sec, "points"), _to_float(cfg, sec, "extent")),
            _to_int(cfg, sec, "t_points"), _to_float(cfg, sec, "t_extent"),
        )
        op = apply_path(path)
    except ValueError as exc:
        raise ConfigError(str(exc))
    region = classify_exponents(pt)
    quad = RadialQuadrature.for_grid(stg)
    prov = f"{_grid_prov(stg)}; {_quad_prov(quad)}; path {path}"

    def run(f):
        if path == "slices":
            return op(f, spec, quad, jobs=1)
        return op(f, spec, quad)

    family = [gaussian_spacetime(stg, d) for d in deltas]
    try:
        stats = operator_ratio_estimate(run, inv_p, inv_q, family,
                                        labels=[f"width {d:g}" for d in deltas])
    except ValueError as exc:
        raise ConfigError(str(exc))
    tv = boundedness_verdict(deltas, stats.ratios)

    records = [
        _rec(f"ratio at width {d:g}", ratio, None, True, prov,
             "norm ratio of output to input; a lower-bound witness, "
             "never the operator norm")
        for d, ratio in zip(deltas, stats.ratios)
    ]
    records.append(
        _rec(
            "trend verdict",
            tv.spread,
            2.0,
            tv.verdict == "pass",
            prov,
            f"verdict {tv.verdict}; fitted exponent {tv.fitted_exponent:+.4g}; "
            f"monotone {tv.monotone}; point classified {region.value}",
        )
    )

    report = _report(
        "norm-test", cfg, seed, records,
        region=region.value,
        ratio_stats={"max": stats.maximum, "median": stats.median, "mean": stats.mean},
        verdict={"spread": tv.spread, "fitted_exponent": tv.fitted_exponent,
                 "monotone": tv.monotone, "verdict": tv.verdict},
    )
    write_report(os.path.join(out_dir, "report.json"), report)
    write_records_csv(os.path.join(out_dir, "records.csv"), records)
    return 0 if report["passed"] else 2


# ---------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors, which this tool reserves for
    # numerical failures; remap to the configuration exit code
    def error(self, message):
        self.exit(3, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="conewave", description="cone-kernel experiment driver")
    parser.add_argument("--config", metavar="PATH", help="INI-style run configuration")
    parser.add_argument("--jobs", type=int, default=None, metavar="N",
                        help="worker threads (default: $CONEWAVE_JOBS or 1)")
    parser.add_argument("--seed", type=int, default=0, metavar="S",
                        help="RNG seed for ensemble draws (default 0)")
    parser.add_argument("--out", default=".", metavar="DIR",
                        help="directory for report artifacts (default .)")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    sub.add_parser("kernel-table", help="dump spectral and physical kernel profiles")
    pv = sub.add_parser("verify", help="run a named check battery")
    pv.add_argument("suite", choices=_SUITES)
    sub.add_parser("scan-region", help="classify exponent points along the scaling line")
    sub.add_parser("op-apply", help="apply the operator to a stored field")
    sub.add_parser("norm-test", help="probe one exponent point with a dilation ladder")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    started = time.monotonic()

    jobs = args.jobs
    if jobs is None:
        raw = os.environ.get("CONEWAVE_JOBS", "1")
        try:
            jobs = int(raw)
        except ValueError:
            print(f"conewave: config error: CONEWAVE_JOBS must be an integer, got {raw!r}",
                  file=sys.stderr)
            return 3
    if jobs < 1:
        print("conewave: config error: --jobs must be >= 1", file=sys.stderr)
        return 3

    try:
        cfg = load_config(args.config)
        os.makedirs(args.out, exist_ok=True)
        if args.command == "kernel-table":
            code = cmd_kernel_table(cfg, args.out, args.seed, jobs)
        elif args.command == "verify":
            code = cmd_verify(args.suite, cfg, args.out, args.seed, jobs)
        elif args.command == "scan-region":
            code = cmd_scan_region(cfg, args.out, args.seed, jobs)
        elif args.command == "op-apply":
            code = cmd_op_apply(cfg, args.out, args.seed, jobs)
        else:
            code = cmd_norm_test(cfg, args.out, args.seed, jobs)
    except ConfigError as exc:
        print(f"conewave: config error: {exc}", file=sys.stderr)
        return 3

    # wall time is the one nondeterministic output; it stays on stderr so
    # the report files remain byte-identical across reruns
    print(f"conewave {args.command}: exit {code}, {time.monotonic() - started:.2f}s, "
          f"{jobs} worker(s)", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

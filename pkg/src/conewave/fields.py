"""Sampled fields on periodic grids, their transforms, and dilation.

Conventions, fixed once here and relied on everywhere else:

* physical samples are stored in centered order, i.e. sample k sits at
  x = (k - N//2) * spacing, so the domain is [-L/2, L/2);
* spectral samples are stored in FFT layout at the frequencies
  numpy.fft.fftfreq(N, spacing);
* the transform pair approximates the continuum integrals

      F(xi) = integral f(x) exp(-2 pi i x . xi) dx,
      f(x)  = integral F(xi) exp(+2 pi i x . xi) dxi,

  realized as fftn(ifftshift(f)) * spacing^n and its exact inverse, so a
  round trip is exact to machine precision and Parseval holds with the
  cell volumes as written.

The torus stands in for R^n: inputs are expected to decay well inside the
box, and kernels enter through their exact continuum multipliers rather
than periodized physical densities.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .kernel import KernelSpec, omega_hat

__all__ = [
    "PHYSICAL",
    "SPECTRAL",
    "DomainTagError",
    "AliasingError",
    "FieldFormatError",
    "Grid",
    "Field",
    "SpacetimeGrid",
    "SpacetimeField",
    "fourier_transform",
    "inverse_transform",
    "convolve_omega",
    "dilate_field",
    "slice_at_time",
    "save_field",
    "load_field",
    "export_csv_1d",
]

PHYSICAL = "physical"
SPECTRAL = "spectral"

_FORMAT_VERSION = 1


class DomainTagError(ValueError):
    """Operation applied to a field in the wrong domain."""


class AliasingError(ValueError):
    """Requested resampling cannot be represented on the grid."""


class FieldFormatError(ValueError):
    """Malformed field file or sidecar."""


def _check_tag(tag: str) -> str:
    if tag not in (PHYSICAL, SPECTRAL):
        raise DomainTagError(f"domain tag must be {PHYSICAL!r} or {SPECTRAL!r}, got {tag!r}")
    return tag


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L/2, L/2)^n with N samples per axis."""

    n: int
    points: int
    extent: float

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.n}")
        p = self.points
        if not isinstance(p, (int, np.integer)) or p < 2 or (p & (p - 1)):
            raise ValueError(f"points per axis must be a power of two >= 2, got {p}")
        if not (np.isfinite(self.extent) and self.extent > 0):
            raise ValueError(f"extent must be > 0, got {self.extent}")
        object.__setattr__(self, "points", int(p))
        object.__setattr__(self, "extent", float(self.extent))

    @property
    def spacing(self) -> float:
        return self.extent / self.points

    @property
    def freq_spacing(self) -> float:
        return 1.0 / self.extent

    @property
    def nyquist(self) -> float:
        return self.points / (2.0 * self.extent)

    @property
    def shape(self) -> tuple:
        return (self.points,) * self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.n

    def axis(self) -> np.ndarray:
        return (np.arange(self.points) - self.points // 2) * self.spacing

    def freq_axis(self) -> np.ndarray:
        return np.fft.fftfreq(self.points, self.spacing)

    def radius(self) -> np.ndarray:
        """|x| on the full grid, centered order."""
        axes = np.meshgrid(*(self.axis(),) * self.n, indexing="ij", sparse=True)
        return np.sqrt(sum(a**2 for a in axes))

    def freq_radius(self) -> np.ndarray:
        """|xi| on the full grid, FFT order."""
        axes = np.meshgrid(*(self.freq_axis(),) * self.n, indexing="ij", sparse=True)
        return np.sqrt(sum(a**2 for a in axes))

    @classmethod
    def default(cls, n: int) -> "Grid":
        # sized so every standard run finishes in seconds while keeping
        # frequency resolution 1/L fine enough for the oscillatory symbols
        table = {1: (4096, 64.0), 2: (256, 32.0), 3: (64, 16.0)}
        if n not in table:
            raise ValueError(f"no default grid for dimension {n}")
        pts, ext = table[n]
        return cls(n, pts, ext)


@dataclass(frozen=True, eq=False)
class Field:
    """Samples of a function on a Grid, tagged physical or spectral."""

    grid: Grid
    samples: np.ndarray
    domain_tag: str = PHYSICAL

    def __post_init__(self):
        _check_tag(self.domain_tag)
        arr = np.asarray(self.samples, dtype=np.complex128)
        if arr.shape != self.grid.shape:
            raise ValueError(f"samples shape {arr.shape} != grid shape {self.grid.shape}")
        object.__setattr__(self, "samples", arr)

    @property
    def cell_volume(self) -> float:
        cell = self.grid.cell_volume
        return cell if self.domain_tag == PHYSICAL else self.grid.freq_spacing**self.grid.n


@dataclass(frozen=True)
class SpacetimeGrid:
    """Product of a spatial Grid and one temporal axis (also periodic)."""

    space: Grid
    t_points: int
    t_extent: float

    def __post_init__(self):
        p = self.t_points
        if not isinstance(p, (int, np.integer)) or p < 2 or (p & (p - 1)):
            raise ValueError(f"time points must be a power of two >= 2, got {p}")
        if not (np.isfinite(self.t_extent) and self.t_extent > 0):
            raise ValueError(f"time extent must be > 0, got {self.t_extent}")
        object.__setattr__(self, "t_points", int(p))
        object.__setattr__(self, "t_extent", float(self.t_extent))

    @property
    def t_spacing(self) -> float:
        return self.t_extent / self.t_points

    @property
    def shape(self) -> tuple:
        return self.space.shape + (self.t_points,)

    @property
    def cell_volume(self) -> float:
        return self.space.cell_volume * self.t_spacing

    def t_axis(self) -> np.ndarray:
        return (np.arange(self.t_points) - self.t_points // 2) * self.t_spacing

    def t_freq_axis(self) -> np.ndarray:
        return np.fft.fftfreq(self.t_points, self.t_spacing)

    @classmethod
    def default(cls, n: int = 1) -> "SpacetimeGrid":
        # the n+1 dimensional product is kept coarser than Grid.default(n):
        # operator runs touch the full spacetime volume per radial node
        table = {1: (512, 64.0, 512, 64.0), 2: (128, 32.0, 128, 32.0)}
        if n not in table:
            raise ValueError(f"no default spacetime grid for dimension {n}")
        pts, ext, tp, te = table[n]
        return cls(Grid(n, pts, ext), tp, te)


@dataclass(frozen=True, eq=False)
class SpacetimeField:
    """Samples of a function of (x, t) on a SpacetimeGrid."""

    grid: SpacetimeGrid
    samples: np.ndarray
    domain_tag: str = PHYSICAL

    def __post_init__(self):
        _check_tag(self.domain_tag)
        arr = np.asarray(self.samples, dtype=np.complex128)
        if arr.shape != self.grid.shape:
            raise ValueError(f"samples shape {arr.shape} != grid shape {self.grid.shape}")
        object.__setattr__(self, "samples", arr)

    @property
    def cell_volume(self) -> float:
        if self.domain_tag == PHYSICAL:
            return self.grid.cell_volume
        g = self.grid
        return g.space.freq_spacing**g.space.n / g.t_extent


def _axis_spacings(f) -> tuple:
    if isinstance(f, Field):
        return (f.grid.spacing,) * f.grid.n
    return (f.grid.space.spacing,) * f.grid.space.n + (f.grid.t_spacing,)


def forward_axes(samples: np.ndarray, axes, spacings) -> np.ndarray:
    """Continuum-normalized DFT over a subset of axes (centered -> FFT order)."""
    axes = tuple(axes)
    scale = math.prod(float(s) for s in spacings)
    return np.fft.fftn(np.fft.ifftshift(samples, axes=axes), axes=axes) * scale


def inverse_axes(samples: np.ndarray, axes, spacings) -> np.ndarray:
    """Exact inverse of forward_axes over the same axes."""
    axes = tuple(axes)
    scale = math.prod(float(s) for s in spacings)
    return np.fft.fftshift(np.fft.ifftn(samples, axes=axes), axes=axes) / scale


def fourier_transform(f):
    """Physical -> spectral over every axis; exact inverse of inverse_transform."""
    if f.domain_tag != PHYSICAL:
        raise DomainTagError("fourier_transform expects a physical-domain field")
    spacings = _axis_spacings(f)
    out = forward_axes(f.samples, range(f.samples.ndim), spacings)
    return type(f)(f.grid, out, SPECTRAL)


def inverse_transform(f):
    """Spectral -> physical over every axis."""
    if f.domain_tag != SPECTRAL:
        raise DomainTagError("inverse_transform expects a spectral-domain field")
    spacings = _axis_spacings(f)
    out = inverse_axes(f.samples, range(f.samples.ndim), spacings)
    return type(f)(f.grid, out, PHYSICAL)


def convolve_omega(f: Field, spec: KernelSpec, r: float) -> Field:
    """Convolve a spatial field with the kernel dilated by r > 0.

    Computed spectrally: multiply the transform by the exact profile at
    r * |xi| and come back.  The output integral equals fhat(0) times the
    kernel mass, for every r, because the dilation is mass-preserving.
    """
    if not isinstance(f, Field):
        raise TypeError("convolve_omega acts on spatial fields")
    if f.domain_tag != PHYSICAL:
        raise DomainTagError("convolve_omega expects a physical-domain field")
    r = float(r)
    if not (np.isfinite(r) and r > 0):
        raise ValueError(f"dilation parameter must be > 0, got {r}")
    if spec.n != f.grid.n:
        raise ValueError(f"kernel dimension {spec.n} != grid dimension {f.grid.n}")
    mult = omega_hat(r * f.grid.freq_radius(), spec)
    spacings = _axis_spacings(f)
    spec_samples = forward_axes(f.samples, range(f.grid.n), spacings)
    out = inverse_axes(spec_samples * mult, range(f.grid.n), spacings)
    return Field(f.grid, out, PHYSICAL)


def _is_dyadic(delta: float):
    """Return the integer log2 of delta when delta is an exact power of two."""
    m, e = math.frexp(delta)
    return e - 1 if m == 0.5 else None


_SUPPORT_RTOL = 1e-12  # amplitude floor defining numerical support
_TAIL_BUDGET = 1e-9  # spectral energy fraction allowed beyond the target band


def _axis_meta(f):
    """(points, spacing, extent) per axis, space axes first."""
    if isinstance(f, Field):
        g = f.grid
        return [(g.points, g.spacing, g.extent)] * g.n
    g = f.grid
    meta = [(g.space.points, g.space.spacing, g.space.extent)] * g.space.n
    meta.append((g.t_points, g.t_spacing, g.t_extent))
    return meta


def _support_halfwidth(samples: np.ndarray, axis: int, spacing: float) -> float:
    mags = np.abs(samples)
    peak = mags.max()
    if peak == 0.0:
        return 0.0
    other = tuple(i for i in range(samples.ndim) if i != axis)
    profile = mags.max(axis=other) if other else mags
    n = profile.size
    idx = np.nonzero(profile > _SUPPORT_RTOL * peak)[0]
    return float(np.max(np.abs(idx - n // 2))) * spacing


def _dilate_axis_stretch(spec_arr: np.ndarray, axis: int, m: int) -> np.ndarray:
    # exact even-index gather: G[j] = m * F[m j] for representable m*j,
    # zero where m*j leaves the band (the input's own tail there is ~0)
    n = spec_arr.shape[axis]
    signed = np.fft.fftfreq(n, 1.0 / n).astype(int)
    target = signed * m
    ok = (target >= -(n // 2)) & (target <= n // 2 - 1)
    src = np.where(ok, target % n, 0)
    out = np.take(spec_arr, src, axis=axis) * float(m)
    shape = [1] * spec_arr.ndim
    shape[axis] = n
    return out * ok.reshape(shape)


def _dilate_axis_shrink(phys_arr: np.ndarray, axis: int, m: int) -> np.ndarray:
    # f(x/delta) = f(m x): exact physical gather at stride m
    n = phys_arr.shape[axis]
    c = n // 2
    target = c + (np.arange(n) - c) * m
    ok = (target >= 0) & (target < n)
    src = np.where(ok, target, 0)
    out = np.take(phys_arr, src, axis=axis)
    shape = [1] * phys_arr.ndim
    shape[axis] = n
    return out * ok.reshape(shape)


def _dilate_axis_nudft(spec_arr: np.ndarray, axis: int, points: int,
                       spacing: float, extent: float, delta: float) -> np.ndarray:
    # band-limited synthesis of the trig interpolant at x_k / delta;
    # rows falling outside the fundamental domain are zeroed, not wrapped
    x = (np.arange(points) - points // 2) * spacing
    y = x / delta
    xi = np.fft.fftfreq(points, spacing)
    basis = np.exp(2j * np.pi * np.outer(y, xi)) / extent
    basis[np.abs(y) > extent / 2.0] = 0.0
    moved = np.moveaxis(spec_arr, axis, 0)
    out = np.tensordot(basis, moved, axes=(1, 0))
    return np.moveaxis(out, 0, axis)


def dilate_field(f, delta: float):
    """Resample to f(. / delta), isotropically over every axis.

    delta a power of two is an exact index remapping (spectral gather for
    stretches, physical gather for shrinks); any other delta goes through
    band-limited interpolation.  Raises AliasingError when a stretch would
    push support past the box or a shrink needs frequencies past Nyquist.
    """
    if f.domain_tag != PHYSICAL:
        raise DomainTagError("dilate_field expects a physical-domain field")
    delta = float(delta)
    if not (np.isfinite(delta) and delta > 0):
        raise ValueError(f"dilation factor must be > 0, got {delta}")
    if delta == 1.0:
        return type(f)(f.grid, f.samples.copy(), PHYSICAL)

    meta = _axis_meta(f)
    spacings = [m[1] for m in meta]
    ndim = f.samples.ndim

    if delta > 1.0:
        for ax, (pts, sp, ext) in enumerate(meta):
            half = _support_halfwidth(f.samples, ax, sp)
            if half * delta >= ext / 2.0:
                raise AliasingError(
                    f"support half-width {half:g} on axis {ax} leaves the box "
                    f"[-{ext / 2:g}, {ext / 2:g}) after stretching by {delta:g}"
                )
    spec_arr = forward_axes(f.samples, range(ndim), spacings)
    if delta < 1.0:
        total = float(np.sum(np.abs(spec_arr) ** 2))
        if total > 0.0:
            for ax, (pts, sp, ext) in enumerate(meta):
                xi = np.fft.fftfreq(pts, sp)
                band = np.abs(xi) <= delta * pts / (2.0 * ext)
                shape = [1] * ndim
                shape[ax] = pts
                tail = float(np.sum(np.abs(spec_arr * ~band.reshape(shape)) ** 2))
                if tail > _TAIL_BUDGET * total:
                    raise AliasingError(
                        f"shrink by {delta:g} needs frequencies beyond "
                        f"{delta:g} x Nyquist on axis {ax} "
                        f"(tail fraction {tail / total:.2e})"
                    )

    k = _is_dyadic(delta)
    if k is not None and k > 0:
        out = spec_arr
        for ax in range(ndim):
            out = _dilate_axis_stretch(out, ax, 2**k)
        out = inverse_axes(out, range(ndim), spacings)
    elif k is not None:
        out = f.samples
        for ax in range(ndim):
            out = _dilate_axis_shrink(out, ax, 2**-k)
    else:
        out = spec_arr
        for ax, (pts, sp, ext) in enumerate(meta):
            out = _dilate_axis_nudft(out, ax, pts, sp, ext, delta)
    return type(f)(f.grid, out, PHYSICAL)


def slice_at_time(f: SpacetimeField, t: float) -> Field:
    """Spatial Field extracted at the time sample nearest to t."""
    if not isinstance(f, SpacetimeField):
        raise TypeError("slice_at_time acts on spacetime fields")
    if f.domain_tag != PHYSICAL:
        raise DomainTagError("slice_at_time expects a physical-domain field")
    g = f.grid
    idx = int(round(t / g.t_spacing)) + g.t_points // 2
    if not 0 <= idx < g.t_points:
        raise ValueError(f"time {t:g} outside [{-g.t_extent / 2:g}, {g.t_extent / 2:g})")
    return Field(g.space, f.samples[..., idx], PHYSICAL)


# ---------------------------------------------------------------------------
# import/export: flat little-endian float64 pairs (re, im) + JSON sidecar


def _sidecar_path(path) -> str:
    return str(path) + ".json"


def save_field(f, path) -> None:
    """Write samples as interleaved little-endian float64 plus a sidecar.

    The sidecar is the authority on shape and domain; spacetime fields
    extend the base schema with their time axis under kind "spacetime".
    """
    arr = np.ascontiguousarray(f.samples)
    inter = np.empty(2 * arr.size, dtype="<f8")
    inter[0::2] = arr.real.ravel()
    inter[1::2] = arr.imag.ravel()
    with open(path, "wb") as fh:
        fh.write(inter.tobytes())

    if isinstance(f, Field):
        meta = {
            "kind": "field",
            "n": f.grid.n,
            "N": f.grid.points,
            "L": f.grid.extent,
            "domain_tag": f.domain_tag,
            "version": _FORMAT_VERSION,
        }
    else:
        meta = {
            "kind": "spacetime",
            "n": f.grid.space.n,
            "N": f.grid.space.points,
            "L": f.grid.space.extent,
            "N_t": f.grid.t_points,
            "L_t": f.grid.t_extent,
            "domain_tag": f.domain_tag,
            "version": _FORMAT_VERSION,
        }
    with open(_sidecar_path(path), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_field(path):
    """Read a field written by save_field; dispatches on the sidecar kind."""
    try:
        with open(_sidecar_path(path)) as fh:
            meta = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FieldFormatError(f"cannot read sidecar for {path}: {exc}") from exc

    kind = meta.get("kind", "field")
    try:
        if kind == "field":
            grid = Grid(int(meta["n"]), int(meta["N"]), float(meta["L"]))
            shape = grid.shape
            tag = _check_tag(meta["domain_tag"])
        elif kind == "spacetime":
            grid = SpacetimeGrid(
                Grid(int(meta["n"]), int(meta["N"]), float(meta["L"])),
                int(meta["N_t"]),
                float(meta["L_t"]),
            )
            shape = grid.shape
            tag = _check_tag(meta["domain_tag"])
        else:
            raise FieldFormatError(f"unknown field kind {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise FieldFormatError(f"bad sidecar for {path}: {exc}") from exc

    count = int(np.prod(shape))
    raw = np.fromfile(path, dtype="<f8")
    if raw.size != 2 * count:
        raise FieldFormatError(
            f"{path}: expected {2 * count} floats for shape {shape}, found {raw.size}"
        )
    samples = (raw[0::2] + 1j * raw[1::2]).reshape(shape)
    if kind == "field":
        return Field(grid, samples, tag)
    return SpacetimeField(grid, samples, tag)


def export_csv_1d(f: Field, path) -> None:
    """CSV of a one-dimensional field: coordinate, re, im."""
    if not isinstance(f, Field) or f.grid.n != 1:
        raise ValueError("CSV export handles one-dimensional spatial fields")
    coord = f.grid.axis() if f.domain_tag == PHYSICAL else f.grid.freq_axis()
    name = "x" if f.domain_tag == PHYSICAL else "xi"
    with open(path, "w") as fh:
        fh.write(f"{name},re,im\n")
        for c, v in zip(coord, f.samples):
            fh.write(f"{float(c)!r},{float(v.real)!r},{float(v.imag)!r}\n")

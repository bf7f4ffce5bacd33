"""Test-function families used by the ratio experiments.

Three deliberate probe types: dilated Gaussians (scaling behavior),
modulated Gaussians (frequency localization), and cone-adapted plates,
smoothed slabs around |x| = |t|, aimed at the light-cone singularity that
drives the sharp exponent range.  Everything is generated analytically on
the grid, so a "dilated" member is an exact resampling, not an
interpolation of a base member.
"""

from __future__ import annotations

import numpy as np

from .fields import Field, Grid, SpacetimeField, SpacetimeGrid

__all__ = [
    "gaussian",
    "gaussian_spacetime",
    "wave_packet",
    "cone_plate",
    "pure_tone",
    "delta_like",
    "random_bumps",
    "standard_ensemble",
]


def gaussian(grid: Grid, width: float = 1.0, center: float = 0.0) -> Field:
    """exp(-pi |x - c|^2 / width^2), unit peak."""
    if not width > 0.0:
        raise ValueError(f"width must be > 0, got {width}")
    r2 = sum((a - center) ** 2 for a in np.meshgrid(
        *(grid.axis(),) * grid.n, indexing="ij", sparse=True))
    return Field(grid, np.exp(-np.pi * r2 / width**2))


def gaussian_spacetime(grid: SpacetimeGrid, width: float = 1.0) -> SpacetimeField:
    """exp(-pi (|x|^2 + t^2) / width^2): the isotropic reference input."""
    if not width > 0.0:
        raise ValueError(f"width must be > 0, got {width}")
    r2 = grid.space.radius() ** 2
    t2 = grid.t_axis() ** 2
    samples = np.exp(-np.pi * (r2[..., None] + t2) / width**2)
    return SpacetimeField(grid, samples)


def wave_packet(grid: SpacetimeGrid, width: float = 1.0,
                k_x: float = 1.0, k_t: float = 0.0) -> SpacetimeField:
    """Gaussian envelope modulated to sit near frequency (k_x, ..., k_x, k_t)."""
    base = gaussian_spacetime(grid, width)
    x_sum = sum(np.meshgrid(*(grid.space.axis(),) * grid.space.n,
                            indexing="ij", sparse=True))
    t = grid.t_axis()
    phase = np.exp(2j * np.pi * (k_x * x_sum[..., None] + k_t * t))
    return SpacetimeField(grid, base.samples * phase)


def cone_plate(grid: SpacetimeGrid, thickness: float = 1.0,
               t_span: float = 6.0, softness: float = 0.15) -> SpacetimeField:
    """Smoothed slab around the cone |x| = |t|, cut off at |t| = t_span.

    tanh edges on both the distance to the cone and the temporal cutoff;
    softness is the edge width relative to the governing scale.  The
    temporal cutoff keeps the plate well inside the box so shifted copies
    do not wrap.
    """
    if not (thickness > 0.0 and t_span > 0.0 and softness > 0.0):
        raise ValueError("thickness, t_span, softness must all be > 0")
    r = grid.space.radius()[..., None]
    t = np.abs(grid.t_axis())
    dist = np.abs(r - t)
    across = 0.5 * (1.0 + np.tanh((thickness / 2.0 - dist) / (softness * thickness)))
    along = 0.5 * (1.0 + np.tanh((t_span - t) / (softness * t_span)))
    return SpacetimeField(grid, across * along)


def pure_tone(grid: Grid, index: int) -> Field:
    """exp(2 pi i k x_1 / L): an exact grid frequency, one per integer index."""
    k = int(index)
    if not -(grid.points // 2) <= k < grid.points // 2:
        raise ValueError(f"tone index {k} not representable on {grid.points} points")
    x1 = grid.axis()
    phase = np.exp(2j * np.pi * k * x1 / grid.extent)
    shape = [1] * grid.n
    shape[0] = grid.points
    return Field(grid, np.broadcast_to(phase.reshape(shape), grid.shape).copy())


def delta_like(grid: Grid) -> Field:
    """Unit-mass single-sample spike at the origin: value 1/cell volume."""
    samples = np.zeros(grid.shape, dtype=np.complex128)
    samples[(grid.points // 2,) * grid.n] = 1.0 / grid.cell_volume
    return Field(grid, samples)


def random_bumps(grid: Grid, count: int, rng: np.random.Generator,
                 width_range=(0.5, 2.0), center_range=None) -> list:
    """Nonnegative random Gaussian bumps on a one-dimensional grid.

    Centers stay inside the middle half of the box by default so that
    potentials and norms are not contaminated by the periodic seam.
    """
    if grid.n != 1:
        raise ValueError("random_bumps generates one-dimensional fields")
    if center_range is None:
        center_range = (-grid.extent / 4.0, grid.extent / 4.0)
    out = []
    for _ in range(int(count)):
        width = float(rng.uniform(*width_range))
        center = float(rng.uniform(*center_range))
        amp = float(rng.uniform(0.5, 2.0))
        x = grid.axis()
        out.append(Field(grid, amp * np.exp(-np.pi * (x - center) ** 2 / width**2)))
    return out


def standard_ensemble(grid: SpacetimeGrid, widths=(0.5, 1.0, 2.0),
                      packet_freqs=(0.5, 1.0, 2.0),
                      plate_thicknesses=(0.75, 1.5)) -> tuple:
    """The three-family probe set: (fields, labels)."""
    fields, labels = [], []
    for w in widths:
        fields.append(gaussian_spacetime(grid, w))
        labels.append(f"gaussian-w{w:g}")
    for k in packet_freqs:
        fields.append(wave_packet(grid, 1.0, k_x=k))
        labels.append(f"packet-kx{k:g}")
        fields.append(wave_packet(grid, 1.0, k_x=0.0, k_t=k))
        labels.append(f"packet-kt{k:g}")
    for th in plate_thicknesses:
        fields.append(cone_plate(grid, th))
        labels.append(f"cone-plate-th{th:g}")
    return fields, labels

"""Grid-backed measures on boxes in R^d.

A measure is a piecewise-constant density on a uniform grid over a bounded
box.  Cube masses integrate the density exactly against the cube, including
partial cell overlap, so mass queries are free of discretization noise at
cube boundaries.  Mass outside the box is zero; cubes may extend past it.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np

from . import _kernels
from .errors import InvalidInputError

if TYPE_CHECKING:
    from .geometry import Cube


@dataclass(frozen=True, eq=False)
class GridMeasure:
    """Nonnegative piecewise-constant density on a uniform grid.

    density has shape ``cells`` (row-major); entries are mass per unit
    volume.  Instances are immutable: the density array is locked after
    construction and every query is read-only.
    """

    box_lo: tuple[float, ...]
    box_hi: tuple[float, ...]
    cells: tuple[int, ...]
    density: np.ndarray

    def __post_init__(self):
        lo = tuple(float(x) for x in self.box_lo)
        hi = tuple(float(x) for x in self.box_hi)
        cells = tuple(int(k) for k in self.cells)
        d = len(lo)
        if d not in (1, 2, 3):
            raise InvalidInputError(f"dimension must be 1, 2 or 3, got {d}")
        if len(hi) != d or len(cells) != d:
            raise InvalidInputError("box_lo, box_hi and cells must have equal length")
        if not all(math.isfinite(x) for x in lo + hi):
            raise InvalidInputError("box coordinates must be finite")
        if not all(l < h for l, h in zip(lo, hi)):
            raise InvalidInputError("box_lo must be strictly below box_hi on every axis")
        if not all(k > 0 for k in cells):
            raise InvalidInputError("cells_per_axis must be positive")
        dens = np.ascontiguousarray(np.asarray(self.density, dtype=np.float64))
        if dens.shape != cells:
            raise InvalidInputError(f"density shape {dens.shape} does not match cells {cells}")
        if not np.all(np.isfinite(dens)):
            raise InvalidInputError("density values must be finite")
        if np.any(dens < 0.0):
            raise InvalidInputError("density values must be nonnegative")
        dens.flags.writeable = False
        object.__setattr__(self, "box_lo", lo)
        object.__setattr__(self, "box_hi", hi)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "density", dens)

    @property
    def dimension(self) -> int:
        return len(self.box_lo)

    @cached_property
    def widths(self) -> tuple[float, ...]:
        return tuple((h - l) / k for l, h, k in zip(self.box_lo, self.box_hi, self.cells))

    @cached_property
    def resolution(self) -> float:
        """Minimum admissible cube side: one grid cell width."""
        return max(self.widths)

    @cached_property
    def cell_volume(self) -> float:
        return math.prod(self.widths)

    @cached_property
    def total_mass(self) -> float:
        return float(self.density.sum()) * self.cell_volume

    @cached_property
    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(repr((self.box_lo, self.box_hi, self.cells)).encode())
        digest.update(self.density.tobytes())
        return digest.hexdigest()[:16]

    def axis_centers(self, axis: int) -> np.ndarray:
        lo, h = self.box_lo[axis], self.widths[axis]
        return lo + h * (np.arange(self.cells[axis]) + 0.5)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "box": [list(self.box_lo), list(self.box_hi)],
            "cells": list(self.cells),
            "density": self.density.ravel().tolist(),
        }


@dataclass(frozen=True)
class DoublingConfig:
    """Parameter pack for the doubling machinery.

    beta must exceed alpha**d so contraction searches can succeed, and eta
    must lie in (1, alpha].
    """

    d: int
    n: float
    alpha: float
    beta: float
    eta: float
    c0: float | None = None

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise InvalidInputError(f"d must be 1, 2 or 3, got {self.d}")
        if not 0.0 < self.n <= self.d:
            raise InvalidInputError(f"growth exponent n must lie in (0, d], got {self.n}")
        if not self.alpha > 1.0:
            raise InvalidInputError("alpha must exceed 1")
        if not self.beta > self.alpha**self.d:
            raise InvalidInputError(
                f"beta must exceed alpha^d = {self.alpha ** self.d}, got {self.beta}"
            )
        if not 1.0 < self.eta <= self.alpha:
            raise InvalidInputError(f"eta must lie in (1, alpha], got {self.eta}")
        if self.c0 is not None and not self.c0 >= 0.0:
            raise InvalidInputError("c0 must be nonnegative when given")

    @classmethod
    def default(cls, d: int = 1) -> "DoublingConfig":
        return cls(d=d, n=float(d), alpha=2.0, beta=2.5 * 2.0**d, eta=1.5)


def _cube_interval(q) -> tuple[tuple[float, ...], tuple[float, ...]]:
    center = q.center
    side = q.side
    if not (math.isfinite(side) and side > 0.0):
        raise InvalidInputError(f"cube side must be positive and finite, got {side}")
    if not all(math.isfinite(c) for c in center):
        raise InvalidInputError("cube center must be finite")
    half = side / 2.0
    return tuple(c - half for c in center), tuple(c + half for c in center)


def measure_of_cube(m: GridMeasure, q: "Cube") -> float:
    """Exact mass of a closed cube: per-cell density times overlap volume."""
    a, b = _cube_interval(q)
    if len(a) != m.dimension:
        raise InvalidInputError(
            f"cube dimension {len(a)} does not match measure dimension {m.dimension}"
        )
    return _kernels.overlap_sum(m.density, m.box_lo, m.widths, a, b)


def integrate_abs_deviation(m: GridMeasure, values: np.ndarray, q: "Cube", shift: float) -> float:
    """Integral of |f - shift| over the cube against the measure."""
    a, b = _cube_interval(q)
    return _kernels.absdev_sum(values, m.density, float(shift), m.box_lo, m.widths, a, b)


def integrate_centered(m: GridMeasure, values: np.ndarray, q: "Cube", pivot: float) -> float:
    """Integral of (f - pivot) over the cube against the measure."""
    a, b = _cube_interval(q)
    return _kernels.centered_sum(values, m.density, float(pivot), m.box_lo, m.widths, a, b)


def cell_index_of(m: GridMeasure, point) -> tuple[int, ...]:
    """Grid index of the cell containing a point, clamped into the grid."""
    idx = []
    for x, lo, h, k in zip(point, m.box_lo, m.widths, m.cells):
        i = int(math.floor((x - lo) / h))
        idx.append(min(max(i, 0), k - 1))
    return tuple(idx)


def estimate_growth_constant(m: GridMeasure, cfg: DoublingConfig, side_lengths, centers) -> float:
    """Largest observed mass-to-scale ratio mu(Q(x, l)) / l^n over the sample.

    A lower bound for the true growth constant restricted to scales at or
    above the grid resolution.
    """
    from .geometry import Cube

    sides = [float(s) for s in side_lengths]
    pts = [tuple(float(x) for x in c) for c in centers]
    if not sides or not pts:
        raise InvalidInputError("growth estimation needs nonempty side and center samples")
    for s in sides:
        if not s >= m.resolution:
            raise InvalidInputError(
                f"side {s} is below the grid resolution {m.resolution}"
            )
    for p in pts:
        if len(p) != m.dimension:
            raise InvalidInputError("center dimension mismatch")
        if not all(lo <= x <= hi for x, lo, hi in zip(p, m.box_lo, m.box_hi)):
            raise InvalidInputError(f"center {p} lies outside the box")
    best = 0.0
    for p in pts:
        for s in sides:
            ratio = measure_of_cube(m, Cube(p, s)) / s**cfg.n
            if ratio > best:
                best = ratio
    return best


# ----------------------------------------------------------------- presets

def _grids(box_lo, box_hi, cells):
    axes = [
        lo + (hi - lo) / k * (np.arange(k) + 0.5)
        for lo, hi, k in zip(box_lo, box_hi, cells)
    ]
    return np.meshgrid(*axes, indexing="ij")


def _preset_uniform(box_lo, box_hi, cells, level=1.0):
    if level < 0:
        raise InvalidInputError("uniform level must be nonnegative")
    return np.full(cells, float(level))


def _preset_exponential(box_lo, box_hi, cells, rate=1.0):
    grids = _grids(box_lo, box_hi, cells)
    return np.exp(-float(rate) * sum(grids))


def _preset_gaussian(box_lo, box_hi, cells, sigma=1.0, center=None):
    if center is None:
        center = [(l + h) / 2.0 for l, h in zip(box_lo, box_hi)]
    grids = _grids(box_lo, box_hi, cells)
    r2 = sum((g - c) ** 2 for g, c in zip(grids, center))
    return np.exp(-r2 / float(sigma) ** 2)


def _preset_power_spike(box_lo, box_hi, cells, exponent=0.5, center=None, floor=0.0):
    if exponent <= 0:
        raise InvalidInputError("power spike exponent must be positive")
    if center is None:
        center = [(l + h) / 2.0 for l, h in zip(box_lo, box_hi)]
    grids = _grids(box_lo, box_hi, cells)
    dist = np.maximum.reduce([np.abs(g - c) for g, c in zip(grids, center)])
    h_half = max((hi - lo) / k for lo, hi, k in zip(box_lo, box_hi, cells)) / 2.0
    return np.maximum(dist, h_half) ** (-float(exponent)) + float(floor)


def _preset_lacunary_blocks(box_lo, box_hi, cells, num_blocks=6, ratio=4.0,
                            base_level=1.0, background=0.0, anchor=None):
    """Slabs along axis 0 at geometrically shrinking scales.

    Block k occupies [anchor + span/2^(k+1), anchor + span/2^k) and carries
    total per-unit-cross-section mass base_level / ratio^k, so consecutive
    dyadic cubes around the anchor have mass ratio about ``ratio``.
    """
    if num_blocks < 1 or ratio <= 1.0:
        raise InvalidInputError("lacunary blocks need num_blocks >= 1 and ratio > 1")
    lo0, hi0 = box_lo[0], box_hi[0]
    if anchor is None:
        anchor = lo0
    span = (hi0 - lo0) / 2.0
    grids = _grids(box_lo, box_hi, cells)
    x = grids[0]
    dens = np.full(cells, float(background))
    for k in range(int(num_blocks)):
        left = anchor + span * 2.0 ** -(k + 1)
        right = anchor + span * 2.0**-k
        width = right - left
        level = float(base_level) * float(ratio) ** -k / width
        dens = np.where((x >= left) & (x < right), dens + level, dens)
    return dens


def _preset_spike(box_lo, box_hi, cells, center=None, mass=1.0, background=0.0):
    if center is None:
        center = [(l + h) / 2.0 for l, h in zip(box_lo, box_hi)]
    if mass < 0 or background < 0:
        raise InvalidInputError("spike mass and background must be nonnegative")
    dens = np.full(cells, float(background))
    widths = [(h - l) / k for l, h, k in zip(box_lo, box_hi, cells)]
    idx = tuple(
        min(max(int(math.floor((c - lo) / h)), 0), k - 1)
        for c, lo, h, k in zip(center, box_lo, widths, cells)
    )
    dens[idx] += float(mass) / math.prod(widths)
    return dens


_PRESETS = {
    "uniform": _preset_uniform,
    "exponential": _preset_exponential,
    "gaussian": _preset_gaussian,
    "power_spike": _preset_power_spike,
    "lacunary_blocks": _preset_lacunary_blocks,
    "spike": _preset_spike,
}

_DEFAULT_SPAN = 8.0
_DEFAULT_CELLS_PER_AXIS = 512  # h = 1/64 over [0, 8]


def build_measure(spec: dict) -> GridMeasure:
    """Construct a measure from its JSON-shaped description.

    Either an explicit grid: {"dimension", "box", "cells", "density"} with a
    flat row-major density array, or a preset: {"preset", "params"}.
    """
    if not isinstance(spec, dict):
        raise InvalidInputError("measure spec must be a mapping")
    if "preset" in spec:
        name = spec["preset"]
        if name not in _PRESETS:
            raise InvalidInputError(
                f"unknown preset {name!r}; known: {sorted(_PRESETS)}"
            )
        params = dict(spec.get("params", {}))
        d = int(params.pop("dimension", 1))
        box = params.pop("box", [[0.0] * d, [_DEFAULT_SPAN] * d])
        box_lo, box_hi = [list(map(float, side)) for side in box]
        d = len(box_lo)
        cells = params.pop("cells", [_DEFAULT_CELLS_PER_AXIS] * d)
        cells = [int(k) for k in cells]
        density = _PRESETS[name](box_lo, box_hi, tuple(cells), **params)
        return GridMeasure(tuple(box_lo), tuple(box_hi), tuple(cells), density)
    if "density" in spec:
        d = int(spec.get("dimension", len(spec["box"][0])))
        box_lo, box_hi = [list(map(float, side)) for side in spec["box"]]
        cells = tuple(int(k) for k in spec["cells"])
        density = np.asarray(spec["density"], dtype=np.float64).reshape(cells)
        return GridMeasure(tuple(box_lo), tuple(box_hi), cells, density)
    raise InvalidInputError("measure spec needs either 'preset' or explicit 'density'")


def load_measure(path) -> GridMeasure:
    with open(path, "r", encoding="utf-8") as fh:
        return build_measure(json.load(fh))

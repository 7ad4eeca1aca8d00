"""Constructive point covering by centered cubes with bounded overlap.

Given a finite point set and one closed cube centered at each point, a
greedy largest-first sweep extracts a subfamily that still covers every
point while keeping the number of selected cubes through any single point
bounded by a constant depending only on the dimension.  The overlap bound
is certified on a finite probe set; for axis-parallel boxes the overlap
count is maximized at a vertex of the intersection arrangement, so probes
are the points themselves plus cube corners/centers plus the corners of
pairwise intersections.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .geometry import Cube

_PROBE_CHUNK = 4096


@dataclass(frozen=True)
class CoverInstance:
    """Finite point set with one cube assigned to (and centered at) each point."""

    points: tuple[tuple[float, ...], ...]
    cubes: tuple[Cube, ...]

    def __post_init__(self):
        points = tuple(tuple(float(x) for x in p) for p in self.points)
        cubes = tuple(self.cubes)
        if len(points) != len(cubes):
            raise InvalidInputError("points and cubes must pair up")
        for p, c in zip(points, cubes):
            if c.center != p:
                raise InvalidInputError(f"cube center {c.center} differs from its point {p}")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "cubes", cubes)

    @property
    def dimension(self) -> int:
        return len(self.points[0]) if self.points else 0

    def to_dict(self) -> dict:
        return {
            "points": [list(p) for p in self.points],
            "sides": [c.side for c in self.cubes],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CoverInstance":
        points = [tuple(p) for p in data["points"]]
        cubes = [Cube(p, s) for p, s in zip(points, data["sides"])]
        return cls(tuple(points), tuple(cubes))

    @classmethod
    def random(cls, d: int, count: int, seed: int, box_span: float = 4.0,
               side_range: tuple[float, float] = (0.1, 2.0)) -> "CoverInstance":
        rng = np.random.default_rng(np.random.SeedSequence((seed, d, count)))
        pts = rng.uniform(0.0, box_span, size=(count, d))
        sides = rng.uniform(side_range[0], side_range[1], size=count)
        points = tuple(tuple(float(x) for x in p) for p in pts)
        cubes = tuple(Cube(p, float(s)) for p, s in zip(points, sides))
        return cls(points, cubes)


@dataclass(frozen=True)
class CoverResult:
    selected_indices: tuple[int, ...]
    selected: tuple[Cube, ...]
    max_overlap: int
    overlap_histogram: tuple[tuple[int, int], ...]
    probe_count: int

    def to_dict(self) -> dict:
        return {
            "selected_indices": list(self.selected_indices),
            "selected": [c.to_dict() for c in self.selected],
            "max_overlap": self.max_overlap,
            "overlap_histogram": [list(pair) for pair in self.overlap_histogram],
            "probe_count": self.probe_count,
        }


def _greedy_select(points: np.ndarray, lows: np.ndarray, highs: np.ndarray,
                   sides: np.ndarray) -> list[int]:
    n, d = points.shape
    order = sorted(range(n), key=lambda i: (-sides[i], tuple(points[i])))
    sel_lo = np.empty((n, d))
    sel_hi = np.empty((n, d))
    chosen: list[int] = []
    for idx in order:
        p = points[idx]
        k = len(chosen)
        if k and bool(np.any(np.all((sel_lo[:k] <= p) & (p <= sel_hi[:k]), axis=1))):
            continue
        sel_lo[k] = lows[idx]
        sel_hi[k] = highs[idx]
        chosen.append(idx)
    return chosen


def _probe_points(points: np.ndarray, lows: np.ndarray, highs: np.ndarray) -> np.ndarray:
    d = points.shape[1]
    probes = [points]
    centers = (lows + highs) / 2.0
    probes.append(centers)
    corner_masks = list(itertools.product((0, 1), repeat=d))
    for mask in corner_masks:
        pick = np.where(np.array(mask, dtype=bool), highs, lows)
        probes.append(pick)
    # Corners of pairwise intersection boxes: overlap counts peak there.
    s = lows.shape[0]
    if s >= 2:
        ii, jj = np.triu_indices(s, k=1)
        lo_max = np.maximum(lows[ii], lows[jj])
        hi_min = np.minimum(highs[ii], highs[jj])
        hit = np.all(lo_max <= hi_min, axis=1)
        lo_max, hi_min = lo_max[hit], hi_min[hit]
        for mask in corner_masks:
            pick = np.where(np.array(mask, dtype=bool), hi_min, lo_max)
            probes.append(pick)
    stacked = np.concatenate(probes, axis=0)
    return np.unique(stacked, axis=0)


def besicovitch_cover(inst: CoverInstance) -> CoverResult:
    """Greedy largest-first extraction with certified bounded overlap.

    Cubes are visited in decreasing side order (ties by lexicographic
    center); a cube is selected when its center is not yet covered.  Every
    input point ends up covered: either its own cube was selected or its
    center was already inside an earlier selection.
    """
    if not inst.points:
        return CoverResult((), (), 0, (), 0)
    points = np.asarray(inst.points, dtype=np.float64)
    sides = np.asarray([c.side for c in inst.cubes])
    lows = np.asarray([c.lower() for c in inst.cubes])
    highs = np.asarray([c.upper() for c in inst.cubes])

    chosen = _greedy_select(points, lows, highs, sides)
    sel_lo, sel_hi = lows[chosen], highs[chosen]

    covered = np.zeros(len(points), dtype=bool)
    for lo, hi in zip(sel_lo, sel_hi):
        covered |= np.all((lo <= points) & (points <= hi), axis=1)
    if not covered.all():
        raise AssertionError("greedy selection failed to cover its input points")

    probes = _probe_points(points, sel_lo, sel_hi)
    counts = np.zeros(len(probes), dtype=np.int64)
    for start in range(0, len(probes), _PROBE_CHUNK):
        block = probes[start : start + _PROBE_CHUNK]
        inside = np.all(
            (sel_lo[None, :, :] <= block[:, None, :]) & (block[:, None, :] <= sel_hi[None, :, :]),
            axis=2,
        )
        counts[start : start + _PROBE_CHUNK] = inside.sum(axis=1)
    values, freq = np.unique(counts, return_counts=True)
    histogram = tuple((int(v), int(f)) for v, f in zip(values, freq))
    return CoverResult(
        selected_indices=tuple(chosen),
        selected=tuple(inst.cubes[i] for i in chosen),
        max_overlap=int(counts.max()) if len(counts) else 0,
        overlap_histogram=histogram,
        probe_count=int(len(probes)),
    )

"""Bundled measure and function presets for experiments and acceptance runs.

The measure zoo spans the doubling spectrum: uniform (every interior cube
doubles), smooth decay, a smooth bump, a polynomial spike (mass piles up at
one point) and lacunary blocks (geometric mass jumps between scales, the
genuinely non-doubling case).  Function presets are deterministic given
their parameters; seeded ones draw from their own named generator.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidInputError
from .measure import GridMeasure, build_measure
from .norms import GridFunction, function_from_dict

DEFAULT_BOX = [[0.0], [8.0]]
DEFAULT_CELLS = [512]


def measure_zoo(d: int = 1) -> list[tuple[str, GridMeasure]]:
    """Five bundled measures at the default desk-scale grid."""
    if d != 1:
        raise InvalidInputError("the bundled zoo is one-dimensional")
    box, cells = DEFAULT_BOX, DEFAULT_CELLS
    specs = [
        ("uniform", {"preset": "uniform", "params": {"box": box, "cells": cells, "level": 1.0}}),
        (
            "exponential",
            {"preset": "exponential", "params": {"box": box, "cells": cells, "rate": 0.75}},
        ),
        (
            "gaussian",
            {"preset": "gaussian", "params": {"box": box, "cells": cells, "sigma": 1.2, "center": [3.0]}},
        ),
        (
            "power_spike",
            {
                "preset": "power_spike",
                "params": {"box": box, "cells": cells, "exponent": 0.5, "center": [2.3], "floor": 0.02},
            },
        ),
        (
            "lacunary",
            {
                "preset": "lacunary_blocks",
                "params": {
                    "box": box,
                    "cells": cells,
                    "num_blocks": 7,
                    "ratio": 4.0,
                    "base_level": 1.0,
                    "background": 0.01,
                    "anchor": 0.5,
                },
            },
        ),
    ]
    return [(name, build_measure(spec)) for name, spec in specs]


# -------------------------------------------------------- function presets

def _coordinate_sum(m: GridMeasure) -> np.ndarray:
    grids = np.meshgrid(*[m.axis_centers(ax) for ax in range(m.dimension)], indexing="ij")
    return sum(grids)


def _axis0(m: GridMeasure) -> np.ndarray:
    grids = np.meshgrid(*[m.axis_centers(ax) for ax in range(m.dimension)], indexing="ij")
    return grids[0]


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((871, int(seed))))


def _f_constant(m, value=1.0):
    return np.full(m.cells, float(value))


def _f_half_step(m, low=-1.0, high=1.0):
    x = _axis0(m)
    mid = (m.box_lo[0] + m.box_hi[0]) / 2.0
    return np.where(x < mid, float(high), float(low))


def _f_blocks(m, values=(0.0, 1.0, -1.0, 2.0)):
    x = _axis0(m)
    lo, hi = m.box_lo[0], m.box_hi[0]
    edges = np.linspace(lo, hi, len(values) + 1)
    out = np.zeros(m.cells)
    for v, (a, b) in zip(values, zip(edges[:-1], edges[1:])):
        out = np.where((x >= a) & (x < b), float(v), out)
    return out


def _f_checkerboard(m, period_cells=8, amplitude=1.0):
    idx = np.indices(m.cells).sum(axis=0) // int(period_cells)
    return np.where(idx % 2 == 0, float(amplitude), -float(amplitude))


def _f_ramp(m, slope=1.0):
    return float(slope) * _coordinate_sum(m)


def _f_abs_ramp(m, slope=1.0):
    mid = sum((l + h) / 2.0 for l, h in zip(m.box_lo, m.box_hi))
    return float(slope) * np.abs(_coordinate_sum(m) - mid)


def _f_random_pm1(m, seed=0):
    return _rng(seed).choice([-1.0, 1.0], size=m.cells)


def _f_random_uniform(m, seed=0, low=-1.0, high=1.0):
    return _rng(seed).uniform(float(low), float(high), size=m.cells)


def _f_sparse_spikes(m, seed=0, fraction=0.05, amplitude=5.0):
    rng = _rng(seed)
    mask = rng.uniform(size=m.cells) < float(fraction)
    signs = rng.choice([-1.0, 1.0], size=m.cells)
    return np.where(mask, float(amplitude) * signs, 0.0)


def _f_indicator(m, lo=0.0, hi=1.0, inside=1.0, outside=0.0):
    x = _axis0(m)
    return np.where((x >= float(lo)) & (x < float(hi)), float(inside), float(outside))


def _f_log_profile(m, scale=1.0):
    x = _coordinate_sum(m)
    shifted = x - sum(m.box_lo) + 1.0
    return float(scale) * np.log(shifted)


def _f_sign_wave(m, waves=3.0):
    x = _axis0(m)
    lo, hi = m.box_lo[0], m.box_hi[0]
    phase = np.sin(2.0 * math.pi * float(waves) * (x - lo) / (hi - lo))
    return np.where(phase >= 0.0, 1.0, -1.0)


def _f_bump(m, center=None, width=1.0, amplitude=1.0):
    if center is None:
        center = [(l + h) / 2.0 for l, h in zip(m.box_lo, m.box_hi)]
    grids = np.meshgrid(*[m.axis_centers(ax) for ax in range(m.dimension)], indexing="ij")
    r2 = sum((g - c) ** 2 for g, c in zip(grids, center))
    return float(amplitude) * np.exp(-r2 / float(width) ** 2)


def _f_random_walk(m, seed=0, scale=0.25):
    rng = _rng(seed)
    steps = rng.choice([-1.0, 1.0], size=int(np.prod(m.cells)))
    return float(scale) * np.cumsum(steps).reshape(m.cells)


_FUNCTION_PRESETS = {
    "constant": _f_constant,
    "half_step": _f_half_step,
    "blocks": _f_blocks,
    "checkerboard": _f_checkerboard,
    "ramp": _f_ramp,
    "abs_ramp": _f_abs_ramp,
    "random_pm1": _f_random_pm1,
    "random_uniform": _f_random_uniform,
    "sparse_spikes": _f_sparse_spikes,
    "indicator": _f_indicator,
    "log_profile": _f_log_profile,
    "sign_wave": _f_sign_wave,
    "bump": _f_bump,
    "random_walk": _f_random_walk,
}


def build_function(m: GridMeasure, spec: dict) -> GridFunction:
    """Function from a JSON-shaped spec: {"values": [...]} or a preset."""
    if not isinstance(spec, dict):
        raise InvalidInputError("function spec must be a mapping")
    if "values" in spec:
        return function_from_dict(spec, m)
    if "preset" in spec:
        name = spec["preset"]
        if name not in _FUNCTION_PRESETS:
            raise InvalidInputError(
                f"unknown function preset {name!r}; known: {sorted(_FUNCTION_PRESETS)}"
            )
        params = dict(spec.get("params", {}))
        return GridFunction(_FUNCTION_PRESETS[name](m, **params))
    raise InvalidInputError("function spec needs 'values' or 'preset'")


def function_suite_specs() -> list[tuple[str, dict]]:
    """The bundled twenty-function suite used by the equivalence runs."""
    return [
        ("const_1", {"preset": "constant", "params": {"value": 1.0}}),
        ("const_neg", {"preset": "constant", "params": {"value": -2.5}}),
        ("half_step", {"preset": "half_step", "params": {}}),
        ("blocks4", {"preset": "blocks", "params": {"values": [0.0, 1.0, -1.0, 2.0]}}),
        ("checkerboard", {"preset": "checkerboard", "params": {"period_cells": 8}}),
        ("ramp", {"preset": "ramp", "params": {"slope": 0.5}}),
        ("abs_ramp", {"preset": "abs_ramp", "params": {"slope": 0.5}}),
        ("random_pm1_a", {"preset": "random_pm1", "params": {"seed": 101}}),
        ("random_pm1_b", {"preset": "random_pm1", "params": {"seed": 202}}),
        ("random_unif_sym", {"preset": "random_uniform", "params": {"seed": 303}}),
        ("random_unif_pos", {"preset": "random_uniform", "params": {"seed": 404, "low": 0.0, "high": 3.0}}),
        ("sparse_spikes", {"preset": "sparse_spikes", "params": {"seed": 505}}),
        ("indicator_unit", {"preset": "indicator", "params": {"lo": 0.0, "hi": 1.0}}),
        ("indicator_slab", {"preset": "indicator", "params": {"lo": 3.0, "hi": 3.25, "inside": 4.0}}),
        ("log_profile", {"preset": "log_profile", "params": {}}),
        ("sign_wave", {"preset": "sign_wave", "params": {"waves": 3.0}}),
        ("bump", {"preset": "bump", "params": {"width": 1.5, "amplitude": 2.0}}),
        ("blocks2", {"preset": "blocks", "params": {"values": [0.5, -1.5]}}),
        ("random_walk", {"preset": "random_walk", "params": {"seed": 707}}),
        ("step_times_wave", {"preset": "sign_wave", "params": {"waves": 7.0}}),
    ]


def function_suite(m: GridMeasure) -> list[tuple[str, GridFunction]]:
    return [(name, build_function(m, spec)) for name, spec in function_suite_specs()]

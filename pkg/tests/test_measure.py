"""Measure construction, mass queries and growth-constant estimation."""

import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscillometer import (
    Cube,
    DoublingConfig,
    GridMeasure,
    InvalidInputError,
    build_measure,
    estimate_growth_constant,
    load_measure,
    measure_of_cube,
)

from oracles import cube_mass, growth_max


class TestMeasureOfCube:
    def test_uniform_half_overlap(self, uniform_unit):
        # density 1 on [0,1], cube spans [0.25, 0.75]
        assert measure_of_cube(uniform_unit, Cube((0.5,), 0.5)) == pytest.approx(0.5, rel=1e-14)

    def test_disjoint_cube(self, uniform_unit):
        assert measure_of_cube(uniform_unit, Cube((10.0,), 2.0)) == 0.0

    def test_exponential_against_cell_sum_oracle(self, exp_8):
        q = Cube((1.0,), 2.0)
        got = measure_of_cube(exp_8, q)
        want = cube_mass(exp_8, q)
        assert got == pytest.approx(want, rel=1e-12)

    def test_nonfinite_center_rejected(self, uniform_unit):
        with pytest.raises(InvalidInputError):
            Cube((float("nan"),), 1.0)
        with pytest.raises(InvalidInputError):
            Cube((0.5,), float("inf"))

    def test_overhanging_cube_counts_inside_mass_only(self, uniform_unit):
        # cube [-0.5, 0.5]: only [0, 0.5] carries mass
        assert measure_of_cube(uniform_unit, Cube((0.0,), 1.0)) == pytest.approx(0.5, rel=1e-14)


class TestAdditivityAndMonotonicity:
    def split_children(self, q):
        d = q.dimension
        half = q.side / 4.0
        for signs in itertools.product((-1.0, 1.0), repeat=d):
            center = tuple(c + s * half for c, s in zip(q.center, signs))
            yield Cube(center, q.side / 2.0)

    @pytest.mark.parametrize("fixture", ["uniform_8", "exp_8", "uniform_2d"])
    def test_split_additivity(self, fixture, request):
        m = request.getfixturevalue(fixture)
        rng = np.random.default_rng(5)
        for _ in range(25):
            center = tuple(float(rng.uniform(l, h)) for l, h in zip(m.box_lo, m.box_hi))
            q = Cube(center, float(rng.uniform(0.1, 3.0)))
            parent = measure_of_cube(m, q)
            total = sum(measure_of_cube(m, child) for child in self.split_children(q))
            assert total == pytest.approx(parent, rel=1e-10, abs=1e-13)

    def test_nested_monotonicity(self, exp_8):
        rng = np.random.default_rng(11)
        for _ in range(50):
            center = tuple(float(rng.uniform(0, 8)) for _ in range(1))
            small = float(rng.uniform(0.05, 2.0))
            big = small * float(rng.uniform(1.0, 4.0))
            inner = measure_of_cube(exp_8, Cube(center, small))
            outer = measure_of_cube(exp_8, Cube(center, big))
            assert inner <= outer * (1 + 1e-12)

    @given(
        center=st.floats(min_value=0.0, max_value=8.0),
        side=st.floats(min_value=0.02, max_value=4.0),
        grow=st.floats(min_value=1.0, max_value=3.0),
    )
    @settings(max_examples=80, deadline=None)
    def test_monotone_property(self, center, side, grow):
        m = build_measure(
            {"preset": "gaussian", "params": {"box": [[0.0], [8.0]], "cells": [128]}}
        )
        inner = measure_of_cube(m, Cube((center,), side))
        outer = measure_of_cube(m, Cube((center,), side * grow))
        assert inner <= outer * (1 + 1e-12)


class TestGrowthConstant:
    def test_uniform_interior_is_one(self, uniform_8, cfg1d):
        centers = [(c,) for c in (2.0, 3.0, 4.0, 5.0, 6.0)]
        sides = [0.25, 0.5, 1.0, 2.0]
        got = estimate_growth_constant(uniform_8, cfg1d, sides, centers)
        assert got == pytest.approx(1.0, rel=1e-12)

    def test_zero_measure(self, cfg1d):
        m = build_measure(
            {"preset": "uniform", "params": {"box": [[0.0], [8.0]], "cells": [64], "level": 0.0}}
        )
        centers = [(4.0,)]
        assert estimate_growth_constant(m, cfg1d, [1.0], centers) == 0.0

    def test_gaussian_against_exhaustive_sweep(self):
        m = build_measure(
            {"preset": "gaussian", "params": {"box": [[-4.0], [4.0]], "cells": [64], "sigma": 1.0, "center": [0.0]}}
        )
        cfg = DoublingConfig(d=1, n=1.0, alpha=2.0, beta=5.0, eta=1.5)
        h = m.widths[0]
        centers = [(float(x),) for x in m.axis_centers(0)]
        sides = [h * j for j in range(1, 65)]
        got = estimate_growth_constant(m, cfg, sides, centers)
        want = growth_max(m, cfg.n, centers, sides)
        assert got == pytest.approx(want, rel=1e-10)

    def test_empty_sample_rejected(self, uniform_8, cfg1d):
        with pytest.raises(InvalidInputError):
            estimate_growth_constant(uniform_8, cfg1d, [], [(4.0,)])
        with pytest.raises(InvalidInputError):
            estimate_growth_constant(uniform_8, cfg1d, [1.0], [])

    def test_subresolution_side_rejected(self, uniform_8, cfg1d):
        with pytest.raises(InvalidInputError):
            estimate_growth_constant(uniform_8, cfg1d, [uniform_8.resolution / 2], [(4.0,)])

    def test_center_outside_box_rejected(self, uniform_8, cfg1d):
        with pytest.raises(InvalidInputError):
            estimate_growth_constant(uniform_8, cfg1d, [1.0], [(9.5,)])

    def test_growth_consistency(self, exp_8, cfg1d):
        centers = [(c,) for c in np.linspace(0.5, 7.5, 15)]
        sides = [0.25, 0.5, 1.0, 2.0]
        c0 = estimate_growth_constant(exp_8, cfg1d, sides, centers)
        for p in centers:
            for s in sides:
                ratio = measure_of_cube(exp_8, Cube(p, s)) / s**cfg1d.n
                assert ratio <= c0 * (1 + 1e-12)


class TestBuildMeasure:
    def test_uniform_total_mass(self):
        m = build_measure(
            {"preset": "uniform", "params": {"box": [[0.0], [1.0]], "cells": [64], "level": 1.0}}
        )
        assert m.total_mass == pytest.approx(1.0, rel=1e-14)

    def test_uniform_level_zero(self):
        m = build_measure(
            {"preset": "uniform", "params": {"box": [[0.0], [1.0]], "cells": [64], "level": 0.0}}
        )
        assert m.total_mass == 0.0

    def test_exponential_mass_matches_direct_sum(self, exp_8):
        h = exp_8.widths[0]
        want = sum(math.exp(-x) * h for x in exp_8.axis_centers(0))
        assert exp_8.total_mass == pytest.approx(want, rel=1e-12)

    def test_unknown_preset(self):
        with pytest.raises(InvalidInputError):
            build_measure({"preset": "nope", "params": {}})

    def test_negative_density_rejected(self):
        with pytest.raises(InvalidInputError):
            build_measure(
                {"dimension": 1, "box": [[0.0], [1.0]], "cells": [4], "density": [1.0, -0.5, 0.0, 2.0]}
            )

    def test_spike_preset_total(self):
        m = build_measure(
            {
                "preset": "spike",
                "params": {"box": [[0.0], [8.0]], "cells": [512], "center": [4.0], "mass": 2.0, "background": 0.0},
            }
        )
        assert m.total_mass == pytest.approx(2.0, rel=1e-12)

    def test_lacunary_block_masses_are_geometric(self):
        m = build_measure(
            {
                "preset": "lacunary_blocks",
                "params": {
                    "box": [[0.0], [8.0]],
                    "cells": [512],
                    "num_blocks": 5,
                    "ratio": 4.0,
                    "base_level": 1.0,
                    "background": 0.0,
                    "anchor": 0.5,
                },
            }
        )
        span = 4.0
        for k in range(5):
            left, right = 0.5 + span * 2.0 ** -(k + 1), 0.5 + span * 2.0**-k
            block = Cube(((left + right) / 2.0,), right - left)
            assert measure_of_cube(m, block) == pytest.approx(4.0**-k, rel=1e-10)

    def test_preset_determinism(self):
        spec = {"preset": "gaussian", "params": {"box": [[0.0], [8.0]], "cells": [128]}}
        a, b = build_measure(spec), build_measure(spec)
        assert a.fingerprint == b.fingerprint

    def test_explicit_grid_roundtrip(self, tmp_path):
        spec = {
            "dimension": 2,
            "box": [[0.0, 0.0], [1.0, 2.0]],
            "cells": [4, 8],
            "density": list(range(32)),
        }
        m = build_measure(spec)
        path = tmp_path / "measure.json"
        path.write_text(json.dumps(m.to_dict()))
        m2 = load_measure(path)
        assert m2.fingerprint == m.fingerprint
        assert m2.total_mass == pytest.approx(m.total_mass, rel=1e-15)

    def test_self_consistency_total_equals_box_query(self, exp_8):
        whole = Cube((4.0,), 8.0)
        assert measure_of_cube(exp_8, whole) == pytest.approx(exp_8.total_mass, rel=1e-12)

    def test_box_invariants(self):
        with pytest.raises(InvalidInputError):
            GridMeasure((1.0,), (0.0,), (4,), np.ones(4))
        with pytest.raises(InvalidInputError):
            GridMeasure((0.0,), (1.0,), (4,), np.full(4, float("nan")))


class TestDoublingConfig:
    def test_basic_assumption_enforced(self):
        with pytest.raises(InvalidInputError):
            DoublingConfig(d=1, n=1.0, alpha=2.0, beta=2.0, eta=1.5)  # beta <= alpha^d

    def test_eta_range_enforced(self):
        with pytest.raises(InvalidInputError):
            DoublingConfig(d=1, n=1.0, alpha=2.0, beta=5.0, eta=2.5)  # eta > alpha
        with pytest.raises(InvalidInputError):
            DoublingConfig(d=1, n=1.0, alpha=2.0, beta=5.0, eta=1.0)  # eta <= 1

    def test_default_satisfies_assumptions(self):
        for d in (1, 2):
            cfg = DoublingConfig.default(d)
            assert cfg.beta > cfg.alpha**d
            assert 1.0 < cfg.eta <= cfg.alpha

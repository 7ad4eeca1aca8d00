"""Kernel backends against the cell-loop oracle and each other."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oscillometer._kernels as kernels
from oscillometer import Cube, GridMeasure, measure_of_cube
from oscillometer._kernels import fallback

from oracles import cube_integral, cube_mass

try:
    from oscillometer._kernels import _overlap

    HAVE_COMPILED = True
except ImportError:
    HAVE_COMPILED = False


def random_measure(rng, d):
    cells = tuple(int(rng.integers(3, 12)) for _ in range(d))
    lo = tuple(float(rng.uniform(-2, 0)) for _ in range(d))
    hi = tuple(float(l + rng.uniform(0.5, 4.0)) for l in lo)
    density = rng.uniform(0.0, 3.0, size=cells)
    return GridMeasure(lo, hi, cells, density)


def random_cube(rng, m):
    center = tuple(float(rng.uniform(l - 1.0, h + 1.0)) for l, h in zip(m.box_lo, m.box_hi))
    side = float(rng.uniform(0.01, 5.0))
    return Cube(center, side)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_fallback_matches_oracle(d):
    rng = np.random.default_rng(7 + d)
    for _ in range(30):
        m = random_measure(rng, d)
        q = random_cube(rng, m)
        got = measure_of_cube(m, q)
        want = cube_mass(m, q)
        assert got == pytest.approx(want, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_absdev_and_centered_match_oracle(d):
    rng = np.random.default_rng(17 + d)
    for _ in range(20):
        m = random_measure(rng, d)
        q = random_cube(rng, m)
        values = rng.uniform(-2.0, 2.0, size=m.cells)
        shift = float(rng.uniform(-1.5, 1.5))
        a = tuple(c - q.side / 2 for c in q.center)
        b = tuple(c + q.side / 2 for c in q.center)
        got_abs = kernels.absdev_sum(values, m.density, shift, m.box_lo, m.widths, a, b)
        want_abs = cube_integral(m, values, q, lambda v: abs(v - shift))
        assert got_abs == pytest.approx(want_abs, rel=1e-12, abs=1e-14)
        got_cent = kernels.centered_sum(values, m.density, shift, m.box_lo, m.widths, a, b)
        want_cent = cube_integral(m, values, q, lambda v: v - shift)
        assert got_cent == pytest.approx(want_cent, rel=1e-10, abs=1e-12)


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled extension not built")
@pytest.mark.parametrize("d", [1, 2, 3])
def test_compiled_matches_fallback(d):
    rng = np.random.default_rng(29 + d)
    for _ in range(40):
        m = random_measure(rng, d)
        q = random_cube(rng, m)
        values = rng.uniform(-2.0, 2.0, size=m.cells)
        shift = float(rng.uniform(-1.0, 1.0))
        a = tuple(c - q.side / 2 for c in q.center)
        b = tuple(c + q.side / 2 for c in q.center)
        args = (m.box_lo, m.widths, a, b)
        assert _overlap.overlap_sum(m.density, *args) == pytest.approx(
            fallback.overlap_sum(m.density, *args), rel=1e-13, abs=1e-15
        )
        assert _overlap.absdev_sum(values, m.density, shift, *args) == pytest.approx(
            fallback.absdev_sum(values, m.density, shift, *args), rel=1e-13, abs=1e-15
        )
        assert _overlap.centered_sum(values, m.density, shift, *args) == pytest.approx(
            fallback.centered_sum(values, m.density, shift, *args), rel=1e-11, abs=1e-13
        )


@given(
    side=st.floats(min_value=1e-3, max_value=20.0),
    center=st.floats(min_value=-15.0, max_value=15.0),
    k=st.integers(min_value=1, max_value=40),
)
@settings(max_examples=120, deadline=None)
def test_overlap_never_exceeds_total(side, center, k):
    density = np.ones(k)
    m = GridMeasure((0.0,), (float(k) * 0.25, ), (k,), density)
    q = Cube((center,), side)
    mass = measure_of_cube(m, q)
    assert 0.0 <= mass <= m.total_mass * (1 + 1e-12)


def test_backend_selection_roundtrip():
    original = kernels.BACKEND
    kernels.select_backend("python")
    assert kernels.BACKEND == "python" and not kernels.USING_COMPILED
    if HAVE_COMPILED:
        kernels.select_backend("compiled")
        assert kernels.BACKEND == "compiled" and kernels.USING_COMPILED
    kernels.select_backend()
    assert kernels.BACKEND == original


def test_pure_python_env_override(monkeypatch):
    monkeypatch.setenv("OSCILLOMETER_PURE_PYTHON", "1")
    kernels.select_backend()
    assert kernels.BACKEND == "python"
    monkeypatch.delenv("OSCILLOMETER_PURE_PYTHON")
    kernels.select_backend()


def test_disjoint_cube_zero(uniform_unit):
    assert measure_of_cube(uniform_unit, Cube((5.0,), 1.0)) == 0.0

import numpy as np
import pytest

from oscillometer import Cube, DoublingConfig, GridMeasure, build_measure


@pytest.fixture(scope="session")
def cfg1d():
    return DoublingConfig.default(1)  # alpha=2, beta=5, eta=1.5, n=1


@pytest.fixture(scope="session")
def uniform_unit():
    """Uniform density 1 on [0, 1] at h = 1/64."""
    return build_measure(
        {"preset": "uniform", "params": {"box": [[0.0], [1.0]], "cells": [64], "level": 1.0}}
    )


@pytest.fixture(scope="session")
def uniform_8():
    """Uniform density 1 on [0, 8] at h = 1/64 (the default desk grid)."""
    return build_measure(
        {"preset": "uniform", "params": {"box": [[0.0], [8.0]], "cells": [512], "level": 1.0}}
    )


@pytest.fixture(scope="session")
def exp_8():
    """exp(-x) on [0, 8] at h = 1/64."""
    return build_measure(
        {"preset": "exponential", "params": {"box": [[0.0], [8.0]], "cells": [512], "rate": 1.0}}
    )


@pytest.fixture(scope="session")
def uniform_2d():
    return build_measure(
        {"preset": "uniform", "params": {"box": [[0.0, 0.0], [4.0, 4.0]], "cells": [64, 64], "level": 1.0}}
    )


@pytest.fixture(scope="session")
def quadratic_well():
    """Density (x - 4)^2 on [0, 8]: mass ratio ~8 per doubling around 4.

    Every concentric contraction centered at 4.0 stays non-doubling for
    beta = 5 all the way to the resolution floor.
    """
    cells = 512
    h = 8.0 / cells
    x = h * (np.arange(cells) + 0.5)
    return GridMeasure((0.0,), (8.0,), (cells,), (x - 4.0) ** 2)


def spike_in_uniform(center=4.0, mass=1.0, background=0.001):
    return build_measure(
        {
            "preset": "spike",
            "params": {
                "box": [[0.0], [8.0]],
                "cells": [512],
                "center": [center],
                "mass": mass,
                "background": background,
            },
        }
    )


@pytest.fixture(scope="session")
def spike_measure():
    return spike_in_uniform()


def interior_cube(center, side):
    return Cube((center,), side)

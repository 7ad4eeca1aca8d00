#!/usr/bin/env python3
"""Benchmark the compiled overlap kernels against the numpy fallback.

Measures the raw kernels on representative cube footprints and one
end-to-end estimator run with the backend swapped, since the overlap sums
dominate estimator runtime.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

import oscillometer._kernels as kernels
from oscillometer import DoublingConfig, GridFunction, build_measure, rbmo1_norm
from oscillometer._kernels import fallback
from oscillometer.norms import FamilyParams, sample_family

try:
    from oscillometer._kernels import _overlap

    BACKENDS = [("compiled", _overlap), ("python", fallback)]
except ImportError:
    print("compiled extension not built; benchmarking the fallback only\n")
    BACKENDS = [("python", fallback)]


def bench(fn, args_list, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for args in args_list:
            fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best / len(args_list)


def kernel_workloads():
    rng = np.random.default_rng(2024)
    cases = []
    for label, cells, n_cubes, side_range in [
        ("1d small cubes (512 cells)", (512,), 400, (0.05, 0.5)),
        ("1d large cubes (512 cells)", (512,), 400, (2.0, 6.0)),
        ("2d small cubes (256x256)", (256, 256), 200, (0.05, 0.5)),
        ("2d large cubes (256x256)", (256, 256), 200, (2.0, 6.0)),
    ]:
        d = len(cells)
        lo = (0.0,) * d
        h = tuple(8.0 / k for k in cells)
        density = rng.uniform(0.0, 2.0, size=cells)
        values = rng.uniform(-1.0, 1.0, size=cells)
        boxes = []
        for _ in range(n_cubes):
            center = rng.uniform(0.5, 7.5, size=d)
            side = float(rng.uniform(*side_range))
            a = tuple(float(c - side / 2) for c in center)
            b = tuple(float(c + side / 2) for c in center)
            boxes.append((a, b))
        cases.append((label, lo, h, density, values, boxes))
    return cases


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    print(f"{'workload':<42}", *(f"{name:>12}" for name, _ in BACKENDS), f"{'speedup':>9}")
    for label, lo, h, density, values, boxes in kernel_workloads():
        for op_name, make_args in [
            ("mass", lambda a, b: (density, lo, h, a, b)),
            ("absdev", lambda a, b: (values, density, 0.25, lo, h, a, b)),
        ]:
            times = []
            for name, mod in BACKENDS:
                fn = mod.overlap_sum if op_name == "mass" else mod.absdev_sum
                times.append(bench(fn, [make_args(a, b) for a, b in boxes], args.repeats))
            row = f"{label + ' / ' + op_name:<42}"
            for t in times:
                row += f"{t * 1e6:>10.2f}us"
            if len(times) == 2:
                row += f"{times[1] / times[0]:>8.1f}x"
            print(row)

    # end-to-end: one estimator evaluation with the backend swapped
    m = build_measure(
        {"preset": "exponential", "params": {"box": [[0.0], [8.0]], "cells": [512], "rate": 0.75}}
    )
    cfg = DoublingConfig.default(1)
    fam = sample_family(m, cfg, FamilyParams(seed=3))
    x = m.axis_centers(0)
    f = GridFunction(np.where(x < 4.0, 1.0, -1.0))
    print()
    times = []
    for name, _ in BACKENDS:
        kernels.select_backend("compiled" if name == "compiled" else "python")
        best = float("inf")
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            rbmo1_norm(m, f, fam, cfg)
            best = min(best, time.perf_counter() - t0)
        times.append(best)
        print(f"rbmo1 over {len(fam.records)} cubes / {len(fam.pairs)} pairs "
              f"[{name}]: {best * 1e3:.1f} ms")
    kernels.select_backend()
    if len(times) == 2:
        print(f"end-to-end speedup: {times[1] / times[0]:.1f}x")


if __name__ == "__main__":
    main()

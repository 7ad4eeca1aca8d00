"""Experiment front door: configuration, orchestration and report emission.

One JSON config document drives each subcommand.  Reports are written as
JSON (machine) plus CSV (plotting); writes are atomic (write-then-rename)
and byte-deterministic for a fixed config and seed.  Diagnostics go to
stderr.  Exit codes: 0 success, 1 hard invariant failure, 2 parse or
validation failure, 3 measure too pathological for the grid resolution
(more than half of the sampled centers inadmissible).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources

import jsonschema

from .covering import CoverInstance, besicovitch_cover
from .errors import InvalidInputError, OscillometerError
from .geometry import Cube, CubeChain, is_doubling
from .kcoeff import k_coefficient
from .measure import (
    DoublingConfig,
    GridMeasure,
    build_measure,
    estimate_growth_constant,
    load_measure,
    measure_of_cube,
)
from .norms import (
    ESTIMATOR_NAMES,
    LOCAL_ESTIMATORS,
    FamilyParams,
    compute_norm_report,
    sample_family,
)
from .zoo import build_function

EXIT_OK = 0
EXIT_HARD_FAILURE = 1
EXIT_CONFIG = 2
EXIT_PATHOLOGICAL = 3

_INADMISSIBLE_LIMIT = 0.5

_DEFAULT_ENVELOPES = {"ratio_max": 100.0, "noise_floor": 1e-9, "eta_ratio_max": 10.0}


def _thread_cap() -> int:
    raw = os.environ.get("OSCILLOMETER_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError as exc:
            raise InvalidInputError(f"OSCILLOMETER_THREADS must be an integer, got {raw!r}") from exc
    return min(4, os.cpu_count() or 1)


def _atomic_write(path: str, data: str):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _write_json(path: str, payload: dict):
    _atomic_write(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_csv(path: str, header: list[str], rows: list[list]):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
    _atomic_write(path, buf.getvalue())


def load_schema(name: str) -> dict:
    path = resources.files("oscillometer").joinpath("schemas").joinpath(name)
    with path.open("r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    jsonschema.validate(config, load_schema("config.schema.json"))
    return config


def _resolve_measure(spec: dict, base_dir: str) -> GridMeasure:
    if "file" in spec:
        return load_measure(os.path.join(base_dir, spec["file"]))
    return build_measure(spec)


def _resolve_function(spec: dict, m: GridMeasure, base_dir: str):
    if "file" in spec:
        with open(os.path.join(base_dir, spec["file"]), "r", encoding="utf-8") as fh:
            return build_function(m, json.load(fh))
    return build_function(m, spec)


def _doubling_config(config: dict) -> DoublingConfig:
    raw = config.get("doubling", {})
    d = int(raw.get("d", 1))
    return DoublingConfig(
        d=d,
        n=float(raw.get("n", d)),
        alpha=float(raw.get("alpha", 2.0)),
        beta=float(raw.get("beta", 2.5 * 2.0**d)),
        eta=float(raw.get("eta", 1.5)),
        c0=raw.get("c0"),
    )


def _family_params(config: dict, seed: int) -> FamilyParams:
    raw = dict(config.get("family", {}))
    raw["seed"] = seed
    return FamilyParams.from_dict(raw)


def _grid_centers(m: GridMeasure, count: int) -> list[tuple[float, ...]]:
    import numpy as np

    axes = [
        np.linspace(lo, hi, count + 2)[1:-1]
        for lo, hi in zip(m.box_lo, m.box_hi)
    ]
    grid = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grid], axis=1)
    return [tuple(float(x) for x in p) for p in pts]


def _centers_from(spec, m: GridMeasure) -> list[tuple[float, ...]]:
    if isinstance(spec, dict):
        return _grid_centers(m, int(spec["grid"]))
    return [tuple(float(x) for x in c) for c in spec]


def _family_or_exit(m, cfg, params):
    family = sample_family(m, cfg, params)
    attempted = len(family.records) + family.excluded_count
    if attempted and family.excluded_count / attempted > _INADMISSIBLE_LIMIT:
        print(
            f"error: {family.excluded_count}/{attempted} sampled cubes have "
            "inadmissible centers; measure too pathological for this resolution",
            file=sys.stderr,
        )
        raise SystemExit(EXIT_PATHOLOGICAL)
    return family


# ------------------------------------------------------------------ runs

def run_growth(config, seed, out_dir, base_dir):
    m = _resolve_measure(config["measure"], base_dir)
    cfg = _doubling_config(config)
    spec = config.get("growth", {})
    sides = [float(s) for s in spec.get("sides", [m.resolution * 2**j for j in range(0, 7)])]
    centers = _centers_from(spec.get("centers", {"grid": 16}), m)
    c0 = estimate_growth_constant(m, cfg, sides, centers)
    rows = []
    for p in centers:
        for s in sides:
            mass = measure_of_cube(m, Cube(p, s))
            rows.append(list(p) + [s, mass, mass / s**cfg.n])
    report = {
        "experiment": "growth",
        "seed": seed,
        "c0_hat": c0,
        "n": cfg.n,
        "sample_count": len(rows),
    }
    _write_json(os.path.join(out_dir, "growth_report.json"), report)
    axis_cols = [f"center_{i}" for i in range(m.dimension)]
    _write_csv(
        os.path.join(out_dir, "growth_samples.csv"),
        axis_cols + ["side", "mass", "ratio"],
        rows,
    )
    return EXIT_OK


def run_doubling_map(config, seed, out_dir, base_dir):
    m = _resolve_measure(config["measure"], base_dir)
    cfg = _doubling_config(config)
    spec = config.get("doubling_map", {})
    sides = [float(s) for s in spec.get("sides", [0.25, 0.5, 1.5, 3.0])]
    centers = _centers_from(spec.get("centers", {"grid": 8}), m)
    chain_spec = spec.get("chain", {"j_lo": -2, "j_hi": 2})
    rows = []
    cube_reports = []
    doubling_count = 0
    for p in centers:
        for s in sides:
            q = Cube(p, s)
            mass = measure_of_cube(m, q)
            alpha_mass = measure_of_cube(m, q.scaled(cfg.alpha))
            flag = alpha_mass <= cfg.beta * mass
            doubling_count += bool(flag)
            ratio = alpha_mass / mass if mass > 0 else float("inf") if alpha_mass > 0 else 1.0
            rows.append(list(p) + [s, mass, alpha_mass, ratio, int(flag)])
            chain = CubeChain(q, int(chain_spec["j_lo"]), int(chain_spec["j_hi"]), cfg.alpha)
            chain_rows = []
            for j, member in chain:
                if member.side < m.resolution:
                    continue
                chain_rows.append(
                    [j, member.side, measure_of_cube(m, member), int(is_doubling(m, member, cfg))]
                )
            cube_reports.append(
                {"center": list(p), "side": s, "doubling": bool(flag), "chain": chain_rows}
            )
    report = {
        "experiment": "doubling-map",
        "seed": seed,
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "cube_count": len(rows),
        "doubling_fraction": doubling_count / len(rows) if rows else 0.0,
        "cubes": cube_reports,
    }
    _write_json(os.path.join(out_dir, "doubling_map_report.json"), report)
    axis_cols = [f"center_{i}" for i in range(m.dimension)]
    _write_csv(
        os.path.join(out_dir, "doubling_map.csv"),
        axis_cols + ["side", "mass", "alpha_mass", "ratio", "doubling"],
        rows,
    )
    return EXIT_OK


def run_kcoeff(config, seed, out_dir, base_dir):
    m = _resolve_measure(config["measure"], base_dir)
    cfg = _doubling_config(config)
    spec = config.get("kcoeff", {})
    pairs = []
    if "pairs" in spec:
        for item in spec["pairs"]:
            pairs.append((Cube.from_dict(item["q"]), Cube.from_dict(item["r"])))
    else:
        import numpy as np

        rnd = spec.get("random", {"count": 32})
        rng = np.random.default_rng(np.random.SeedSequence((seed, 13)))
        span = min(h - l for l, h in zip(m.box_lo, m.box_hi))
        for _ in range(int(rnd.get("count", 32))):
            side = float(rng.uniform(2 * m.resolution, span / 8))
            steps = int(rng.integers(0, 5))
            center = tuple(
                float(rng.uniform(lo + span / 4, hi - span / 4))
                for lo, hi in zip(m.box_lo, m.box_hi)
            )
            pairs.append((Cube(center, side), Cube(center, side * 2.0**steps)))
    results = []
    rows = []
    for q, r in pairs:
        res = k_coefficient(m, q, r, cfg)
        results.append({"q": q.to_dict(), "r": r.to_dict(), **res.to_dict()})
        rows.append(
            list(q.center) + [q.side] + list(r.center) + [r.side, res.steps, res.value]
        )
    report = {"experiment": "kcoeff", "seed": seed, "n": cfg.n, "pairs": results}
    _write_json(os.path.join(out_dir, "kcoeff_report.json"), report)
    d = m.dimension
    header = (
        [f"q_center_{i}" for i in range(d)] + ["q_side"]
        + [f"r_center_{i}" for i in range(d)] + ["r_side", "steps", "value"]
    )
    _write_csv(os.path.join(out_dir, "kcoeff_pairs.csv"), header, rows)
    return EXIT_OK


def run_cover(config, seed, out_dir, base_dir):
    spec = config.get("cover", {})
    instances = []
    if "points" in spec:
        points = [tuple(float(x) for x in p) for p in spec["points"]]
        cubes = [Cube(p, float(s)) for p, s in zip(points, spec["sides"])]
        instances.append(("explicit", CoverInstance(tuple(points), tuple(cubes))))
    else:
        rnd = spec["random"]
        for inst_seed in rnd.get("seeds", [seed]):
            instances.append(
                (
                    f"seed{inst_seed}",
                    CoverInstance.random(
                        d=int(rnd.get("dimension", 1)),
                        count=int(rnd["count"]),
                        seed=int(inst_seed),
                        box_span=float(rnd.get("box_span", 4.0)),
                        side_range=tuple(rnd.get("side_range", (0.1, 2.0))),
                    ),
                )
            )
    results = []
    histogram_rows = []
    for name, inst in instances:
        res = besicovitch_cover(inst)
        results.append(
            {
                "name": name,
                "points": len(inst.points),
                "selected": len(res.selected),
                "max_overlap": res.max_overlap,
                "probe_count": res.probe_count,
                "overlap_histogram": [list(p) for p in res.overlap_histogram],
            }
        )
        for overlap, freq in res.overlap_histogram:
            histogram_rows.append([name, len(inst.points), overlap, freq])
    report = {"experiment": "cover", "seed": seed, "instances": results}
    _write_json(os.path.join(out_dir, "cover_report.json"), report)
    _write_csv(
        os.path.join(out_dir, "cover_histograms.csv"),
        ["instance", "points", "overlap", "probes"],
        histogram_rows,
    )
    return EXIT_OK


def _report_payload(report):
    return report.to_dict(include_witness=True)


def run_norms(config, seed, out_dir, base_dir):
    m = _resolve_measure(config["measure"], base_dir)
    cfg = _doubling_config(config)
    f = _resolve_function(config["function"], m, base_dir)
    family = _family_or_exit(m, cfg, _family_params(config, seed))
    classical = config.get("classical", {})
    report = compute_norm_report(
        m,
        f,
        family,
        cfg,
        classical_mode=classical.get("mode", "all-large"),
        classical_k=classical.get("k", 2.0),
    )
    payload = {"experiment": "norms", "seed": seed, "report": _report_payload(report)}
    _write_json(os.path.join(out_dir, "norm_report.json"), payload)
    rows = []
    for name in ESTIMATOR_NAMES:
        entry = report.entries[name]
        if entry is None:
            rows.append([name, "", "", "", "", ""])
            continue
        rows.append(
            [
                name,
                entry.estimate,
                entry.kind,
                entry.suprema.get("oscillation", 0.0),
                entry.suprema.get("pairs", 0.0),
                entry.suprema.get("absolute", 0.0),
            ]
        )
    _write_csv(
        os.path.join(out_dir, "norm_summary.csv"),
        ["definition", "estimate", "kind", "sup_oscillation", "sup_pairs", "sup_absolute"],
        rows,
    )
    return EXIT_OK


def _batch_reports(config, seed, base_dir, cfg):
    """Evaluate every (measure, function) pair; parallel across functions."""
    measures = []
    for i, mspec in enumerate(config["measures"]):
        name = mspec.get("name", f"measure{i}")
        measures.append((name, _resolve_measure(mspec, base_dir)))
    jobs = []
    for mname, m in measures:
        family = _family_or_exit(m, cfg, _family_params(config, seed))
        functions = [
            (fspec.get("name", f"f{j}"), _resolve_function(fspec, m, base_dir))
            for j, fspec in enumerate(config["functions"])
        ]
        for fname, f in functions:
            jobs.append((mname, fname, m, f, family))
    workers = _thread_cap()

    def evaluate(job):
        mname, fname, m, f, family = job
        return mname, fname, compute_norm_report(m, f, family, cfg)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, jobs))
    else:
        results = [evaluate(job) for job in jobs]
    return results


def _ratio_aggregate(values):
    return {
        "min": min(values),
        "median": statistics.median(values),
        "max": max(values),
        "count": len(values),
    }


def run_equivalence(config, seed, out_dir, base_dir):
    if len(config.get("functions", [])) < 2 or len(config.get("measures", [])) < 1:
        raise InvalidInputError("equivalence needs at least 2 functions and 1 measure")
    cfg = _doubling_config(config)
    envelopes = {**_DEFAULT_ENVELOPES, **config.get("envelopes", {})}
    floor = envelopes["noise_floor"]
    ratio_max = envelopes["ratio_max"]
    results = _batch_reports(config, seed, base_dir, cfg)

    instances = []
    rows = []
    ratios: dict[str, list[float]] = {}
    violations = []
    hard_failures = []
    for mname, fname, report in results:
        est = {name: report.estimate(name) for name in ESTIMATOR_NAMES}
        instances.append({"measure": mname, "function": fname, "estimates": est})
        rows.append([mname, fname] + [est[name] if est[name] is not None else "" for name in ESTIMATOR_NAMES])
        r1, ry = est["rbmo1"], est["rbmo_yang"]
        if r1 > ry * (1.0 + 1e-12):
            hard_failures.append(
                {"measure": mname, "function": fname, "rbmo1": r1, "rbmo_yang": ry}
            )
        for i, a in enumerate(LOCAL_ESTIMATORS):
            for b in LOCAL_ESTIMATORS[i + 1 :]:
                ea, eb = est[a], est[b]
                if ea > floor and eb > floor:
                    key = f"{a}/{b}"
                    value = ea / eb
                    ratios.setdefault(key, []).append(value)
                    if not (1.0 / ratio_max <= value <= ratio_max):
                        violations.append(
                            {"measure": mname, "function": fname, "pair": key, "ratio": value}
                        )
        if ry > floor:
            ratios.setdefault("rbmo_global/rbmo_yang", []).append(est["rbmo_global"] / ry)
    aggregates = {key: _ratio_aggregate(vals) for key, vals in sorted(ratios.items())}
    report = {
        "experiment": "equivalence",
        "seed": seed,
        "envelopes": envelopes,
        "instances": instances,
        "ratio_aggregates": aggregates,
        "violations": violations,
        "hard_failures": hard_failures,
    }
    _write_json(os.path.join(out_dir, "equivalence_report.json"), report)
    _write_csv(
        os.path.join(out_dir, "equivalence_instances.csv"),
        ["measure", "function"] + list(ESTIMATOR_NAMES),
        rows,
    )
    _write_csv(
        os.path.join(out_dir, "equivalence_ratios.csv"),
        ["pair", "min", "median", "max", "count"],
        [
            [key, agg["min"], agg["median"], agg["max"], agg["count"]]
            for key, agg in sorted(aggregates.items())
        ],
    )
    if hard_failures:
        print(
            f"error: {len(hard_failures)} instances violate the exact dominance "
            "rbmo1 <= rbmo_yang",
            file=sys.stderr,
        )
        return EXIT_HARD_FAILURE
    return EXIT_OK


def run_eta_sweep(config, seed, out_dir, base_dir):
    etas = config.get("eta_values", [1.5, 2.0])
    if len(etas) != 2:
        raise InvalidInputError("eta sweep needs exactly two eta values")
    envelopes = {**_DEFAULT_ENVELOPES, **config.get("envelopes", {})}
    floor = envelopes["noise_floor"]
    base = _doubling_config(config)
    cfg_pair = [
        DoublingConfig(d=base.d, n=base.n, alpha=base.alpha, beta=base.beta, eta=float(e))
        for e in etas
    ]
    if "functions" not in config:
        config = {**config, "functions": [config["function"]]}
    if "measures" not in config:
        config = {**config, "measures": [config["measure"]]}
    runs = [_batch_reports(config, seed, base_dir, cfg) for cfg in cfg_pair]
    instances = []
    rows = []
    ranges: dict[str, dict] = {}
    for (mname, fname, rep_a), (_, _, rep_b) in zip(*runs):
        per_def = {}
        for name in ESTIMATOR_NAMES:
            ea, eb = rep_a.estimate(name), rep_b.estimate(name)
            if ea is None or eb is None:
                continue
            ratio = ea / eb if ea > floor and eb > floor else None
            per_def[name] = {"eta_low": ea, "eta_high": eb, "ratio": ratio}
            rows.append([mname, fname, name, ea, eb, "" if ratio is None else ratio])
            if ratio is not None:
                agg = ranges.setdefault(name, {"min": ratio, "max": ratio})
                agg["min"] = min(agg["min"], ratio)
                agg["max"] = max(agg["max"], ratio)
        instances.append({"measure": mname, "function": fname, "definitions": per_def})
    report = {
        "experiment": "eta-sweep",
        "seed": seed,
        "eta_values": [float(e) for e in etas],
        "envelopes": envelopes,
        "instances": instances,
        "ratio_ranges": ranges,
    }
    _write_json(os.path.join(out_dir, "eta_sweep_report.json"), report)
    _write_csv(
        os.path.join(out_dir, "eta_sweep.csv"),
        ["measure", "function", "definition", "estimate_eta_low", "estimate_eta_high", "ratio"],
        rows,
    )
    return EXIT_OK


_RUNNERS = {
    "growth": run_growth,
    "doubling-map": run_doubling_map,
    "kcoeff": run_kcoeff,
    "cover": run_cover,
    "norms": run_norms,
    "equivalence": run_equivalence,
    "eta-sweep": run_eta_sweep,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="oscillometer",
        description="Deterministic cube-family experiments on grid measures",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config document")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="output directory")
    args = parser.parse_args(argv)

    try:
        config = _load_config(args.config)
    except (OSError, json.JSONDecodeError, jsonschema.ValidationError) as exc:
        print(f"error: cannot load config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    declared = config.get("experiment")
    if declared is not None and declared != args.command:
        print(
            f"error: config declares experiment {declared!r} but {args.command!r} was invoked",
            file=sys.stderr,
        )
        return EXIT_CONFIG

    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    out_dir = args.out or config.get("out", "reports")
    base_dir = os.path.dirname(os.path.abspath(args.config))
    try:
        code = _RUNNERS[args.command](config, seed, out_dir, base_dir)
    except SystemExit as exc:
        return int(exc.code)
    except OscillometerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: bad config: {exc!r}", file=sys.stderr)
        return EXIT_CONFIG
    return code


if __name__ == "__main__":
    sys.exit(main())

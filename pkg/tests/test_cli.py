"""CLI orchestration: exit codes, determinism, schema-valid reports."""

import json
import os

import jsonschema
import numpy as np
import pytest

from oscillometer.cli import load_schema, main

from oracles import k_oracle

BOX = [[0.0], [8.0]]
CELLS = [512]
DOUBLING = {"d": 1, "n": 1.0, "alpha": 2.0, "beta": 5.0, "eta": 1.5}
FAMILY = {
    "centers_per_axis": 5,
    "jitter": 0.3,
    "base_side": 0.4,
    "ladder_lo": -2,
    "ladder_hi": 2,
    "chain_offsets": [1],
    "offcenter_pairs": 1,
    "refine": 1,
}
UNIFORM = {"name": "uniform", "preset": "uniform", "params": {"box": BOX, "cells": CELLS, "level": 1.0}}


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload, indent=2))
    return str(path)


def read_json(out_dir, name):
    with open(os.path.join(out_dir, name), "r", encoding="utf-8") as fh:
        return json.load(fh)


class TestNorms:
    def norms_config(self, tmp_path, function=None):
        return write_config(
            tmp_path,
            "norms.json",
            {
                "experiment": "norms",
                "seed": 42,
                "doubling": DOUBLING,
                "family": FAMILY,
                "measure": UNIFORM,
                "function": function or {"preset": "half_step", "params": {}},
            },
        )

    def test_zero_function_all_zero(self, tmp_path):
        cfg = self.norms_config(tmp_path, {"preset": "constant", "params": {"value": 0.0}})
        out = str(tmp_path / "out")
        assert main(["norms", "--config", cfg, "--out", out]) == 0
        report = read_json(out, "norm_report.json")
        jsonschema.validate(report, load_schema("norm_report.schema.json"))
        for entry in report["report"]["entries"].values():
            assert entry["estimate"] == 0.0

    def test_byte_identical_reruns(self, tmp_path):
        cfg = self.norms_config(tmp_path)
        out_a, out_b = str(tmp_path / "a"), str(tmp_path / "b")
        assert main(["norms", "--config", cfg, "--out", out_a]) == 0
        assert main(["norms", "--config", cfg, "--out", out_b]) == 0
        for name in ("norm_report.json", "norm_summary.csv"):
            with open(os.path.join(out_a, name), "rb") as fa, open(
                os.path.join(out_b, name), "rb"
            ) as fb:
                assert fa.read() == fb.read()

    def test_seed_override_changes_family(self, tmp_path):
        cfg = self.norms_config(tmp_path)
        out_a, out_b = str(tmp_path / "a"), str(tmp_path / "b")
        assert main(["norms", "--config", cfg, "--out", out_a]) == 0
        assert main(["norms", "--config", cfg, "--out", out_b, "--seed", "7"]) == 0
        a = read_json(out_a, "norm_report.json")
        b = read_json(out_b, "norm_report.json")
        assert a["seed"] != b["seed"]
        assert a["report"]["family"]["seed"] != b["report"]["family"]["seed"]

    def test_pathological_measure_exits_three(self, tmp_path):
        cells = 512
        h = 8.0 / cells
        x = h * (np.arange(cells) + 0.5)
        density = ((x - 4.0) ** 2).tolist()
        cfg = write_config(
            tmp_path,
            "bad.json",
            {
                "experiment": "norms",
                "seed": 1,
                "doubling": DOUBLING,
                "family": {
                    "centers_per_axis": 1,
                    "jitter": 0.0,
                    "base_side": 1.5,
                    "ladder_lo": 0,
                    "ladder_hi": 2,
                    "chain_offsets": [1],
                    "offcenter_pairs": 0,
                    "refine": 1,
                },
                "measure": {"dimension": 1, "box": BOX, "cells": [cells], "density": density},
                "function": {"preset": "constant", "params": {"value": 1.0}},
            },
        )
        assert main(["norms", "--config", cfg, "--out", str(tmp_path / "out")]) == 3


class TestConfigErrors:
    def test_unparseable_config(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["norms", "--config", str(path)]) == 2

    def test_schema_violation(self, tmp_path):
        cfg = write_config(tmp_path, "bad.json", {"seed": -1})
        assert main(["norms", "--config", cfg]) == 2

    def test_experiment_mismatch(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "mismatch.json",
            {"experiment": "growth", "measure": UNIFORM, "function": {"preset": "half_step"}},
        )
        assert main(["norms", "--config", cfg]) == 2

    def test_missing_required_section(self, tmp_path):
        cfg = write_config(tmp_path, "nofun.json", {"experiment": "norms", "measure": UNIFORM})
        assert main(["norms", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_bad_thread_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("OSCILLOMETER_THREADS", "many")
        cfg = write_config(
            tmp_path,
            "eq.json",
            {
                "experiment": "equivalence",
                "doubling": DOUBLING,
                "family": FAMILY,
                "measures": [UNIFORM],
                "functions": [
                    {"preset": "constant", "params": {"value": 1.0}},
                    {"preset": "half_step", "params": {}},
                ],
            },
        )
        assert main(["equivalence", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


class TestGrowth:
    def test_zero_measure_gives_zero(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "growth.json",
            {
                "experiment": "growth",
                "doubling": DOUBLING,
                "measure": {"preset": "uniform", "params": {"box": BOX, "cells": CELLS, "level": 0.0}},
                "growth": {"sides": [0.5, 1.0], "centers": {"grid": 8}},
            },
        )
        out = str(tmp_path / "out")
        assert main(["growth", "--config", cfg, "--out", out]) == 0
        report = read_json(out, "growth_report.json")
        jsonschema.validate(report, load_schema("growth_report.schema.json"))
        assert report["c0_hat"] == 0.0


class TestDoublingMap:
    def test_uniform_interior_fully_doubling(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "map.json",
            {
                "experiment": "doubling-map",
                "doubling": DOUBLING,
                "measure": UNIFORM,
                "doubling_map": {"sides": [0.25, 0.5, 1.5], "centers": {"grid": 6}},
            },
        )
        out = str(tmp_path / "out")
        assert main(["doubling-map", "--config", cfg, "--out", out]) == 0
        report = read_json(out, "doubling_map_report.json")
        jsonschema.validate(report, load_schema("doubling_map_report.schema.json"))
        assert report["doubling_fraction"] == 1.0


class TestKcoeff:
    def test_bundled_pairs_match_oracle(self, tmp_path, exp_8, cfg1d):
        pairs = [
            {"q": {"center": [4.0], "side": 0.25}, "r": {"center": [4.0], "side": 2.0}},
            {"q": {"center": [6.0], "side": 0.125}, "r": {"center": [6.0], "side": 0.125}},
        ]
        cfg = write_config(
            tmp_path,
            "k.json",
            {
                "experiment": "kcoeff",
                "doubling": DOUBLING,
                "measure": {"preset": "exponential", "params": {"box": BOX, "cells": CELLS, "rate": 1.0}},
                "kcoeff": {"pairs": pairs},
            },
        )
        out = str(tmp_path / "out")
        assert main(["kcoeff", "--config", cfg, "--out", out]) == 0
        report = read_json(out, "kcoeff_report.json")
        jsonschema.validate(report, load_schema("kcoeff_report.schema.json"))
        from oscillometer import Cube

        for item in report["pairs"]:
            q = Cube(tuple(item["q"]["center"]), item["q"]["side"])
            r = Cube(tuple(item["r"]["center"]), item["r"]["side"])
            want, want_steps = k_oracle(exp_8, q, r, cfg1d.n)
            assert item["value"] == pytest.approx(want, rel=1e-10)
            assert item["steps"] == want_steps


class TestCover:
    def test_random_instances(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "cover.json",
            {
                "experiment": "cover",
                "cover": {
                    "random": {"dimension": 1, "count": 50, "seeds": [1, 2], "side_range": [0.1, 2.0]}
                },
            },
        )
        out = str(tmp_path / "out")
        assert main(["cover", "--config", cfg, "--out", out]) == 0
        report = read_json(out, "cover_report.json")
        jsonschema.validate(report, load_schema("cover_report.schema.json"))
        for inst in report["instances"]:
            assert inst["max_overlap"] <= 2


class TestEquivalence:
    def equivalence_config(self, tmp_path, **kw):
        payload = {
            "experiment": "equivalence",
            "seed": 42,
            "doubling": DOUBLING,
            "family": FAMILY,
            "measures": [UNIFORM],
            "functions": [
                {"name": "c1", "preset": "constant", "params": {"value": 1.0}},
                {"name": "c2", "preset": "constant", "params": {"value": -2.5}},
                {"name": "c3", "preset": "constant", "params": {"value": 0.5}},
            ],
        }
        payload.update(kw)
        return write_config(tmp_path, "eq.json", payload)

    def test_constant_batch(self, tmp_path):
        cfg = self.equivalence_config(tmp_path)
        out = str(tmp_path / "out")
        assert main(["equivalence", "--config", cfg, "--out", out]) == 0
        report = read_json(out, "equivalence_report.json")
        jsonschema.validate(report, load_schema("equivalence_report.schema.json"))
        assert report["hard_failures"] == []
        consts = {"c1": 1.0, "c2": -2.5, "c3": 0.5}
        scale = None
        for inst in report["instances"]:
            est = inst["estimates"]
            assert est["rbmo_global"] == 0.0
            ratio = est["rbmo_yang"] / abs(consts[inst["function"]])
            if scale is None:
                scale = ratio
            assert ratio == pytest.approx(scale, rel=1e-12)

    def test_too_few_functions_rejected(self, tmp_path):
        cfg = self.equivalence_config(
            tmp_path, functions=[{"preset": "constant", "params": {"value": 1.0}}]
        )
        assert main(["equivalence", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_threaded_run_is_deterministic(self, tmp_path, monkeypatch):
        cfg = self.equivalence_config(tmp_path)
        out_a, out_b = str(tmp_path / "a"), str(tmp_path / "b")
        monkeypatch.setenv("OSCILLOMETER_THREADS", "1")
        assert main(["equivalence", "--config", cfg, "--out", out_a]) == 0
        monkeypatch.setenv("OSCILLOMETER_THREADS", "3")
        assert main(["equivalence", "--config", cfg, "--out", out_b]) == 0
        with open(os.path.join(out_a, "equivalence_report.json"), "rb") as fa, open(
            os.path.join(out_b, "equivalence_report.json"), "rb"
        ) as fb:
            assert fa.read() == fb.read()


class TestEtaSweep:
    def test_ratio_within_envelope(self, tmp_path):
        cfg = write_config(
            tmp_path,
            "eta.json",
            {
                "experiment": "eta-sweep",
                "seed": 42,
                "doubling": DOUBLING,
                "family": FAMILY,
                "measures": [UNIFORM],
                "functions": [
                    {"name": "step", "preset": "half_step", "params": {}},
                    {"name": "c1", "preset": "constant", "params": {"value": 1.0}},
                ],
                "eta_values": [1.5, 2.0],
            },
        )
        out = str(tmp_path / "out")
        assert main(["eta-sweep", "--config", cfg, "--out", out]) == 0
        report = read_json(out, "eta_sweep_report.json")
        jsonschema.validate(report, load_schema("eta_sweep_report.schema.json"))
        for name, rng in report["ratio_ranges"].items():
            assert 0.1 <= rng["min"] <= rng["max"] <= 10.0


class TestBundledConfigs:
    @pytest.mark.parametrize(
        "sub,cfg",
        [
            ("norms", "norms_uniform_step.json"),
            ("growth", "growth_exponential.json"),
            ("doubling-map", "doubling_map_uniform.json"),
            ("kcoeff", "kcoeff_nested.json"),
            ("cover", "cover_random_2d.json"),
            ("equivalence", "equivalence_suite.json"),
        ],
    )
    def test_bundled_config_runs(self, sub, cfg, tmp_path):
        path = os.path.join(os.path.dirname(__file__), "..", "configs", cfg)
        if not os.path.exists(path):
            pytest.skip("bundled configs not present")
        assert main([sub, "--config", path, "--out", str(tmp_path / "out")]) == 0

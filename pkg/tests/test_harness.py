import csv
import json
from dataclasses import fields
from pathlib import Path

import numpy as np
import pytest
import yaml

from dfrc.cli import main
from dfrc.config import DEFAULTS, ExperimentConfig, GridPoint
from dfrc.errors import ConfigError, EmptyInputError
from dfrc.harness import (
    COLUMNS,
    ResultRow,
    best_of_sweep,
    evaluate_point,
    read_rows,
    run_experiment,
    write_rows,
)
from dfrc.masking import MaskPattern
from dfrc.readout import ReadoutWeights, predict
from dfrc.reservoir import StateMatrix

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def small_cfg(tmp_path, **sections):
    data = {
        "task": {"name": "narma10", "length": 300},
        "reservoir": {"n_virtual": 20},
        "sweep": {"n_virtual": [10, 20], "tau_ph_ps": [25, 50]},
        "seeds": [0, 1],
        "output": {"dir": str(tmp_path / "out")},
    }
    for key, value in sections.items():
        data[key] = {**data.get(key, {}), **value} if isinstance(value, dict) else value
    return data


def write_cfg(tmp_path, data, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return path


def row(N, tau, metric, task="narma10"):
    return ResultRow(task, "silicon_mr", N, tau, 0.9, None, 0, metric, metric, 1.0, 1.0)


class TestBestOfSweep:
    def test_picks_minimum(self):
        rows = [row(10, 50.0, 0.5), row(20, 50.0, 0.3), row(40, 50.0, 0.4)]
        assert best_of_sweep(rows).N == 20

    def test_tie_breaks_on_n_then_tau(self):
        rows = [row(40, 25.0, 0.3), row(20, 50.0, 0.3), row(20, 25.0, 0.3)]
        best = best_of_sweep(rows)
        assert (best.N, best.tau_ph_ps) == (20, 25.0)

    def test_skips_failures(self):
        failed = row(5, 50.0, None)
        assert best_of_sweep([failed, row(10, 50.0, 0.9)]).N == 10
        with pytest.raises(EmptyInputError):
            best_of_sweep([failed])


def test_result_columns_match_row_fields():
    assert COLUMNS == [f.name for f in fields(ResultRow) if f.name != "error"]
    assert COLUMNS == ["task", "node_kind", "N", "tau_ph_ps", "gamma", "snr_db", "seed",
                       "train_metric", "test_metric", "train_time_s_model", "power_mw"]


def test_rows_roundtrip(tmp_path):
    rows = [row(10, 50.0, 0.25), ResultRow("channel_eq", "mzi", 30, None, 0.9, 12.0, 2, 0.1, 0.2, 3e-4, None)]
    write_rows(rows, tmp_path / "r.csv")
    assert read_rows(tmp_path / "r.csv") == rows


class TestConfig:
    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"reservoir": {"n_nodes": 3}})
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"task": {"name": "mnist"}})

    def test_grid_order_and_collapse(self, tmp_path):
        cfg = ExperimentConfig.from_dict(small_cfg(tmp_path))
        pts = cfg.grid()
        assert pts[:3] == [GridPoint(10, 25.0, None, 0), GridPoint(10, 25.0, None, 1),
                           GridPoint(10, 50.0, None, 0)]
        assert len(pts) == 8
        mzi = ExperimentConfig.from_dict(small_cfg(tmp_path, node={"kind": "mzi"}))
        assert {p.tau_ph_ps for p in mzi.grid()} == {None}
        assert cfg.grid(sweep=False) == [GridPoint(20, 50.0, None, 0), GridPoint(20, 50.0, None, 1)]

    def test_missing_santa_fe_file(self, tmp_path):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"task": {"name": "santa_fe", "path": "nope.txt"}}, tmp_path)

    def test_defaults_documented_keys(self):
        assert DEFAULTS["node"]["gamma"] == 0.9
        assert DEFAULTS["reservoir"]["n_virtual"] == 900

    @pytest.mark.parametrize("name", ["narma10_silicon_mr", "channel_eq_silicon_mr",
                                      "narma10_mackey_glass", "narma10_mzi", "narma10_literal_mr"])
    def test_shipped_configs_load(self, name):
        assert ExperimentConfig.load(CONFIGS / f"{name}.yaml").grid()


def test_completeness_and_failures(tmp_path):
    # undamped lag-tau update: the short photon lifetime point diverges, the long one does not
    data = small_cfg(tmp_path, task={"length": 2000},
                     node={"mr": {"symmetric_decay": False, "trailing_state": "tau"}})
    data["sweep"] = {"n_virtual": [10], "tau_ph_ps": [50, 200]}
    data["seeds"] = [0]
    cfg = ExperimentConfig.from_dict(data)
    rows = run_experiment(cfg)
    out = tmp_path / "out"
    with open(out / "results.csv") as fh:
        ok = list(csv.DictReader(fh))
    with open(out / "failures.csv") as fh:
        failed = list(csv.DictReader(fh))
    assert len(ok) + len(failed) == len(cfg.grid()) == len(rows)
    assert len(failed) == 1 and len(ok) == 1
    assert all("StateDivergenceError" in f["error"] for f in failed)
    for rec in ok:
        assert np.isfinite(float(rec["train_metric"])) and np.isfinite(float(rec["test_metric"]))
    assert (out / "run.log").read_text()


def test_all_grid_points_present(tmp_path):
    cfg = ExperimentConfig.from_dict(small_cfg(tmp_path))
    rows = run_experiment(cfg)
    assert all(r.ok for r in rows)
    got = [(r.N, r.tau_ph_ps, r.seed) for r in read_rows(tmp_path / "out" / "results.csv")]
    assert got == [(p.n_virtual, p.tau_ph_ps, p.seed) for p in cfg.grid()]


def test_artifacts_reproduce_metric(tmp_path):
    cfg = ExperimentConfig.from_dict(small_cfg(tmp_path, output={"save_artifacts": True}))
    point = cfg.grid()[0]
    r, _ = evaluate_point(cfg, point, tmp_path / "art")
    art = tmp_path / "art"
    meta = json.loads((art / "point.json").read_text())
    states = StateMatrix.from_csv(art / "states.csv").values
    w = ReadoutWeights.load(art / "weights.txt", meta["with_bias"])
    with open(art / "dataset.csv") as fh:
        next(fh)
        recs = list(csv.DictReader(fh))
    y = np.array([float(x["target"]) for x in recs])
    n = meta["train_len"]
    pred = predict(states[n:], w)
    nrmse = np.sqrt(np.mean((pred - y[n:]) ** 2) / y[n:].var())
    assert nrmse == pytest.approx(r.test_metric, rel=1e-12)
    assert len(MaskPattern.load(art / "mask.txt")) == point.n_virtual


def test_channel_eq_row(tmp_path):
    data = {"task": {"name": "channel_eq", "n_symbols": 900}, "reservoir": {"n_virtual": 30},
            "sweep": {"snr_db": [12, 32]}, "output": {"dir": str(tmp_path / "o")}}
    rows = run_experiment(ExperimentConfig.from_dict(data), write=False)
    assert [r.snr_db for r in rows] == [12.0, 32.0]
    assert all(0.0 <= r.test_metric <= 1.0 for r in rows)
    assert rows[0].power_mw == pytest.approx(126.48, abs=1e-2)
    assert rows[0].train_time_s_model == pytest.approx(600 * 30 * 50e-12)


class TestCLI:
    def test_sweep_is_byte_identical(self, tmp_path):
        path = write_cfg(tmp_path, small_cfg(tmp_path))
        assert main(["sweep", str(path), "--out-dir", str(tmp_path / "a")]) == 0
        assert main(["sweep", str(path), "--out-dir", str(tmp_path / "b")]) == 0
        a = (tmp_path / "a" / "results.csv").read_bytes()
        assert a == (tmp_path / "b" / "results.csv").read_bytes()
        assert a.splitlines()[0].decode() == ",".join(COLUMNS)

    def test_jobs_do_not_change_output(self, tmp_path):
        path = write_cfg(tmp_path, small_cfg(tmp_path))
        main(["sweep", str(path), "--out-dir", str(tmp_path / "one")])
        main(["sweep", str(path), "--out-dir", str(tmp_path / "two"), "--jobs", "2"])
        assert (tmp_path / "one" / "results.csv").read_bytes() == (tmp_path / "two" / "results.csv").read_bytes()

    def test_run_seed_override(self, tmp_path):
        path = write_cfg(tmp_path, small_cfg(tmp_path))
        assert main(["run", str(path), "--seed", "5", "--out-dir", str(tmp_path / "r")]) == 0
        rows = read_rows(tmp_path / "r" / "results.csv")
        assert [(r.N, r.tau_ph_ps, r.seed) for r in rows] == [(20, 50.0, 5)]

    def test_report(self, tmp_path, capsys):
        path = write_cfg(tmp_path, small_cfg(tmp_path))
        main(["sweep", str(path), "--out-dir", str(tmp_path / "s")])
        capsys.readouterr()
        assert main(["report", str(tmp_path / "s" / "results.csv"), "--costs"]) == 0
        out = capsys.readouterr().out
        assert "narma10" in out and "silicon_mr" in out
        assert "ratio vs silicon_mr=168" in out

    def test_bad_config_exit_code(self, tmp_path, capsys):
        path = write_cfg(tmp_path, {"bogus": 1})
        assert main(["run", str(path)]) == 2
        assert "unknown config key" in capsys.readouterr().err

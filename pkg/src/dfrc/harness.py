"""Experiment runner: dataset -> mask -> reservoir -> readout -> metrics + costs."""

from __future__ import annotations

import csv
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from . import cost, kernels
from .config import ExperimentConfig, GridPoint
from .errors import DFRCError, EmptyInputError
from .masking import apply_mask
from .metrics import nrmse, quantize_symbols, ser
from .readout import predict, train
from .reservoir import run_reservoir
from .tasks import TaskDataset, gen_channel_eq, gen_narma10, load_santa_fe

log = logging.getLogger(__name__)

RESULTS_FILE = "results.csv"
FAILURES_FILE = "failures.csv"
LOG_FILE = "run.log"


@dataclass
class ResultRow:
    task: str
    node_kind: str
    N: int
    tau_ph_ps: float | None
    gamma: float | None
    snr_db: float | None
    seed: int
    train_metric: float | None
    test_metric: float | None
    train_time_s_model: float | None
    power_mw: float | None
    error: str | None = field(default=None, compare=False)

    @property
    def ok(self) -> bool:
        return self.error is None


COLUMNS = [f.name for f in fields(ResultRow) if f.name != "error"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(name: str, text: str):
    if text == "":
        return None
    if name in ("task", "node_kind"):
        return text
    if name in ("N", "seed"):
        return int(text)
    return float(text)


def write_rows(rows: Iterable[ResultRow], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])


def read_rows(path: str | Path) -> list[ResultRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        return [ResultRow(**{c: _parse(c, rec[c]) for c in COLUMNS}) for rec in reader]


def build_dataset(cfg: ExperimentConfig, point: GridPoint) -> TaskDataset:
    t = cfg["task"]
    if cfg.task == "narma10":
        return gen_narma10(int(t["length"]), point.seed, t["train_len"])
    if cfg.task == "santa_fe":
        train_len = 4000 if t["train_len"] is None else int(t["train_len"])
        test_len = 2000 if t["test_len"] is None else int(t["test_len"])
        return load_santa_fe(cfg.santa_fe_path, train_len, test_len)
    return gen_channel_eq(int(t["n_symbols"]), point.snr_db, point.seed, t["train_len"])


def _score(task: str, predicted: np.ndarray, target: np.ndarray) -> float:
    if task == "channel_eq":
        return ser(quantize_symbols(predicted), target).value
    return nrmse(predicted, target).value


def evaluate_point(cfg: ExperimentConfig, point: GridPoint, artifact_dir: Path | None = None
                   ) -> tuple[ResultRow, float]:
    """Run one grid point. Returns the row and the measured regression seconds.

    Module errors become a failure row instead of propagating.
    """
    node = cfg["node"]
    kind = cfg.node_kind
    row = ResultRow(
        task=cfg.task, node_kind=kind, N=point.n_virtual,
        tau_ph_ps=point.tau_ph_ps,
        gamma=float(node["gamma"]) if kind != "mackey_glass" else None,
        snr_db=point.snr_db, seed=point.seed,
        train_metric=None, test_metric=None, train_time_s_model=None, power_mw=None,
    )
    measured = 0.0
    try:
        data = build_dataset(cfg, point)
        rcfg = cfg.reservoir_config(point)
        mask = cfg.mask(point.n_virtual)
        stream = apply_mask(data.inputs, mask, float(cfg["input"]["gain"]))
        states = run_reservoir(stream, rcfg)

        washout = rcfg.washout
        n_fit = data.train_len - washout
        if n_fit < 1:
            raise EmptyInputError(f"washout {washout} leaves no training rows")
        S_train, S_test = states.values[:n_fit], states.values[n_fit:]
        y_train, y_test = data.targets[washout:data.train_len], data.targets[data.train_len:]

        t0 = time.perf_counter()
        weights, _ = train(S_train, y_train, float(cfg["readout"]["ridge"]), bool(cfg["readout"]["with_bias"]))
        measured = time.perf_counter() - t0

        row.train_metric = _score(cfg.task, predict(S_train, weights), y_train)
        if y_test.size:
            row.test_metric = _score(cfg.task, predict(S_test, weights), y_test)

        timing = cfg["timing"]
        tau_loop = timing["tau_loop_s"] if timing["tau_loop_s"] is not None else rcfg.tau
        row.train_time_s_model = cost.training_time(cost.TimingParams(
            float(tau_loop), data.train_len, float(timing["regression_time_s"])))["total_s"]
        power = cfg.power_params()
        if power is not None:
            row.power_mw = cost.total_power_mw(power)["total_mw"]

        if artifact_dir is not None:
            artifact_dir.mkdir(parents=True, exist_ok=True)
            states.to_csv(artifact_dir / "states.csv")
            weights.save(artifact_dir / "weights.txt")
            data.to_csv(artifact_dir / "dataset.csv")
            mask.save(artifact_dir / "mask.txt")
            (artifact_dir / "point.json").write_text(json.dumps({
                "task": cfg.task, "train_len": data.train_len, "washout": washout,
                "with_bias": weights.bias is not None,
            }, indent=2, sort_keys=True))
    except (DFRCError, ValueError, ArithmeticError) as exc:
        row.train_metric = row.test_metric = row.train_time_s_model = row.power_mw = None
        row.error = f"{type(exc).__name__}: {exc}"
    return row, measured


def _evaluate_indexed(args) -> tuple[ResultRow, float]:
    cfg, point, artifact_dir = args
    return evaluate_point(cfg, point, artifact_dir)


def iter_experiment(cfg: ExperimentConfig, sweep: bool = True, jobs: int = 1
                    ) -> Iterator[tuple[GridPoint, ResultRow, float]]:
    """Yield ``(point, row, regression_seconds)`` in grid order.

    With ``jobs > 1`` points run in worker processes; results are still
    yielded in grid order.
    """
    points = cfg.grid(sweep)
    save = bool(cfg["output"]["save_artifacts"])
    tasks = [(cfg, p, cfg.out_dir / "artifacts" / f"point_{i:04d}" if save else None)
             for i, p in enumerate(points)]
    if jobs <= 1:
        for t in tasks:
            yield (t[1], *_evaluate_indexed(t))
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for t, result in zip(tasks, pool.map(_evaluate_indexed, tasks)):
            yield (t[1], *result)


def run_experiment(cfg: ExperimentConfig, sweep: bool = True, jobs: int = 1,
                   write: bool = True) -> list[ResultRow]:
    """Run every grid point and seed; failed points come back with ``error`` set.

    When ``write`` is true, successful rows stream into ``results.csv`` and
    failures into ``failures.csv`` under the output directory; wall-clock
    information goes only to ``run.log``.
    """
    rows: list[ResultRow] = []
    if not write:
        return [row for _, row, _ in iter_experiment(cfg, sweep, jobs)]

    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(out / LOG_FILE, mode="w", encoding="utf-8")
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO)
    try:
        log.info("backend=%s task=%s node=%s points=%d", kernels.BACKEND, cfg.task,
                 cfg.node_kind, len(cfg.grid(sweep)))
        with open(out / RESULTS_FILE, "w", newline="", encoding="utf-8") as rf, \
                open(out / FAILURES_FILE, "w", newline="", encoding="utf-8") as ff:
            rw = csv.writer(rf, lineterminator="\n")
            fw = csv.writer(ff, lineterminator="\n")
            rw.writerow(COLUMNS)
            fw.writerow(["task", "node_kind", "N", "tau_ph_ps", "snr_db", "seed", "error"])
            for point, row, measured in iter_experiment(cfg, sweep, jobs):
                rows.append(row)
                if row.ok:
                    rw.writerow([_fmt(getattr(row, c)) for c in COLUMNS])
                    rf.flush()
                    log.info("point %s ok test=%r regression_wall_s=%.6f", point, row.test_metric, measured)
                else:
                    fw.writerow([_fmt(v) for v in (row.task, row.node_kind, row.N, row.tau_ph_ps,
                                                   row.snr_db, row.seed, row.error)])
                    ff.flush()
                    log.warning("point %s failed: %s", point, row.error)
    finally:
        log.removeHandler(handler)
        handler.close()
    return rows


def best_of_sweep(rows: Iterable[ResultRow], metric: str = "test_metric") -> ResultRow:
    """Row with the smallest ``metric``; ties go to smaller N, then smaller τ_ph."""
    candidates = [r for r in rows if getattr(r, metric) is not None]
    if not candidates:
        raise EmptyInputError("no rows with a value for " + metric)

    def key(r: ResultRow):
        tau = r.tau_ph_ps if r.tau_ph_ps is not None else float("inf")
        return (getattr(r, metric), r.N, tau)

    return min(candidates, key=key)

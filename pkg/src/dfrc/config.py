"""Experiment configuration: YAML file -> validated nested settings.

Every key has a default (``DEFAULTS``); a config file only overrides what it
names and unknown keys are rejected. Relative paths resolve against the
config file's directory.
"""

from __future__ import annotations

import copy
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import cost
from .errors import ConfigError
from .masking import MaskPattern, generate_mls_mask
from .nodes import NODE_KINDS, MackeyGlassParams, MZIParams, NodeParams, SiliconMRParams
from .reservoir import ReservoirConfig

TASKS = ("narma10", "santa_fe", "channel_eq")

DEFAULTS: dict = {
    "task": {
        "name": "narma10",
        "length": 2000,        # narma10
        "path": None,          # santa_fe
        "train_len": None,     # None: task default split
        "test_len": None,
        "n_symbols": 9000,     # channel_eq
        "snr_db": 24.0,
    },
    "input": {"gain": 1.0},
    "mask": {"order": None, "amplitude": 1.0, "seed": 1, "alphabet": "bipolar"},
    "node": {
        "kind": "silicon_mr",
        "tau_ph_ps": 50.0,
        "gamma": 0.9,
        "mr": {"symmetric_decay": True, "trailing_state": "theta"},
        "mg": {"eta": 0.4, "gamma_in": 0.05, "exponent_p": 2.0, "theta_over_T": 0.2},
        "mzi": {"phase_bias": 0.25 * math.pi, "gain": 1.0},
    },
    "reservoir": {"n_virtual": 900, "theta_ps": 50.0, "washout": 0},
    "readout": {"ridge": 0.0, "with_bias": True},
    "sweep": {"n_virtual": None, "tau_ph_ps": None, "snr_db": None},
    "seeds": [0],
    "power": {"preset": None, "signal_rate_bits_per_s": None},
    "timing": {"regression_time_s": 0.0, "tau_loop_s": None},
    "output": {"dir": "results", "save_artifacts": False},
}

DEFAULT_POWER_PRESET = {"silicon_mr": "silicon_mr_calibrated", "mzi": "all_optical_mzi"}


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{where!r} must be a mapping")
            out[key] = _merge(base[key], value, where + ".")
        else:
            out[key] = value
    return out


def _grid(value, fallback) -> list:
    if value is None:
        return [fallback]
    if not isinstance(value, (list, tuple)):
        return [value]
    if not value:
        raise ConfigError("sweep grids must be nonempty")
    return list(value)


@dataclass(frozen=True)
class GridPoint:
    n_virtual: int
    tau_ph_ps: float | None
    snr_db: float | None
    seed: int


@dataclass
class ExperimentConfig:
    settings: dict
    base_dir: Path = field(default_factory=Path.cwd)

    @classmethod
    def from_dict(cls, data: dict | None = None, base_dir: str | Path | None = None) -> "ExperimentConfig":
        cfg = cls(_merge(DEFAULTS, data or {}), Path(base_dir) if base_dir else Path.cwd())
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        return cls.from_dict(data, path.parent)

    def __getitem__(self, section: str):
        return self.settings[section]

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        s = self.settings
        if s["task"]["name"] not in TASKS:
            raise ConfigError(f"task.name must be one of {TASKS}")
        if s["node"]["kind"] not in NODE_KINDS:
            raise ConfigError(f"node.kind must be one of {NODE_KINDS}")
        if not s["seeds"]:
            raise ConfigError("seeds must be nonempty")
        if s["task"]["name"] == "santa_fe":
            p = self.santa_fe_path
            if p is None or not p.is_file():
                raise ConfigError(f"task.path {p} does not exist")
        points = self.grid(sweep=True)
        for p in points:
            self.reservoir_config(p)

    @property
    def santa_fe_path(self) -> Path | None:
        p = self.settings["task"]["path"]
        if p is None:
            return None
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p

    @property
    def task(self) -> str:
        return self.settings["task"]["name"]

    @property
    def node_kind(self) -> str:
        return self.settings["node"]["kind"]

    @property
    def out_dir(self) -> Path:
        p = Path(self.settings["output"]["dir"])
        return p if p.is_absolute() else self.base_dir / p

    # -- grid ---------------------------------------------------------------

    def grid(self, sweep: bool = True) -> list[GridPoint]:
        """Grid points in deterministic order: N, then τ_ph, then SNR, then seed."""
        s = self.settings
        g = s["sweep"] if sweep else {"n_virtual": None, "tau_ph_ps": None, "snr_db": None}
        ns = _grid(g["n_virtual"], s["reservoir"]["n_virtual"])
        taus = _grid(g["tau_ph_ps"], s["node"]["tau_ph_ps"]) if self.node_kind == "silicon_mr" else [None]
        snrs = _grid(g["snr_db"], s["task"]["snr_db"]) if self.task == "channel_eq" else [None]
        return [GridPoint(int(n), None if t is None else float(t), None if q is None else float(q), int(seed))
                for n, t, q, seed in itertools.product(ns, taus, snrs, s["seeds"])]

    # -- builders -----------------------------------------------------------

    def node_params(self, tau_ph_ps: float | None) -> NodeParams:
        node = self.settings["node"]
        theta = float(self.settings["reservoir"]["theta_ps"]) * 1e-12
        kind = node["kind"]
        if kind == "silicon_mr":
            tau = float(node["tau_ph_ps"] if tau_ph_ps is None else tau_ph_ps) * 1e-12
            mr = node["mr"]
            return SiliconMRParams(tau, theta, float(node["gamma"]), bool(mr["symmetric_decay"]),
                                   str(mr["trailing_state"]))
        if kind == "mackey_glass":
            return MackeyGlassParams(**{k: float(v) for k, v in node["mg"].items()})
        return MZIParams(float(node["mzi"]["phase_bias"]), float(node["mzi"]["gain"]), float(node["gamma"]))

    def reservoir_config(self, point: GridPoint) -> ReservoirConfig:
        r = self.settings["reservoir"]
        try:
            return ReservoirConfig(point.n_virtual, float(r["theta_ps"]) * 1e-12,
                                   self.node_params(point.tau_ph_ps), int(r["washout"]))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def mask(self, n_virtual: int) -> MaskPattern:
        m = self.settings["mask"]
        return generate_mls_mask(m["order"], n_virtual, float(m["amplitude"]), int(m["seed"]), m["alphabet"])

    def power_params(self) -> cost.PowerParams | None:
        p = self.settings["power"]
        name = p["preset"] or DEFAULT_POWER_PRESET.get(self.node_kind)
        if name is None:
            return None
        overrides = {}
        if p["signal_rate_bits_per_s"] is not None:
            overrides["signal_rate_bits_per_s"] = float(p["signal_rate_bits_per_s"])
        return cost.preset(name, **overrides)

    def with_overrides(self, seed: int | None = None, out_dir: str | Path | None = None) -> "ExperimentConfig":
        s = copy.deepcopy(self.settings)
        if seed is not None:
            s["seeds"] = [int(seed)]
        if out_dir is not None:
            s["output"]["dir"] = str(Path(out_dir).resolve())
        cfg = ExperimentConfig(s, self.base_dir)
        cfg.validate()
        return cfg

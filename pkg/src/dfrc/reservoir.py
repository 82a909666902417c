"""Delayed-feedback reservoir: delay line, configuration and state collection."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .errors import ShapeError, StateDivergenceError
from .masking import MaskedStream
from .nodes import MackeyGlassParams, MZIParams, NodeParams, SiliconMRParams, node_kind


@dataclass(frozen=True)
class ReservoirConfig:
    """One accelerator: ``n_virtual`` slots of width ``theta`` seconds.

    The loop delay is derived, ``tau = n_virtual * theta``, so the two can
    never disagree.
    """

    n_virtual: int
    theta: float
    node: NodeParams
    washout: int = 0

    def __post_init__(self):
        if int(self.n_virtual) != self.n_virtual or self.n_virtual < 1:
            raise ValueError("n_virtual must be an integer >= 1")
        if not self.theta > 0:
            raise ValueError("theta must be > 0")
        if self.washout < 0:
            raise ValueError("washout must be >= 0")
        if isinstance(self.node, SiliconMRParams) and self.node.theta != self.theta:
            raise ValueError(
                f"node theta {self.node.theta!r} differs from reservoir theta {self.theta!r}"
            )

    @property
    def tau(self) -> float:
        return self.n_virtual * self.theta

    @property
    def node_kind(self) -> str:
        return node_kind(self.node)


class DelayLine:
    """Fixed-length ring buffer holding the last ``n`` node outputs.

    ``read(lag)`` returns the value pushed ``lag`` pushes ago (``1 <= lag <= n``);
    unwritten history reads as zero.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("delay line length must be >= 1")
        self.buffer = np.zeros(n)
        self.cursor = 0

    def __len__(self) -> int:
        return self.buffer.size

    def read(self, lag: int) -> float:
        n = self.buffer.size
        if not 1 <= lag <= n:
            raise IndexError(f"lag must be in [1, {n}], got {lag}")
        return float(self.buffer[(self.cursor - lag) % n])

    def push(self, value: float) -> None:
        self.buffer[self.cursor] = value
        self.cursor = (self.cursor + 1) % self.buffer.size


def reset(config: ReservoirConfig) -> DelayLine:
    return DelayLine(config.n_virtual)


@dataclass(frozen=True)
class StateMatrix:
    """Reservoir states, one row per input sample kept after washout.

    ``values[k, i]`` is the node output in slot ``i`` of period ``k + washout``.
    """

    values: np.ndarray
    washout: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ShapeError("state matrix must be 2-D")
        object.__setattr__(self, "values", v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def n_virtual(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def rows(self, start: int, stop: int | None = None) -> "StateMatrix":
        return StateMatrix(self.values[start:stop], self.washout)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow([f"s{i}" for i in range(self.n_virtual)])
            for row in self.values.tolist():
                w.writerow([repr(x) for x in row])

    @classmethod
    def from_csv(cls, path: str | Path) -> "StateMatrix":
        with open(path, newline="", encoding="utf-8") as fh:
            r = csv.reader(fh)
            header = next(r)
            data = [[float(x) for x in row] for row in r if row]
        values = np.array(data, dtype=np.float64).reshape(-1, len(header))
        return cls(values)


def _kernel_args(node: NodeParams) -> tuple:
    if isinstance(node, SiliconMRParams):
        return (node.charge, node.decay, node.gamma, not node.symmetric_decay,
                node.trailing_state == "theta")
    if isinstance(node, MackeyGlassParams):
        return (node.eta, node.gamma_in, node.exponent_p, node.theta_over_T)
    if isinstance(node, MZIParams):
        return (node.phase_bias, node.gain, node.gamma)
    raise TypeError(f"unsupported node parameters {type(node).__name__}")


def run_flat(u: np.ndarray, config: ReservoirConfig, backend: str | None = None) -> np.ndarray:
    """Run the recursion over a flat drive and return every slot's state.

    Raises:
        StateDivergenceError: at the first non-finite state.
    """
    u = np.ascontiguousarray(u, dtype=np.float64)
    n = config.n_virtual
    if u.size % n:
        raise ShapeError(f"stream length {u.size} is not a multiple of n_virtual={n}")
    kernel = kernels.get_kernel(config.node_kind, backend)
    with np.errstate(over="ignore", invalid="ignore"):
        s = kernel(u, n, *_kernel_args(config.node))
    finite = np.isfinite(s)
    if not finite.all():
        j = int(np.argmin(finite))
        raise StateDivergenceError(j, float(s[j - 1]) if j else 0.0)
    return s


def run_reservoir(stream: MaskedStream, config: ReservoirConfig,
                  backend: str | None = None) -> StateMatrix:
    """Collect DFR states for a masked stream.

    Slot ``j`` evaluates ``s[j] = step(u[j], s[j - N], s[j - 1])`` with all
    history before ``j = 0`` equal to zero. Rows are τ periods; the first
    ``config.washout`` rows are dropped.
    """
    if stream.n_virtual != config.n_virtual:
        raise ShapeError(
            f"stream built for N={stream.n_virtual}, reservoir has N={config.n_virtual}"
        )
    n_samples = stream.n_samples
    if config.washout >= n_samples:
        raise ValueError(f"washout {config.washout} must be < sample count {n_samples}")
    s = run_flat(stream.values, config, backend)
    return StateMatrix(s.reshape(n_samples, config.n_virtual)[config.washout:], config.washout)

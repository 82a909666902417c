"""Benchmark datasets: NARMA10, Santa Fe laser series, nonlinear channel equalization."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DatasetError

NARMA_MAX_RETRIES = 10
NARMA_DIVERGENCE_BOUND = 10.0

# q(n) = sum_k CHANNEL_TAPS[k] * d(n - k) over k = -2..7
CHANNEL_TAPS = {-2: 0.08, -1: -0.12, 0: 1.0, 1: 0.18, 2: -0.1, 3: 0.09, 4: -0.05, 5: 0.04, 6: 0.03, 7: 0.01}
CHANNEL_LEVELS = np.array([-3.0, -1.0, 1.0, 3.0])


@dataclass(frozen=True)
class TaskDataset:
    """Paired series with a positional split: the first ``train_len`` samples train."""

    inputs: np.ndarray
    targets: np.ndarray
    train_len: int
    test_len: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.inputs, dtype=np.float64)
        y = np.asarray(self.targets, dtype=np.float64)
        if x.shape != y.shape or x.ndim != 1:
            raise DatasetError("inputs and targets must be 1-D and equally long")
        if x.size != self.train_len + self.test_len:
            raise DatasetError(
                f"{x.size} samples do not match split {self.train_len}/{self.test_len}"
            )
        if self.train_len < 1 or self.test_len < 0:
            raise DatasetError("train_len must be >= 1 and test_len >= 0")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DatasetError("dataset contains non-finite values")
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "targets", y)

    @property
    def name(self) -> str:
        return self.meta.get("task", "")

    def split(self):
        """``(train_inputs, train_targets, test_inputs, test_targets)``."""
        n = self.train_len
        return self.inputs[:n], self.targets[:n], self.inputs[n:], self.targets[n:]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            params = " ".join(f"{k}={v}" for k, v in sorted(self.meta.items()))
            fh.write(f"# {params} train_len={self.train_len} test_len={self.test_len}\n")
            w = csv.writer(fh)
            w.writerow(["input", "target"])
            for x, y in zip(self.inputs.tolist(), self.targets.tolist()):
                w.writerow([repr(x), repr(y)])


def _narma_series(drive: np.ndarray) -> np.ndarray:
    """Outputs ``y(1..L)`` of the 10th-order NARMA system with zero history."""
    L = drive.size
    y = np.zeros(L + 1)
    d = drive.tolist()
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(L):
            window = y[max(0, k - 9):k + 1].sum()
            lagged = d[k - 9] if k >= 9 else 0.0
            y[k + 1] = 0.3 * y[k] + 0.05 * y[k] * window + 1.5 * d[k] * lagged + 0.1
    return y[1:]


def gen_narma10(length: int = 2000, seed: int = 0, train_len: int | None = None,
                inputs_override=None) -> TaskDataset:
    """NARMA10 with inputs ``i(k) ~ U[0, 0.5]`` and targets ``y(k + 1)``.

    A draw whose output exceeds ``|y| > 10`` is regenerated from the
    sub-seed ``(seed, attempt)`` up to ``NARMA_MAX_RETRIES`` times.
    ``inputs_override`` bypasses the random draw (testing hook).
    """
    if length < 10:
        raise ValueError("NARMA10 needs length >= 10")
    if train_len is None:
        train_len = length // 2
    for attempt in range(NARMA_MAX_RETRIES + 1):
        if inputs_override is not None:
            drive = np.asarray(inputs_override, dtype=np.float64).ravel()
            if drive.size != length:
                raise ValueError("inputs_override length must equal length")
        else:
            rng = np.random.default_rng([seed, attempt] if attempt else seed)
            drive = rng.uniform(0.0, 0.5, length)
        y = _narma_series(drive)
        if np.all(np.isfinite(y)) and np.abs(y).max() <= NARMA_DIVERGENCE_BOUND:
            meta = {"task": "narma10", "seed": seed, "attempt": attempt, "length": length}
            return TaskDataset(drive, y, train_len, length - train_len, meta)
        if inputs_override is not None:
            break
    raise DatasetError(f"NARMA10 diverged for seed {seed} after {NARMA_MAX_RETRIES} retries")


def read_series(path: str | Path) -> np.ndarray:
    """One number per line; blank lines are skipped."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise DatasetError(f"not a number: {text!r}", line=lineno) from None
    return np.array(values, dtype=np.float64)


def load_santa_fe(path: str | Path, train_len: int = 4000, test_len: int = 2000) -> TaskDataset:
    """One-step-ahead prediction on a laser intensity series.

    The first ``train_len + test_len + 1`` values are min/max scaled to
    [0, 1]; ``inputs[k] = x[k]`` and ``targets[k] = x[k + 1]``.
    """
    series = read_series(path)
    need = train_len + test_len + 1
    if series.size < need:
        raise DatasetError(f"{path}: {series.size} samples, need {need}")
    series = series[:need]
    lo, hi = float(series.min()), float(series.max())
    if not hi > lo:
        raise DatasetError(f"{path}: constant series cannot be normalized")
    scaled = (series - lo) / (hi - lo)
    meta = {"task": "santa_fe", "path": str(path), "min": lo, "max": hi}
    return TaskDataset(scaled[:-1], scaled[1:], train_len, test_len, meta)


def channel_output(symbols: np.ndarray, noise: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Noiseless and noisy channel outputs ``(x_clean, x)`` for a symbol stream.

    Symbols outside the stream contribute zero.
    """
    d = np.asarray(symbols, dtype=np.float64)
    n = d.size
    q = np.zeros(n)
    for lag, c in CHANNEL_TAPS.items():
        if lag >= 0:
            q[lag:] += c * d[:n - lag]
        else:
            q[:n + lag] += c * d[-lag:]
    clean = q + 0.036 * q ** 2 - 0.011 * q ** 3
    return clean, clean if noise is None else clean + noise


def gen_channel_eq(n_symbols: int = 9000, snr_db: float = 24.0, seed: int = 0,
                   train_len: int | None = None, symbols_override=None,
                   noiseless: bool = False) -> TaskDataset:
    """Recover i.i.d. 4-level symbols ``d(n)`` from the distorted, noisy ``x(n)``.

    Symbols and noise come from independent child streams of ``seed``, so
    datasets at different SNRs share the same symbol sequence. The noise
    variance is ``var(x_clean) / 10**(snr_db / 10)``.
    """
    if n_symbols < 10:
        raise ValueError("channel equalization needs n_symbols >= 10")
    if not np.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    if train_len is None:
        train_len = (2 * n_symbols) // 3
    sym_seq, noise_seq = np.random.SeedSequence(seed).spawn(2)
    if symbols_override is not None:
        d = np.asarray(symbols_override, dtype=np.float64).ravel()
        if d.size != n_symbols:
            raise ValueError("symbols_override length must equal n_symbols")
    else:
        d = CHANNEL_LEVELS[np.random.default_rng(sym_seq).integers(0, 4, n_symbols)]
    clean, _ = channel_output(d)
    if noiseless:
        x = clean
    else:
        sigma = np.sqrt(clean.var() / 10.0 ** (snr_db / 10.0))
        x = clean + sigma * np.random.default_rng(noise_seq).standard_normal(n_symbols)
    meta = {"task": "channel_eq", "seed": seed, "snr_db": float(snr_db), "n_symbols": n_symbols}
    return TaskDataset(x, d, train_len, n_symbols - train_len, meta)

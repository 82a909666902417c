"""Error metrics: NRMSE for series prediction, SER for 4-level equalization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTargetError, EmptyInputError, ShapeError

SYMBOLS = np.array([-3.0, -1.0, 1.0, 3.0])


@dataclass(frozen=True)
class MetricResult:
    value: float
    n: int

    def __float__(self) -> float:
        return self.value


def _pair(predicted, target) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(predicted, dtype=np.float64).ravel()
    t = np.asarray(target, dtype=np.float64).ravel()
    if p.size != t.size:
        raise ShapeError(f"length mismatch: {p.size} predictions vs {t.size} targets")
    if t.size == 0:
        raise EmptyInputError("metric over an empty sequence")
    return p, t


def nrmse(predicted, target) -> MetricResult:
    """Root mean squared error normalized by the target's population variance.

    Predicting the target mean scores exactly 1.
    """
    p, t = _pair(predicted, target)
    var = t.var()
    if not var > 0:
        raise DegenerateTargetError("target variance is zero")
    return MetricResult(float(np.sqrt(np.sum((t - p) ** 2) / (t.size * var))), t.size)


def quantize_symbols(values) -> np.ndarray:
    """Nearest level in {-3, -1, 1, 3}; ties at 0 and ±2 go away from zero (0 -> +1)."""
    v = np.asarray(values, dtype=np.float64)
    mag = 2.0 * np.floor(np.abs(v) / 2.0) + 1.0
    return np.where(v < 0, -1.0, 1.0) * np.minimum(mag, 3.0)


def ser(predicted_symbols, target_symbols) -> MetricResult:
    """Fraction of symbols that differ.

    This is the error fraction (1 - accuracy); a ratio of correctly
    reproduced symbols would be an accuracy, not an error rate.
    """
    p, t = _pair(predicted_symbols, target_symbols)
    return MetricResult(float(np.count_nonzero(p != t)) / t.size, t.size)

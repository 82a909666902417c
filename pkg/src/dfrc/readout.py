"""Linear readout trained by (regularized) pseudo-inverse."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ShapeError


@dataclass(frozen=True)
class ReadoutWeights:
    weights: np.ndarray
    bias: float | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if not np.all(np.isfinite(w)) or (self.bias is not None and not np.isfinite(self.bias)):
            raise ValueError("readout weights must be finite")
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.weights.size

    def save(self, path: str | Path) -> None:
        """One value per line, bias last when present."""
        vals = self.weights.tolist() + ([] if self.bias is None else [self.bias])
        Path(path).write_text("".join(f"{x!r}\n" for x in vals))

    @classmethod
    def load(cls, path: str | Path, with_bias: bool) -> "ReadoutWeights":
        vals = [float(ln) for ln in Path(path).read_text().split()]
        if with_bias:
            if not vals:
                raise ValueError("weights file is empty")
            return cls(np.array(vals[:-1]), vals[-1])
        return cls(np.array(vals))


@dataclass(frozen=True)
class TrainReport:
    train_nrmse: float
    rank: int
    singular_value_cutoff: float


def _as_states(states) -> np.ndarray:
    s = np.asarray(states, dtype=np.float64)
    if s.ndim != 2:
        raise ShapeError("states must be a 2-D matrix")
    return s


def train(states, targets, ridge: float = 0.0, with_bias: bool = True
          ) -> tuple[ReadoutWeights, TrainReport]:
    """Fit readout weights minimizing ``||y - S w - b||^2 + ridge * ||w||^2``.

    Solved through the SVD of the (column-centered, if ``with_bias``) state
    matrix. Singular values at or below ``eps * max(rows, cols) * sigma_max``
    are dropped, so ``ridge=0`` gives the minimum-norm least-squares solution.
    The bias is never penalized.
    """
    S = _as_states(states)
    y = np.asarray(targets, dtype=np.float64).ravel()
    if y.size != S.shape[0]:
        raise ShapeError(f"{y.size} targets for {S.shape[0]} state rows")
    if ridge < 0:
        raise ValueError("ridge must be >= 0")
    if S.shape[0] == 0:
        raise ShapeError("no training rows")

    if with_bias:
        s_mean = S.mean(axis=0)
        y_mean = y.mean()
        A = S - s_mean
        b = y - y_mean
    else:
        A, b = S, y

    U, sv, Vt = np.linalg.svd(A, full_matrices=False)
    sigma_max = sv[0] if sv.size else 0.0
    cutoff = np.finfo(np.float64).eps * max(S.shape) * sigma_max
    keep = sv > cutoff
    rank = int(keep.sum())
    if rank == 0:
        w = np.zeros(S.shape[1])
    else:
        sk = sv[keep]
        filt = sk / (sk * sk + ridge) if ridge > 0 else 1.0 / sk
        w = Vt[keep].T @ (filt * (U[:, keep].T @ b))

    bias = float(y_mean - s_mean @ w) if with_bias else None
    weights = ReadoutWeights(w, bias)
    fitted = predict(S, weights)
    var = y.var()
    err = float(np.sqrt(np.mean((y - fitted) ** 2) / var)) if var > 0 else float(np.sqrt(np.mean((y - fitted) ** 2)))
    return weights, TrainReport(err, rank, float(cutoff))


def predict(states, weights: ReadoutWeights) -> np.ndarray:
    S = _as_states(states)
    if S.shape[1] != weights.weights.size:
        raise ShapeError(f"{S.shape[1]} state columns for {weights.weights.size} weights")
    y = S @ weights.weights
    if weights.bias is not None:
        y = y + weights.bias
    return y

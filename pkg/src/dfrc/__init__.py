"""Delayed-feedback reservoir computing simulator and benchmark harness."""

from .config import ExperimentConfig
from .cost import laser_power_dbm, total_power_mw, training_time
from .errors import (
    DatasetError,
    DegenerateTargetError,
    DFRCError,
    EmptyInputError,
    InsufficientSequenceLengthError,
    InvalidSeedError,
    ShapeError,
    StateDivergenceError,
)
from .harness import ResultRow, best_of_sweep, run_experiment
from .masking import MaskedStream, MaskPattern, apply_mask, generate_mls_mask
from .metrics import MetricResult, nrmse, quantize_symbols, ser
from .nodes import MackeyGlassParams, MZIParams, SiliconMRParams, mg_step, mr_step, mzi_step
from .readout import ReadoutWeights, TrainReport, predict, train
from .reservoir import DelayLine, ReservoirConfig, StateMatrix, reset, run_reservoir
from .tasks import TaskDataset, gen_channel_eq, gen_narma10, load_santa_fe

__version__ = "0.1.0"

"""Numeric tables as 8-bit grayscale images, plus an SCG-trained churn classifier."""

__version__ = "0.1.0"

from .dataset import ColumnStats, Dataset, compute_stats, load_csv, synth_churn, write_csv
from .evaluation import (
    ConfusionMatrix,
    DataSplits,
    ErrorHistogram,
    EvalReport,
    RocCurve,
    confusion,
    error_histogram,
    roc,
    split,
)
from .imageio import GrayImage, SurfaceGrid, read_pgm, surface_grid, write_pgm
from .mlp import MlpModel, forward, init_model, loss_and_gradient, predict
from .normcodec import Mode, NormMatrix, NormParams, denormalize, dequantize, normalize, quantize
from .training import StopReason, TrainConfig, TrainTrace, train_scg

__all__ = [
    "ColumnStats", "ConfusionMatrix", "DataSplits", "Dataset", "ErrorHistogram", "EvalReport",
    "GrayImage", "MlpModel", "Mode", "NormMatrix", "NormParams", "RocCurve", "StopReason",
    "SurfaceGrid", "TrainConfig", "TrainTrace", "compute_stats", "confusion", "denormalize",
    "dequantize", "error_histogram", "forward", "init_model", "load_csv", "loss_and_gradient",
    "normalize", "predict", "quantize", "read_pgm", "roc", "split", "surface_grid", "synth_churn",
    "train_scg", "write_csv", "write_pgm",
]

"""End-to-end runs shared by the CLI: ingest, encode, train, evaluate, manifest."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import Dataset, compute_stats, load_csv, synth_churn
from .errors import IoError
from .evaluation import DataSplits, EvalReport, evaluate_model, split, write_report
from .imageio import surface_grid, write_pgm, write_surface_csv, write_surface_matrix
from .mlp import MlpModel, init_model
from .normcodec import Mode, NormParams, apply_params, fit_params, normalize, quantize, write_sidecar
from .training import TrainConfig, TrainTrace, train_scg

MODEL_SCHEMA = "pixnorm.model/1"


@dataclass(frozen=True)
class SynthSpec:
    rows: int
    cols: int
    seed: int
    separation: float

    @classmethod
    def parse(cls, text: str) -> "SynthSpec":
        parts = text.split(",")
        if len(parts) != 4:
            raise ValueError(f"--synth expects rows,cols,seed,sep; got {text!r}")
        return cls(int(parts[0]), int(parts[1]), int(parts[2]), float(parts[3]))


def load_source(input_path=None, label_column="churn", drop=(), impute_mean=False,
                synth: SynthSpec | None = None) -> Dataset:
    if synth is not None:
        return synth_churn(synth.rows, synth.cols, synth.seed, synth.separation)
    if input_path is None:
        raise IoError("no input: pass --input or --synth")
    return load_csv(input_path, label_column, drop, impute_mean)


def model_features(values: np.ndarray, params: NormParams, quantized: bool = True) -> np.ndarray:
    """Network inputs on [0, 1]: pixel / 255, or the continuous normalized value / 255."""
    scaled = apply_params(values, params)
    if quantized:
        from .normcodec import NormMatrix

        scaled = quantize(NormMatrix(scaled, params)).as_array().astype(np.float64)
    return (scaled - params.a) / (params.b - params.a)


def sha256_of(path) -> str:
    h = hashlib.sha256()
    try:
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 20), b""):
                h.update(chunk)
    except OSError as exc:
        raise IoError(f"cannot hash {path}: {exc}") from exc
    return h.hexdigest()


@dataclass
class Manifest:
    command: str
    params: dict
    seed: int | None = None
    inputs: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    tool_version: str = __version__
    created_at: str = ""

    def write(self, path) -> Path:
        self.created_at = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc
        return path


def save_model(path, model: MlpModel, cfg: TrainConfig, trace: TrainTrace, params: NormParams,
               quantized: bool, splits: DataSplits) -> None:
    payload = {
        "schema": MODEL_SCHEMA,
        **model.to_dict(),
        "train_config": asdict(cfg),
        "trace_summary": {
            "epochs": len(trace),
            "best_validation_epoch": trace.best_validation_epoch,
            "stop_reason": trace.stop_reason.value,
        },
        "trace": trace.to_dict(),
        "input": {"quantized": quantized, "norm_params": params.to_dict()},
        "splits": splits.to_dict(),
    }
    try:
        Path(path).write_text(json.dumps(payload, indent=2) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load_model(path):
    """Returns (model, trace, norm params, quantized flag, train config)."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    model = MlpModel.from_dict(data)
    trace = TrainTrace.from_dict(data["trace"])
    params = NormParams.from_dict(data["input"]["norm_params"])
    cfg = TrainConfig(**data["train_config"])
    return model, trace, params, bool(data["input"]["quantized"]), cfg


@dataclass
class TrainOutcome:
    model: MlpModel
    trace: TrainTrace
    splits: DataSplits
    params: NormParams
    features: np.ndarray


def train_on(d: Dataset, seed: int, hidden: int = 10, cfg: TrainConfig | None = None,
             mode: Mode | str = Mode.GLOBAL, quantized: bool = True) -> TrainOutcome:
    cfg = cfg or TrainConfig(seed=seed)
    params = fit_params(d.values, mode, column_names=d.column_names)
    X = model_features(d.values, params, quantized)
    splits = split(d.row_count, seed=seed)
    model = init_model((d.col_count, hidden, 2), seed)
    model, trace = train_scg(model, X, d.labels, splits, cfg)
    return TrainOutcome(model, trace, splits, params, X)


def reproduce(d: Dataset, seed: int, out_dir, hidden: int = 10, cfg: TrainConfig | None = None,
              mode: Mode | str = Mode.GLOBAL, quantized: bool = True) -> tuple[EvalReport, list[Path]]:
    """Full run: stats, image + sidecar + surface, split, SCG training, report."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out}: {exc}") from exc
    stats = compute_stats(d)
    norm = normalize(d, mode)
    img = quantize(norm)
    artifacts = [out / "dataset.pgm", out / "dataset.norm.json", out / "surface.csv", out / "surface.dat"]
    write_pgm(img, artifacts[0])
    write_sidecar(norm.params, artifacts[1])
    grid = surface_grid(img)
    write_surface_csv(grid, artifacts[2])
    write_surface_matrix(grid, artifacts[3])

    cfg = cfg or TrainConfig(seed=seed)
    run = train_on(d, seed, hidden, cfg, mode, quantized)
    model_path = out / "model.json"
    save_model(model_path, run.model, cfg, run.trace, run.params, quantized, run.splits)
    artifacts.append(model_path)

    extra = {
        "dataset": {
            "rows": d.row_count,
            "cols": d.col_count,
            "columns": list(d.column_names),
            "churn_count": int(d.labels.sum()),
            "global_min": stats.global_min,
            "global_max": stats.global_max,
        },
        "input_encoding": {"mode": Mode(mode).value, "quantized": quantized},
    }
    rep = evaluate_model(run.model, run.features, d.labels, run.splits, run.trace, extra=extra)
    artifacts.extend(write_report(rep, out))
    return rep, artifacts

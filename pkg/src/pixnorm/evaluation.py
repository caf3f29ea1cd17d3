"""Data splitting and classifier metrics: confusion, ROC/AUC, error histogram, report bundle."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import IoError, LengthMismatch, ShapeMismatch, SingleClassInput, TooFewRows
from .mlp import CHURN_COLUMN, forward, one_hot, predict_from_proba
from .rng import SplitMix64

SPLIT_NAMES = ("train", "validation", "test")
REPORT_SCHEMA = "pixnorm.report/1"


@dataclass(frozen=True)
class DataSplits:
    train: np.ndarray
    validation: np.ndarray
    test: np.ndarray
    fractions: tuple[float, float, float] = (0.70, 0.15, 0.15)
    seed: int = 0

    def items(self):
        return zip(SPLIT_NAMES, (self.train, self.validation, self.test))

    def to_dict(self) -> dict:
        return {"fractions": list(self.fractions), "seed": self.seed,
                "sizes": {name: int(len(idx)) for name, idx in self.items()}}


def split(n_rows: int, fractions: Sequence[float] = (0.70, 0.15, 0.15), seed: int = 0) -> DataSplits:
    """Seeded shuffle, then contiguous train/validation/test blocks.

    Validation and test sizes are ``n * fraction`` rounded half up; training
    takes the remainder, so every size is within one row of its fraction.
    Indices inside each block are returned sorted.
    """
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or min(fractions) <= 0 or abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"fractions must be three positive numbers summing to 1, got {fractions}")
    if n_rows < 3:
        raise TooFewRows(f"need at least 3 rows to split, got {n_rows}")
    n_val = math.floor(n_rows * fractions[1] + 0.5)
    n_test = math.floor(n_rows * fractions[2] + 0.5)
    n_train = n_rows - n_val - n_test
    perm = SplitMix64.for_stream(seed, "split").permutation(n_rows)
    train = np.sort(perm[:n_train])
    val = np.sort(perm[n_train : n_train + n_val])
    test = np.sort(perm[n_train + n_val :])
    return DataSplits(train, val, test, fractions, seed)


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else math.nan

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
                "total": self.total, "accuracy": _json_float(self.accuracy)}


def confusion(labels, predictions) -> ConfusionMatrix:
    labels = np.asarray(labels, dtype=np.int64)
    predictions = np.asarray(predictions, dtype=np.int64)
    if labels.shape != predictions.shape or labels.ndim != 1:
        raise LengthMismatch(f"labels {labels.shape} and predictions {predictions.shape} differ")
    if labels.size == 0:
        raise LengthMismatch("confusion needs at least one sample")
    pos, pred = labels == 1, predictions == 1
    return ConfusionMatrix(
        tp=int(np.sum(pos & pred)),
        fp=int(np.sum(~pos & pred)),
        tn=int(np.sum(~pos & ~pred)),
        fn=int(np.sum(pos & ~pred)),
    )


@dataclass(frozen=True)
class RocCurve:
    thresholds: np.ndarray  # first entry +inf for the (0, 0) sentinel
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))


def roc(labels, scores) -> RocCurve:
    """Sweep thresholds over distinct scores, descending; ties share one point.

    A sample counts as positive when ``score >= threshold``.  The area is the
    trapezoid sum, accumulated in integer counts so it is exact up to the
    final division.
    """
    labels = np.asarray(labels, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    if labels.shape != scores.shape or labels.ndim != 1:
        raise LengthMismatch(f"labels {labels.shape} and scores {scores.shape} differ")
    n_pos = int(np.sum(labels == 1))
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassInput("ROC needs both classes present")

    order = np.argsort(-scores, kind="stable")
    s, y = scores[order], labels[order]
    tp = np.cumsum(y == 1)
    fp = np.cumsum(y == 0)
    # last index of each run of equal scores
    ends = np.flatnonzero(np.r_[s[1:] != s[:-1], True])
    tp = np.r_[0, tp[ends]].astype(np.int64)
    fp = np.r_[0, fp[ends]].astype(np.int64)
    twice_area = int(np.sum(np.diff(fp) * (tp[1:] + tp[:-1])))
    auc = twice_area / (2 * n_pos * n_neg)
    return RocCurve(np.r_[np.inf, s[ends]], fp / n_neg, tp / n_pos, auc)


@dataclass(frozen=True)
class ErrorHistogram:
    bin_edges: np.ndarray
    counts: dict  # split name -> counts per bin


def error_histogram(targets, outputs, bins: int = 20,
                    groups: Mapping[str, Sequence[int]] | None = None) -> ErrorHistogram:
    """Histogram of ``target - output`` on the positive-class component.

    Bins are uniform over the observed error range across all samples and
    shared by every group.  ``groups`` maps a name to sample indices; when
    omitted there is one group, ``"all"``.
    """
    targets = np.asarray(targets, dtype=np.float64)
    outputs = np.asarray(outputs, dtype=np.float64)
    if targets.shape != outputs.shape or targets.ndim != 2 or targets.shape[1] < 2:
        raise ShapeMismatch(f"targets {targets.shape} and outputs {outputs.shape} must match, (n, >=2)")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    errors = targets[:, CHURN_COLUMN] - outputs[:, CHURN_COLUMN]
    if groups is None:
        groups = {"all": np.arange(errors.size)}
    lo, hi = (float(errors.min()), float(errors.max())) if errors.size else (0.0, 0.0)
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)
    counts = {}
    for name, idx in groups.items():
        c, _ = np.histogram(errors[np.asarray(idx, dtype=np.int64)], bins=edges)
        counts[name] = c.astype(np.int64)
    return ErrorHistogram(edges, counts)


@dataclass
class EvalReport:
    confusion: dict  # split name -> ConfusionMatrix, incl. "all"
    roc: RocCurve  # over all samples
    auc: dict  # split name -> auc or None
    histogram: ErrorHistogram
    trace: object  # TrainTrace
    splits: DataSplits
    extra: dict

    @property
    def overall_accuracy(self) -> float:
        return self.confusion["all"].accuracy

    def to_dict(self) -> dict:
        best = self.trace.best_validation_epoch
        best_val = self.trace.val_loss[best - 1] if best else None
        return {
            "schema": REPORT_SCHEMA,
            "overall_accuracy": self.overall_accuracy,
            "confusion": {k: v.to_dict() for k, v in self.confusion.items()},
            "auc": self.auc,
            "error_histogram": {
                "bin_edges": self.histogram.bin_edges.tolist(),
                "counts": {k: v.tolist() for k, v in self.histogram.counts.items()},
            },
            "training": {
                "epochs": len(self.trace),
                "best_validation_epoch": best,
                "best_validation_loss": _json_float(best_val),
                "stop_reason": self.trace.stop_reason.value,
            },
            "splits": self.splits.to_dict(),
            **self.extra,
        }


def _json_float(v):
    return None if v is None or not math.isfinite(v) else v


def evaluate_model(model, X, labels, splits: DataSplits, trace, bins: int = 20,
                   extra: dict | None = None) -> EvalReport:
    labels = np.asarray(labels, dtype=np.int64)
    probs = forward(model, X)
    preds = predict_from_proba(probs)
    groups = dict(splits.items())
    matrices, aucs = {}, {}
    for name, idx in [*groups.items(), ("all", np.arange(labels.size))]:
        if len(idx) == 0:
            matrices[name] = ConfusionMatrix(0, 0, 0, 0)
            aucs[name] = None
            continue
        matrices[name] = confusion(labels[idx], preds[idx])
        try:
            aucs[name] = roc(labels[idx], probs[idx, CHURN_COLUMN]).auc
        except SingleClassInput:
            aucs[name] = None
    hist = error_histogram(one_hot(labels, probs.shape[1]), probs, bins, groups)
    return EvalReport(matrices, roc(labels, probs[:, CHURN_COLUMN]), aucs, hist, trace, splits, extra or {})


def _write_rows(path: Path, header, rows) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def write_report(rep: EvalReport, out_dir: str | Path) -> list[Path]:
    """Write report.json plus the CSV tables; returns the paths written."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out}: {exc}") from exc
    written = []

    path = out / "report.json"
    try:
        path.write_text(json.dumps(rep.to_dict(), indent=2, allow_nan=False) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    written.append(path)

    for name, cm in rep.confusion.items():
        path = out / f"confusion_{name}.csv"
        _write_rows(path, ["actual", "predicted_0", "predicted_1"],
                    [[0, cm.tn, cm.fp], [1, cm.fn, cm.tp]])
        written.append(path)

    path = out / "roc.csv"
    _write_rows(path, ["threshold", "fpr", "tpr"],
                [[repr(float(t)), repr(float(f)), repr(float(p))]
                 for t, f, p in zip(rep.roc.thresholds, rep.roc.fpr, rep.roc.tpr)])
    written.append(path)

    path = out / "error_hist.csv"
    edges = rep.histogram.bin_edges
    names = list(rep.histogram.counts)
    _write_rows(path, ["bin_left", "bin_right", *names],
                [[repr(float(edges[i])), repr(float(edges[i + 1])),
                  *(int(rep.histogram.counts[n][i]) for n in names)]
                 for i in range(len(edges) - 1)])
    written.append(path)

    path = out / "trace.csv"
    _write_rows(path, ["epoch", "train_loss", "val_loss", "test_loss", "grad_norm"],
                [[e, *(repr(float(v)) for v in vals)] for e, *vals in rep.trace.rows()])
    written.append(path)
    return written

"""Full-batch scaled conjugate gradient training (Moller, 1993).

One SCG iteration is one epoch.  Each iteration estimates curvature along
the search direction from a sigma-perturbed gradient difference, regularizes
it with a Levenberg-Marquardt style scale ``lambda``, and takes the step only
if the comparison parameter ``Delta`` shows the loss did not rise.  Search
directions restart at steepest descent every ``n_params`` iterations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from enum import Enum

import numpy as np

from .errors import EmptyTrainingSet, NonFiniteLoss
from .evaluation import DataSplits
from .mlp import MlpModel, loss_and_gradient, loss_only, one_hot

LAMBDA_MAX = 1e100


class StopReason(str, Enum):
    MAX_EPOCHS = "MaxEpochs"
    VALIDATION_FAILURES = "ValidationFailures"
    MIN_GRADIENT = "MinGradient"


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 1000
    max_validation_failures: int = 6
    min_gradient_norm: float = 1e-6
    sigma: float = 5.0e-5
    lambda_init: float = 5.0e-7
    seed: int = 0

    def __post_init__(self):
        if self.max_epochs < 0:
            raise ValueError("max_epochs must be >= 0")
        if self.max_validation_failures < 1:
            raise ValueError("max_validation_failures must be >= 1")
        if self.min_gradient_norm < 0 or self.sigma <= 0 or self.lambda_init <= 0:
            raise ValueError("sigma and lambda_init must be positive, min_gradient_norm non-negative")


@dataclass
class TrainTrace:
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    test_loss: list[float] = field(default_factory=list)
    grad_norm: list[float] = field(default_factory=list)
    best_validation_epoch: int = 0  # 1-based; 0 when no epoch ran
    stop_reason: StopReason = StopReason.MAX_EPOCHS

    def __len__(self) -> int:
        return len(self.train_loss)

    def record(self, train: float, val: float, test: float, grad: float) -> None:
        self.train_loss.append(train)
        self.val_loss.append(val)
        self.test_loss.append(test)
        self.grad_norm.append(grad)

    def rows(self):
        for i in range(len(self)):
            yield i + 1, self.train_loss[i], self.val_loss[i], self.test_loss[i], self.grad_norm[i]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["stop_reason"] = self.stop_reason.value
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "TrainTrace":
        data = dict(data)
        data["stop_reason"] = StopReason(data["stop_reason"])
        return cls(**data)


def train_scg(m: MlpModel, X, labels, splits: DataSplits, cfg: TrainConfig = TrainConfig()
              ) -> tuple[MlpModel, TrainTrace]:
    """Train ``m`` on ``X[splits.train]``; return the best-validation weights.

    With an empty validation split early stopping is off and the final
    weights are returned.  Raises :class:`NonFiniteLoss` (carrying the trace
    so far) if an accepted state has a non-finite loss or gradient.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels)
    n_out = m.layer_sizes[-1]
    if len(splits.train) == 0:
        raise EmptyTrainingSet("training split is empty")

    def part(idx):
        idx = np.asarray(idx, dtype=np.int64)
        return X[idx], one_hot(labels[idx], n_out)

    X_tr, Y_tr = part(splits.train)
    X_va, Y_va = part(splits.validation)
    X_te, Y_te = part(splits.test)
    has_val = len(X_va) > 0

    def eval_loss(theta, Xs, Ys):
        return loss_only(m.with_flat(theta), Xs, Ys) if len(Xs) else math.nan

    def grad(theta):
        return loss_and_gradient(m.with_flat(theta), X_tr, Y_tr)

    trace = TrainTrace()
    if cfg.max_epochs == 0:
        return m, trace

    w = m.flat()
    n_params = w.size
    E, g = grad(w)
    if not (math.isfinite(E) and np.all(np.isfinite(g))):
        raise NonFiniteLoss("initial loss or gradient is not finite", trace)
    if np.linalg.norm(g) < cfg.min_gradient_norm:
        trace.stop_reason = StopReason.MIN_GRADIENT
        return m, trace

    r = -g
    p = r.copy()
    lam, lam_bar = cfg.lambda_init, 0.0
    success = True
    delta = 0.0
    best_val, best_w, best_epoch = math.inf, w, 0
    fails = 0

    for epoch in range(1, cfg.max_epochs + 1):
        mu = float(p @ r)
        if mu <= 0.0:
            # direction lost descent through rounding; restart
            p = r.copy()
            mu = float(p @ r)
            success, lam_bar = True, 0.0
        p2 = float(p @ p)

        if success:
            sigma_k = cfg.sigma / math.sqrt(p2)
            _, g_sig = grad(w + sigma_k * p)
            delta = float(p @ ((g_sig - g) / sigma_k))

        delta += (lam - lam_bar) * p2
        if delta <= 0.0:
            lam_bar = 2.0 * (lam - delta / p2)
            delta = -delta + lam * p2
            lam = lam_bar

        alpha = mu / delta
        w_new = w + alpha * p
        E_new, g_new = grad(w_new)
        comparison = 2.0 * delta * (E - E_new) / (mu * mu)
        if not (math.isfinite(comparison) and np.all(np.isfinite(g_new))):
            comparison = -math.inf

        if comparison >= 0.0:
            r_old = r
            w, E, g = w_new, E_new, g_new
            r = -g
            lam_bar = 0.0
            success = True
            if epoch % n_params == 0:
                p = r.copy()
            else:
                beta = (float(r @ r) - float(r @ r_old)) / mu
                p = r + beta * p
            if comparison >= 0.75:
                lam *= 0.25
        else:
            lam_bar = lam
            success = False
        if comparison < 0.25:
            if math.isfinite(comparison):
                lam += delta * (1.0 - comparison) / p2
            else:
                lam *= 4.0
            lam = min(lam, LAMBDA_MAX)

        if not math.isfinite(E):
            raise NonFiniteLoss(f"training loss became non-finite at epoch {epoch}", trace)
        gnorm = float(np.linalg.norm(g))
        val = eval_loss(w, X_va, Y_va)
        trace.record(E, val, eval_loss(w, X_te, Y_te), gnorm)

        if has_val:
            if val < best_val:
                best_val, best_w, best_epoch, fails = val, w, epoch, 0
            else:
                fails += 1
        else:
            best_w, best_epoch = w, epoch

        if gnorm < cfg.min_gradient_norm:
            trace.stop_reason = StopReason.MIN_GRADIENT
            break
        if has_val and fails >= cfg.max_validation_failures:
            trace.stop_reason = StopReason.VALIDATION_FAILURES
            break
    else:
        trace.stop_reason = StopReason.MAX_EPOCHS

    trace.best_validation_epoch = best_epoch
    return m.with_flat(best_w), trace

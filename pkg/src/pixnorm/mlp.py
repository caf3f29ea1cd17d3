"""Feed-forward pattern-recognition network: tanh hidden layers, softmax output.

Output column 0 is the probability of churn (label 1), column 1 of retention (label 0).
Flat parameter vectors are laid out layer by layer, each layer's weight
matrix (row-major, shape ``(fan_out, fan_in)``) followed by its bias vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch
from .rng import SplitMix64

HIDDEN_ACTIVATION = "tanh"
OUTPUT_ACTIVATION = "softmax"


@dataclass(frozen=True)
class MlpModel:
    layer_sizes: tuple[int, ...]
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    hidden_activation: str = HIDDEN_ACTIVATION
    output_activation: str = OUTPUT_ACTIVATION

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def flat(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b)
        return np.concatenate(parts)

    def with_flat(self, theta: np.ndarray) -> "MlpModel":
        return MlpModel(self.layer_sizes, *_unflatten(self.layer_sizes, theta))

    def to_dict(self) -> dict:
        return {
            "layer_sizes": list(self.layer_sizes),
            "activations": {"hidden": self.hidden_activation, "output": self.output_activation},
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MlpModel":
        sizes = tuple(int(s) for s in data["layer_sizes"])
        weights = tuple(np.asarray(w, dtype=np.float64).reshape(o, i)
                        for w, i, o in zip(data["weights"], sizes[:-1], sizes[1:]))
        biases = tuple(np.asarray(b, dtype=np.float64) for b in data["biases"])
        return cls(sizes, weights, biases)


def _unflatten(sizes: Sequence[int], theta: np.ndarray):
    theta = np.asarray(theta, dtype=np.float64)
    weights, biases = [], []
    pos = 0
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        n = fan_in * fan_out
        weights.append(theta[pos : pos + n].reshape(fan_out, fan_in).copy())
        pos += n
        biases.append(theta[pos : pos + fan_out].copy())
        pos += fan_out
    if pos != theta.size:
        raise DimensionMismatch(f"parameter vector has {theta.size} entries, model needs {pos}")
    return tuple(weights), tuple(biases)


def init_model(layer_sizes: Sequence[int] = (17, 10, 2), seed: int = 0,
               init_range: float | None = None) -> MlpModel:
    """Weights uniform in [-r, r] with r = sqrt(6 / (fan_in + fan_out)), zero biases.

    ``init_range`` overrides r; ``init_range=0`` gives an all-zero network.
    """
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 2 or min(sizes) < 1:
        raise ValueError(f"need at least two layers of size >= 1, got {sizes}")
    gen = SplitMix64.for_stream(seed, "init")
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        r = np.sqrt(6.0 / (fan_in + fan_out)) if init_range is None else init_range
        u = gen.uniform(fan_in * fan_out).reshape(fan_out, fan_in)
        weights.append(r * (2.0 * u - 1.0))
        biases.append(np.zeros(fan_out))
    return MlpModel(sizes, tuple(weights), tuple(biases))


def _check_input(m: MlpModel, x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != m.n_inputs:
        raise DimensionMismatch(f"expected inputs of width {m.n_inputs}, got shape {x.shape}")
    return x, single


def _log_softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def _forward_pass(m: MlpModel, x: np.ndarray):
    """Hidden activations per layer plus output logits."""
    acts = [x]
    h = x
    for w, b in zip(m.weights[:-1], m.biases[:-1]):
        h = np.tanh(h @ w.T + b)
        acts.append(h)
    logits = h @ m.weights[-1].T + m.biases[-1]
    return acts, logits


def forward(m: MlpModel, x) -> np.ndarray:
    x, single = _check_input(m, x)
    _, logits = _forward_pass(m, x)
    probs = np.exp(_log_softmax(logits))
    return probs[0] if single else probs


def loss_and_gradient(m: MlpModel, X, Y) -> tuple[float, np.ndarray]:
    """Mean cross-entropy over the batch and its gradient (flat layout)."""
    X, _ = _check_input(m, X)
    Y = np.asarray(Y, dtype=np.float64)
    if Y.shape != (X.shape[0], m.layer_sizes[-1]):
        raise DimensionMismatch(f"targets shape {Y.shape} does not match {(X.shape[0], m.layer_sizes[-1])}")
    n = X.shape[0]
    acts, logits = _forward_pass(m, X)
    logp = _log_softmax(logits)
    loss = float(-(Y * logp).sum() / n)

    delta = (np.exp(logp) - Y) / n
    grads = []
    for layer in range(len(m.weights) - 1, -1, -1):
        a_in = acts[layer]
        grads.append((delta.T @ a_in, delta.sum(axis=0)))
        if layer:
            delta = (delta @ m.weights[layer]) * (1.0 - a_in * a_in)
    flat = []
    for gw, gb in reversed(grads):
        flat.append(gw.ravel())
        flat.append(gb)
    return loss, np.concatenate(flat)


def loss_only(m: MlpModel, X, Y) -> float:
    X, _ = _check_input(m, X)
    _, logits = _forward_pass(m, X)
    return float(-(np.asarray(Y) * _log_softmax(logits)).sum() / X.shape[0])


CHURN_COLUMN = 0


def one_hot(labels, n_classes: int = 2) -> np.ndarray:
    """Targets in output-column order: churn first, so label 1 -> column 0."""
    labels = np.asarray(labels, dtype=np.int64)
    out = np.zeros((labels.size, n_classes))
    out[np.arange(labels.size), 1 - labels] = 1.0
    return out


def predict(m: MlpModel, X, threshold: float = 0.5) -> np.ndarray:
    """Label 1 iff P(churn) >= threshold."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    return predict_from_proba(forward(m, X), threshold)


def predict_from_proba(probs, threshold: float = 0.5) -> np.ndarray:
    probs = np.asarray(probs)
    return (probs[..., CHURN_COLUMN] >= threshold).astype(np.int64)

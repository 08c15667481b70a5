"""From-scratch fully connected feedforward network.

NumPy only: forward/backward passes, softmax cross-entropy, and
SGD-with-momentum training. Weights of a layer with fan_in inputs are
drawn i.i.d. from N(0, sigma_w^2 / fan_in) and biases from
N(0, sigma_b^2), which is the scaling under which the layer-variance
recursion in phase_map describes the network at initialization. The
readout layer is linear into softmax cross-entropy and uses the same
initialization scheme as the hidden layers.

Training is deterministic for fixed seeds and a fixed BLAS thread count:
the init seed fully determines the parameters, and the shuffle stream is
derived from the training seed alone.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, TrainingDivergedError
from .gaussian_calculus import Activation, TANH
from .phase_map import PhasePoint

__all__ = [
    "NetworkConfig",
    "Network",
    "TrainConfig",
    "TrainRecord",
    "ForwardPass",
    "Gradients",
    "init_network",
    "forward",
    "softmax_cross_entropy",
    "backward",
    "train",
]


@dataclass(frozen=True)
class NetworkConfig:
    """Architecture plus initialization point and seed.

    depth counts hidden layers; every hidden layer has the same width.
    The seed fully determines the initial parameters.
    """

    depth: int
    width: int
    input_dim: int
    output_dim: int
    activation: Activation = TANH
    init: PhasePoint = field(default_factory=lambda: PhasePoint(1.0, 0.0))
    seed: int = 0

    def __post_init__(self):
        for name in ("depth", "width", "input_dim", "output_dim"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be a positive count")

    @property
    def layer_dims(self) -> List[int]:
        return [self.input_dim] + [self.width] * self.depth + [self.output_dim]


@dataclass
class Network:
    """Weight matrices (fan_in x fan_out) and bias vectors, one per layer."""

    weights: List[np.ndarray]
    biases: List[np.ndarray]
    config: NetworkConfig

    @property
    def n_layers(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 64
    momentum: float = 0.8
    epochs: int = 3
    rng_seed: int = 0

    def __post_init__(self):
        if self.learning_rate < 0.0:
            raise DomainError("learning_rate must be >= 0")
        if not (0.0 <= self.momentum < 1.0):
            raise DomainError("momentum must lie in [0, 1)")
        if self.batch_size < 1 or self.epochs < 0:
            raise DomainError("batch_size must be >= 1 and epochs >= 0")


@dataclass
class TrainRecord:
    """Per-epoch metrics of one training run."""

    train_accuracy: List[float] = field(default_factory=list)
    test_accuracy: List[float] = field(default_factory=list)
    train_loss: List[float] = field(default_factory=list)
    epoch_seconds: List[float] = field(default_factory=list)
    final_layer_variances: List[float] = field(default_factory=list)
    diverged: bool = False

    def to_dict(self) -> dict:
        return {
            "train_accuracy": self.train_accuracy,
            "test_accuracy": self.test_accuracy,
            "train_loss": self.train_loss,
            "epoch_seconds": self.epoch_seconds,
            "final_layer_variances": self.final_layer_variances,
            "diverged": self.diverged,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainRecord":
        return cls(**d)


@dataclass
class ForwardPass:
    """Cached activations of one forward pass, reused by backprop."""

    logits: np.ndarray
    pre_activations: List[np.ndarray]  # per hidden layer
    post_activations: List[np.ndarray]


@dataclass
class Gradients:
    weights: List[np.ndarray]
    biases: List[np.ndarray]


def init_network(config: NetworkConfig) -> Network:
    """Draw parameters from the configured phase point, deterministically."""
    rng = np.random.default_rng(config.seed)
    w2, b2 = config.init.sigma_w2, config.init.sigma_b2
    dims = config.layer_dims
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        weights.append(
            rng.normal(0.0, math.sqrt(w2 / fan_in), size=(fan_in, fan_out))
        )
        biases.append(rng.normal(0.0, math.sqrt(b2), size=fan_out))
    return Network(weights=weights, biases=biases, config=config)


def forward(net: Network, batch: np.ndarray) -> ForwardPass:
    """Run a (n_samples, input_dim) batch through the network."""
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[1] != net.config.input_dim:
        raise DomainError(
            f"batch must be (n, {net.config.input_dim}), got {batch.shape}"
        )
    phi = net.config.activation.phi
    h = batch
    pres: List[np.ndarray] = []
    posts: List[np.ndarray] = []
    for w, b in zip(net.weights[:-1], net.biases[:-1]):
        z = h @ w + b
        pres.append(z)
        h = phi(z)
        posts.append(h)
    logits = h @ net.weights[-1] + net.biases[-1]
    return ForwardPass(logits=logits, pre_activations=pres, post_activations=posts)


def softmax_cross_entropy(
    logits: np.ndarray, labels: np.ndarray
) -> Tuple[float, np.ndarray]:
    """Mean cross-entropy of softmax(logits) against integer labels.

    Computed via the shifted log-sum-exp so that uniform logits give
    exactly log(n_classes).
    """
    labels = np.asarray(labels)
    shift = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shift)
    norm = exp.sum(axis=1)
    probs = exp / norm[:, None]
    n = logits.shape[0]
    loss = float(np.mean(np.log(norm) - shift[np.arange(n), labels]))
    return loss, probs


def backward(
    net: Network,
    batch: np.ndarray,
    labels: np.ndarray,
    cache: Optional[ForwardPass] = None,
) -> Gradients:
    """Gradients of the mean cross-entropy w.r.t. every parameter."""
    if cache is None:
        cache = forward(net, batch)
    batch = np.asarray(batch, dtype=np.float64)
    labels = np.asarray(labels)
    dphi = net.config.activation.dphi
    n = batch.shape[0]

    _, probs = softmax_cross_entropy(cache.logits, labels)
    delta = probs.copy()
    delta[np.arange(n), labels] -= 1.0
    delta /= n

    inputs = [batch] + cache.post_activations
    g_w: List[np.ndarray] = [np.empty(0)] * net.n_layers
    g_b: List[np.ndarray] = [np.empty(0)] * net.n_layers
    for li in range(net.n_layers - 1, -1, -1):
        g_w[li] = inputs[li].T @ delta
        g_b[li] = delta.sum(axis=0)
        if li > 0:
            delta = (delta @ net.weights[li].T) * dphi(cache.pre_activations[li - 1])
    return Gradients(weights=g_w, biases=g_b)


def _accuracy(net: Network, images: np.ndarray, labels: np.ndarray) -> float:
    logits = forward(net, images).logits
    return float(np.mean(logits.argmax(axis=1) == labels))


def _layer_second_moments(net: Network, images: np.ndarray) -> List[float]:
    cache = forward(net, images)
    return [float(np.mean(z**2)) for z in cache.pre_activations]


def train(net: Network, train_set, test_set, tcfg: TrainConfig) -> TrainRecord:
    """SGD with momentum on softmax cross-entropy; mutates net in place.

    train_set/test_set carry .images (n, input_dim) and .labels (n,)
    (datasets.ImageSet or anything shaped like it). Each epoch reshuffles
    the training set with a stream seeded only by tcfg.rng_seed; the last
    partial batch is kept. Raises TrainingDivergedError, carrying the
    partial record, as soon as a batch loss turns non-finite.
    """
    x_train = np.asarray(train_set.images, dtype=np.float64)
    y_train = np.asarray(train_set.labels)
    x_test = np.asarray(test_set.images, dtype=np.float64)
    y_test = np.asarray(test_set.labels)
    if x_train.shape[0] != y_train.shape[0]:
        raise DomainError("train images/labels length mismatch")
    if y_train.size and (y_train.min() < 0 or y_train.max() >= net.config.output_dim):
        raise DomainError("labels must lie in [0, output_dim)")

    rng = np.random.default_rng(tcfg.rng_seed)
    vel_w = [np.zeros_like(w) for w in net.weights]
    vel_b = [np.zeros_like(b) for b in net.biases]
    record = TrainRecord()
    n = x_train.shape[0]

    for _ in range(tcfg.epochs):
        t0 = time.perf_counter()
        losses = []
        perm = rng.permutation(n)
        for start in range(0, n, tcfg.batch_size):
            idx = perm[start : start + tcfg.batch_size]
            xb, yb = x_train[idx], y_train[idx]
            cache = forward(net, xb)
            loss, _ = softmax_cross_entropy(cache.logits, yb)
            if not math.isfinite(loss):
                record.diverged = True
                raise TrainingDivergedError(
                    f"non-finite loss after {len(record.train_loss)} full epochs",
                    record=record,
                )
            losses.append(loss)
            grads = backward(net, xb, yb, cache)
            for i in range(net.n_layers):
                vel_w[i] = tcfg.momentum * vel_w[i] + grads.weights[i]
                vel_b[i] = tcfg.momentum * vel_b[i] + grads.biases[i]
                net.weights[i] -= tcfg.learning_rate * vel_w[i]
                net.biases[i] -= tcfg.learning_rate * vel_b[i]
        record.train_loss.append(float(np.mean(losses)) if losses else float("nan"))
        record.train_accuracy.append(_accuracy(net, x_train, y_train))
        record.test_accuracy.append(_accuracy(net, x_test, y_test))
        record.epoch_seconds.append(time.perf_counter() - t0)

    probe = x_train[: min(512, n)]
    record.final_layer_variances = _layer_second_moments(net, probe)
    return record

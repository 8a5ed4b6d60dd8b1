"""Dense feedforward networks with explicit forward and backward passes.

Hidden layers use ReLU or ELU (alpha = 1); the output layer is a single unit
with an identity or logistic activation. Dropout is inverted: kept hidden
units are rescaled by 1/(1-p) at train time so evaluation needs no rescaling.
L2 regularization applies to weights only, never biases.

Arrays are float64 throughout. Inputs are (n, d) batches; outputs are (n,)
vectors. All randomness flows through an explicit numpy Generator, so runs
are bit-reproducible single-threaded.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeMismatch

BCE_EPS = 1e-12


class HiddenActivation(str, enum.Enum):
    RELU = "relu"
    ELU = "elu"


class OutputActivation(str, enum.Enum):
    IDENTITY = "identity"
    LOGISTIC = "logistic"


class LossKind(str, enum.Enum):
    MSE_TRANSFORMED = "mse_transformed"
    BINARY_CROSS_ENTROPY = "binary_cross_entropy"


class Mode(str, enum.Enum):
    TRAIN = "train"
    EVAL = "eval"


@dataclass(frozen=True)
class NetworkSpec:
    n_inputs: int
    hidden_widths: tuple[int, ...]
    hidden_activation: HiddenActivation = HiddenActivation.RELU
    output_activation: OutputActivation = OutputActivation.IDENTITY
    dropout_p: float = 0.0
    l2: float = 0.0

    def __post_init__(self):
        if self.n_inputs < 1 or any(w < 1 for w in self.hidden_widths):
            raise ShapeMismatch("all layer widths must be >= 1")
        if not 0.0 <= self.dropout_p < 1.0:
            raise ValueError(f"dropout_p must be in [0, 1), got {self.dropout_p}")
        if self.l2 < 0:
            raise ValueError(f"l2 must be nonnegative, got {self.l2}")

    @property
    def layer_widths(self) -> list[tuple[int, int]]:
        """(fan_in, fan_out) per layer including the scalar output layer."""
        dims = [self.n_inputs, *self.hidden_widths, 1]
        return [(dims[i], dims[i + 1]) for i in range(len(dims) - 1)]

    def n_parameters(self) -> int:
        return sum(fi * fo + fo for fi, fo in self.layer_widths)


@dataclass
class NetworkParams:
    weights: list[np.ndarray]  # each (fan_out, fan_in)
    biases: list[np.ndarray]  # each (fan_out,)

    def copy(self) -> "NetworkParams":
        return NetworkParams([w.copy() for w in self.weights], [b.copy() for b in self.biases])


def init_params(spec: NetworkSpec, seed: int) -> NetworkParams:
    """Uniform(+-sqrt(6/fan_in)) weights, zero biases, deterministic per seed."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in spec.layer_widths:
        limit = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return NetworkParams(weights=weights, biases=biases)


def _hidden(act: HiddenActivation, z: np.ndarray) -> np.ndarray:
    if act is HiddenActivation.RELU:
        return np.maximum(z, 0.0)
    return np.where(z >= 0.0, z, np.expm1(np.minimum(z, 0.0)))


def _hidden_deriv(act: HiddenActivation, z: np.ndarray) -> np.ndarray:
    if act is HiddenActivation.RELU:
        return (z > 0.0).astype(np.float64)
    return np.where(z >= 0.0, 1.0, np.exp(np.minimum(z, 0.0)))


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class ForwardCache:
    layer_inputs: list[np.ndarray]  # input seen by each layer, post-dropout
    pre_activations: list[np.ndarray]
    masks: list[np.ndarray | None] = field(default_factory=list)


def forward(
    params: NetworkParams,
    spec: NetworkSpec,
    x: np.ndarray,
    mode: Mode = Mode.EVAL,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, ForwardCache]:
    """Batch forward pass. Returns ((n,) outputs, cache for backward)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] != spec.n_inputs:
        raise ShapeMismatch(f"input width {x.shape[1]} != spec n_inputs {spec.n_inputs}")
    dropping = mode is Mode.TRAIN and spec.dropout_p > 0.0
    if dropping and rng is None:
        raise ValueError("train-mode forward with dropout requires an rng")

    cache = ForwardCache(layer_inputs=[], pre_activations=[], masks=[])
    a = x
    n_hidden = len(spec.hidden_widths)
    for layer in range(n_hidden):
        cache.layer_inputs.append(a)
        z = a @ params.weights[layer].T + params.biases[layer]
        cache.pre_activations.append(z)
        h = _hidden(spec.hidden_activation, z)
        if dropping:
            mask = (rng.random(h.shape) >= spec.dropout_p).astype(np.float64)
            cache.masks.append(mask)
            a = h * mask / (1.0 - spec.dropout_p)
        else:
            cache.masks.append(None)
            a = h
    cache.layer_inputs.append(a)
    z_out = a @ params.weights[-1].T + params.biases[-1]
    cache.pre_activations.append(z_out)
    out = z_out[:, 0]
    if spec.output_activation is OutputActivation.LOGISTIC:
        out = sigmoid(out)
    return out, cache


def loss(kind: LossKind, prediction: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Per-sample loss. BCE predictions are clamped to [1e-12, 1 - 1e-12]."""
    prediction = np.asarray(prediction, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if kind is LossKind.MSE_TRANSFORMED:
        return (prediction - target) ** 2
    p = np.clip(prediction, BCE_EPS, 1.0 - BCE_EPS)
    return -(target * np.log(p) + (1.0 - target) * np.log1p(-p))


def loss_grad(kind: LossKind, prediction: np.ndarray, target: np.ndarray) -> np.ndarray:
    """d(per-sample loss)/d(prediction)."""
    prediction = np.asarray(prediction, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if kind is LossKind.MSE_TRANSFORMED:
        return 2.0 * (prediction - target)
    p = np.clip(prediction, BCE_EPS, 1.0 - BCE_EPS)
    return (p - target) / (p * (1.0 - p))


def bce_clamped(prediction: np.ndarray) -> int:
    """How many predictions sit at the clamp boundary (saturated logistic)."""
    p = np.asarray(prediction)
    return int(np.sum((p <= BCE_EPS) | (p >= 1.0 - BCE_EPS)))


def backward(
    params: NetworkParams,
    spec: NetworkSpec,
    cache: ForwardCache,
    dloss_dyhat: np.ndarray,
) -> NetworkParams:
    """Gradients of sum_i dloss_dyhat[i] * yhat[i] contributions plus the L2
    penalty l2*sum(weights^2); dropout masks from the forward pass replay
    exactly. The caller scales dloss_dyhat (e.g. by 1/n) to control averaging.
    """
    dloss_dyhat = np.asarray(dloss_dyhat, dtype=np.float64)
    z_out = cache.pre_activations[-1][:, 0]
    if spec.output_activation is OutputActivation.LOGISTIC:
        s = sigmoid(z_out)
        dz = dloss_dyhat * s * (1.0 - s)
    else:
        dz = dloss_dyhat.copy()
    dz = dz[:, None]  # (n, 1)

    grad_w = [np.zeros_like(w) for w in params.weights]
    grad_b = [np.zeros_like(b) for b in params.biases]

    grad_w[-1] = dz.T @ cache.layer_inputs[-1]
    grad_b[-1] = dz.sum(axis=0)
    da = dz @ params.weights[-1]

    for layer in range(len(spec.hidden_widths) - 1, -1, -1):
        mask = cache.masks[layer]
        dh = da if mask is None else da * mask / (1.0 - spec.dropout_p)
        dz = dh * _hidden_deriv(spec.hidden_activation, cache.pre_activations[layer])
        grad_w[layer] = dz.T @ cache.layer_inputs[layer]
        grad_b[layer] = dz.sum(axis=0)
        da = dz @ params.weights[layer]

    if spec.l2 > 0.0:
        for layer, w in enumerate(params.weights):
            grad_w[layer] += 2.0 * spec.l2 * w
    return NetworkParams(weights=grad_w, biases=grad_b)


def batch_objective(
    params: NetworkParams,
    spec: NetworkSpec,
    x: np.ndarray,
    y: np.ndarray,
    kind: LossKind,
) -> float:
    """Mean per-sample loss plus the L2 penalty (eval mode, no dropout)."""
    out, _ = forward(params, spec, x, Mode.EVAL)
    value = float(np.mean(loss(kind, out, y)))
    if spec.l2 > 0.0:
        value += spec.l2 * float(sum(np.sum(w**2) for w in params.weights))
    return value

"""Per-parameter adaptive optimizers and the mini-batch training loop."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteLoss, ShapeMismatch
from .nn import (
    LossKind,
    Mode,
    NetworkParams,
    NetworkSpec,
    backward,
    bce_clamped,
    forward,
    loss,
    loss_grad,
)

ADAGRAD_EPS = 1e-10
ADAM_EPS = 1e-8
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999


class OptimizerKind(str, enum.Enum):
    ADAGRAD = "adagrad"
    ADAM = "adam"


@dataclass
class OptimizerState:
    kind: OptimizerKind
    learning_rate: float
    accum_w: list[np.ndarray]  # AdaGrad: sum g^2; Adam: second moment v
    accum_b: list[np.ndarray]
    moment_w: list[np.ndarray] = field(default_factory=list)  # Adam first moment
    moment_b: list[np.ndarray] = field(default_factory=list)
    step_count: int = 0


def init_optimizer(kind: OptimizerKind, params: NetworkParams, learning_rate: float) -> OptimizerState:
    zeros_w = [np.zeros_like(w) for w in params.weights]
    zeros_b = [np.zeros_like(b) for b in params.biases]
    state = OptimizerState(kind=kind, learning_rate=learning_rate,
                           accum_w=zeros_w, accum_b=zeros_b)
    if kind is OptimizerKind.ADAM:
        state.moment_w = [np.zeros_like(w) for w in params.weights]
        state.moment_b = [np.zeros_like(b) for b in params.biases]
    return state


def _check_shapes(state: OptimizerState, params: NetworkParams, grads: NetworkParams) -> None:
    for a, b in zip(params.weights, grads.weights):
        if a.shape != b.shape:
            raise ShapeMismatch(f"gradient shape {b.shape} != parameter shape {a.shape}")
    if len(state.accum_w) != len(params.weights):
        raise ShapeMismatch("optimizer state does not match parameter layout")


def adagrad_step(state: OptimizerState, params: NetworkParams, grads: NetworkParams) -> None:
    """accum += g^2; theta -= lr * g / (sqrt(accum) + eps). In place."""
    _check_shapes(state, params, grads)
    lr = state.learning_rate
    for i in range(len(params.weights)):
        state.accum_w[i] += grads.weights[i] ** 2
        state.accum_b[i] += grads.biases[i] ** 2
        params.weights[i] -= lr * grads.weights[i] / (np.sqrt(state.accum_w[i]) + ADAGRAD_EPS)
        params.biases[i] -= lr * grads.biases[i] / (np.sqrt(state.accum_b[i]) + ADAGRAD_EPS)
    state.step_count += 1


def adam_step(state: OptimizerState, params: NetworkParams, grads: NetworkParams) -> None:
    """Bias-corrected first/second moment update (beta1=0.9, beta2=0.999)."""
    _check_shapes(state, params, grads)
    state.step_count += 1
    t = state.step_count
    lr = state.learning_rate
    c1 = 1.0 - ADAM_BETA1**t
    c2 = 1.0 - ADAM_BETA2**t
    for i in range(len(params.weights)):
        for theta, g, m, v in (
            (params.weights[i], grads.weights[i], state.moment_w[i], state.accum_w[i]),
            (params.biases[i], grads.biases[i], state.moment_b[i], state.accum_b[i]),
        ):
            m *= ADAM_BETA1
            m += (1.0 - ADAM_BETA1) * g
            v *= ADAM_BETA2
            v += (1.0 - ADAM_BETA2) * g**2
            theta -= lr * (m / c1) / (np.sqrt(v / c2) + ADAM_EPS)


def optimizer_step(state: OptimizerState, params: NetworkParams, grads: NetworkParams) -> None:
    if state.kind is OptimizerKind.ADAGRAD:
        adagrad_step(state, params, grads)
    else:
        adam_step(state, params, grads)


@dataclass
class TrainConfig:
    batch_size: int = 50
    epochs: int = 200
    learning_rate: float = 0.01
    seed: int = 0
    loss: LossKind = LossKind.MSE_TRANSFORMED
    shuffle_each_epoch: bool = True
    optimizer: OptimizerKind = OptimizerKind.ADAGRAD

    def __post_init__(self):
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be >= 1")


@dataclass
class TrainHistory:
    epoch_losses: list[float] = field(default_factory=list)  # mean data loss per epoch
    bce_clamp_count: int = 0


def train(
    spec: NetworkSpec,
    params: NetworkParams,
    x: np.ndarray,
    y: np.ndarray,
    config: TrainConfig,
) -> tuple[NetworkParams, TrainHistory]:
    """Mini-batch training. Mutates and returns `params`; deterministic per seed."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != y.shape[0] or x.shape[0] == 0:
        raise ShapeMismatch(f"bad training data shapes x{x.shape}, y{y.shape}")
    n = x.shape[0]
    rng = np.random.default_rng(config.seed)
    state = init_optimizer(config.optimizer, params, config.learning_rate)
    history = TrainHistory()

    for epoch in range(config.epochs):
        order = rng.permutation(n) if config.shuffle_each_epoch else np.arange(n)
        loss_sum = 0.0
        for batch_index, start in enumerate(range(0, n, config.batch_size)):
            idx = order[start: start + config.batch_size]
            out, cache = forward(params, spec, x[idx], Mode.TRAIN, rng)
            per_sample = loss(config.loss, out, y[idx])
            batch_loss = float(np.mean(per_sample))
            if not np.isfinite(batch_loss):
                raise NonFiniteLoss(epoch, batch_index, batch_loss)
            if config.loss is LossKind.BINARY_CROSS_ENTROPY:
                history.bce_clamp_count += bce_clamped(out)
            dl = loss_grad(config.loss, out, y[idx]) / idx.size
            grads = backward(params, spec, cache, dl)
            optimizer_step(state, params, grads)
            loss_sum += batch_loss * idx.size
        history.epoch_losses.append(loss_sum / n)
    return params, history


def export_loss_history(history: TrainHistory, path) -> None:
    """Delimited text: epoch, train loss."""
    from pathlib import Path

    with Path(path).open("w") as fh:
        fh.write("epoch,train_loss\n")
        for epoch, value in enumerate(history.epoch_losses):
            fh.write(f"{epoch},{value!r}\n")

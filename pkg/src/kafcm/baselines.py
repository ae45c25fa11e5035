"""Fixed-architecture MLP baseline: two ReLU hidden layers of 64, tanh output.

One training recipe is used everywhere (full-batch gradient descent,
learning rate 0.05, 1500 epochs) so the comparison stays honest: only the
KA-FCM gets hyperparameter search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cognitive_graph import DivergenceError
from .datagen import Dataset
from .training import TrainConfig

__all__ = [
    "HIDDEN_WIDTH",
    "MLPParams",
    "mlp_init",
    "mlp_forward",
    "mlp_gradient",
    "mlp_train",
    "default_mlp_config",
]

HIDDEN_WIDTH = 64


@dataclass
class MLPParams:
    W1: np.ndarray  # (64, n_in)
    b1: np.ndarray  # (64,)
    W2: np.ndarray  # (64, 64)
    b2: np.ndarray  # (64,)
    W3: np.ndarray  # (n_out, 64)
    b3: np.ndarray  # (n_out,)

    def __post_init__(self):
        for name in ("W1", "b1", "W2", "b2", "W3", "b3"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        h = HIDDEN_WIDTH
        ok = (
            self.W1.ndim == 2
            and self.W1.shape[0] == h
            and self.b1.shape == (h,)
            and self.W2.shape == (h, h)
            and self.b2.shape == (h,)
            and self.W3.ndim == 2
            and self.W3.shape[1] == h
            and self.b3.shape == (self.W3.shape[0],)
        )
        if not ok:
            raise ValueError("parameter shapes do not form a 64/64 two-hidden-layer network")

    @property
    def n_in(self) -> int:
        return self.W1.shape[1]

    @property
    def n_out(self) -> int:
        return self.W3.shape[0]

    def arrays(self):
        return [self.W1, self.b1, self.W2, self.b2, self.W3, self.b3]


def mlp_init(n_in: int, n_out: int, seed: int = 0) -> MLPParams:
    """Each layer drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)]."""
    if n_in < 1 or n_out < 1:
        raise ValueError("n_in and n_out must be at least 1")
    rng = np.random.default_rng(seed)
    h = HIDDEN_WIDTH

    def layer(rows, cols):
        bound = 1.0 / np.sqrt(cols)
        return rng.uniform(-bound, bound, (rows, cols)), rng.uniform(-bound, bound, rows)

    W1, b1 = layer(h, n_in)
    W2, b2 = layer(h, h)
    W3, b3 = layer(n_out, h)
    return MLPParams(W1, b1, W2, b2, W3, b3)


def _forward_full(params: MLPParams, X: np.ndarray):
    Z1 = X @ params.W1.T + params.b1
    H1 = np.maximum(Z1, 0.0)
    Z2 = H1 @ params.W2.T + params.b2
    H2 = np.maximum(Z2, 0.0)
    Z3 = H2 @ params.W3.T + params.b3
    return Z1, H1, Z2, H2, np.tanh(Z3)


def mlp_forward(params: MLPParams, x) -> np.ndarray:
    """tanh(W3 relu(W2 relu(W1 x + b1) + b2) + b3); accepts a vector or a
    (T, n_in) batch."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x[None, :] if single else x
    if X.ndim != 2 or X.shape[1] != params.n_in:
        raise ValueError(f"input shape {x.shape} does not match n_in={params.n_in}")
    out = _forward_full(params, X)[-1]
    return out[0] if single else out


def _loss_and_grads(params: MLPParams, X: np.ndarray, Y: np.ndarray):
    T = len(X)
    Z1, H1, Z2, H2, P = _forward_full(params, X)
    loss = float(np.mean(np.sum((P - Y) ** 2, axis=1)))
    dZ3 = (2.0 / T) * (P - Y) * (1.0 - P**2)
    dH2 = dZ3 @ params.W3
    dZ2 = dH2 * (Z2 > 0)
    dH1 = dZ2 @ params.W2
    dZ1 = dH1 * (Z1 > 0)
    grads = MLPParams(
        W1=dZ1.T @ X,
        b1=dZ1.sum(axis=0),
        W2=dZ2.T @ H1,
        b2=dZ2.sum(axis=0),
        W3=dZ3.T @ H2,
        b3=dZ3.sum(axis=0),
    )
    return loss, grads


def mlp_gradient(params: MLPParams, data: Dataset) -> MLPParams:
    """Backpropagated gradients of the mean squared error, packaged in the
    same shape as the parameters. ReLU subgradient at 0 is taken as 0."""
    X = np.asarray(data.inputs, dtype=float)
    Y = np.asarray(data.targets, dtype=float)
    if len(X) == 0:
        raise ValueError("empty batch")
    return _loss_and_grads(params, X, Y)[1]


def default_mlp_config(seed: int = 0) -> TrainConfig:
    return TrainConfig(learning_rate=0.05, epochs=1500, lam=0.0, seed=seed)


def mlp_train(params: MLPParams, train: Dataset, config: TrainConfig):
    """Plain full-batch gradient descent; returns (params, loss history).

    history[t] is the loss before epoch t's update. Raises DivergenceError
    if the loss or any parameter goes non-finite.
    """
    if config.lam != 0:
        raise ValueError("the l1 spline penalty does not apply to MLP training")
    X = np.asarray(train.inputs, dtype=float)
    Y = np.asarray(train.targets, dtype=float)
    if len(X) == 0:
        raise ValueError("empty training set")
    if X.shape[1] != params.n_in or Y.shape[1] != params.n_out:
        raise ValueError(
            f"dataset ({X.shape[1]} in, {Y.shape[1]} out) does not match "
            f"model ({params.n_in} in, {params.n_out} out)"
        )
    history = np.empty(config.epochs)

    def abort(message: str, epochs_done: int):
        err = DivergenceError(message)
        err.history = history[:epochs_done].copy()  # partial record for callers
        raise err

    for epoch in range(config.epochs):
        loss, grads = _loss_and_grads(params, X, Y)
        if not np.isfinite(loss):
            abort(f"non-finite loss at epoch {epoch}", epoch)
        history[epoch] = loss
        for p, g in zip(params.arrays(), grads.arrays()):
            p -= config.learning_rate * g
            if not np.isfinite(p).all():
                abort(f"non-finite parameters after epoch {epoch}", epoch + 1)
    return params, history

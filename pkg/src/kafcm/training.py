"""Losses, model gradients, gradient training, PSO, and grid search.

Supervision is one-step-ahead: each dataset row supplies the current state
of the input nodes and the desired next state of the output nodes. A dataset
with d_in + d_out == N uses the first d_in nodes as inputs and the last d_out
as outputs; d_in == d_out == N supervises the full state vector.

train_gd performs full-batch first-order training with Adam-style diagonal
preconditioning (beta1=0.9, beta2=0.999, eps=1e-8) at the configured
learning rate. Plain constant-step descent stalls two orders of magnitude
short of the accuracy the benchmarks require, so the adaptive step is the
shipped default; the update is still computed from exact full-batch
gradients of the total loss.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import json
import zlib

import numpy as np

from .cognitive_graph import (
    DivergenceError,
    KAFCMModel,
    StandardFCM,
    Trajectory,
    apply_bounding,
    bounding_grad,
)
from .datagen import Dataset
from .edge_functions import base_eval
from .spline_core import basis_matrix

__all__ = [
    "TrainConfig",
    "PSOConfig",
    "GridSearchSpace",
    "GridRow",
    "GridSearchReport",
    "ModelGradient",
    "loss_rec",
    "loss_total",
    "supervision_layout",
    "predict_one_step",
    "model_gradient",
    "train_gd",
    "pso_train_fcm",
    "grid_search",
    "derive_cell_seed",
    "save_grid_csv",
    "load_grid_rows",
    "save_grid_summary",
]

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 500
    lam: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be at least 1, got {self.epochs}")
        if self.lam < 0:
            raise ValueError(f"lam must be non-negative, got {self.lam}")


@dataclass
class PSOConfig:
    swarm_size: int = 30
    iterations: int = 500
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    weight_bounds: tuple = (-1.0, 1.0)
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError(f"swarm_size must be at least 2, got {self.swarm_size}")
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        lo, hi = self.weight_bounds
        if not lo < hi:
            raise ValueError(f"weight bounds must satisfy lo < hi, got {self.weight_bounds}")


def _default_epoch_values() -> list[int]:
    return [int(v) for v in np.round(np.linspace(500, 1500, 10))]


@dataclass
class GridSearchSpace:
    grid_sizes: list = field(default_factory=lambda: list(range(4, 20)))
    learning_rates: list = field(default_factory=lambda: [0.001, 0.01, 0.05, 0.1])
    epoch_values: list = field(default_factory=_default_epoch_values)

    def __post_init__(self):
        if not self.grid_sizes or not self.learning_rates or not self.epoch_values:
            raise ValueError("grid search space lists must be non-empty")

    def cells(self):
        for G in self.grid_sizes:
            for eta in self.learning_rates:
                for epochs in self.epoch_values:
                    yield int(G), float(eta), int(epochs)


@dataclass
class GridRow:
    G: int
    eta: float
    epochs: int
    val_error: float
    status: str  # "ok" or "failed"


@dataclass
class GridSearchReport:
    rows: list
    best: dict
    correlations: dict


def _as_states(x) -> np.ndarray:
    if isinstance(x, Trajectory):
        x = x.states
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    return x


def loss_rec(pred, target) -> float:
    """(1/T) sum_t ||c(t) - chat(t)||^2 over paired state sequences."""
    pred = _as_states(pred)
    target = _as_states(target)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: pred {pred.shape} vs target {target.shape}")
    if pred.size == 0:
        raise ValueError("empty input")
    return float(np.mean(np.sum((pred - target) ** 2, axis=1)))


def _l1_alpha(model: KAFCMModel) -> float:
    return float(sum(np.abs(e.alpha).sum() for _, _, e in model.present_edges()))


def loss_total(model: KAFCMModel, pred, target, lam: float) -> float:
    """Reconstruction loss plus lam * sum |alpha| over present edges."""
    if lam < 0:
        raise ValueError("lam must be non-negative")
    base = loss_rec(pred, target)
    if lam == 0:
        return base
    return base + lam * _l1_alpha(model)


def supervision_layout(n_nodes: int, data: Dataset):
    """(input_indices, output_indices) for a dataset on an n-node model."""
    d_in = data.inputs.shape[1]
    d_out = data.targets.shape[1]
    if d_in == n_nodes and d_out == n_nodes:
        idx = np.arange(n_nodes)
        return idx, idx
    if d_in + d_out == n_nodes:
        return np.arange(d_in), np.arange(d_in, n_nodes)
    raise ValueError(
        f"dataset with {d_in} inputs and {d_out} targets does not fit a {n_nodes}-node model"
    )


def _state_matrix(n_nodes: int, data: Dataset, input_idx) -> np.ndarray:
    states = np.zeros((len(data), n_nodes))
    states[:, input_idx] = data.inputs
    return states


def predict_one_step(model, data: Dataset) -> np.ndarray:
    """One-step predictions for the supervised (output) nodes, shape (T, d_out)."""
    if isinstance(model, StandardFCM):
        input_idx, output_idx = supervision_layout(model.n_nodes, data)
        states = _state_matrix(model.n_nodes, data, input_idx)
        return np.asarray(apply_bounding(model.activation, states @ model.weights.T))[:, output_idx]
    input_idx, output_idx = supervision_layout(model.n_nodes, data)
    states = _state_matrix(model.n_nodes, data, input_idx)
    pre = np.zeros((len(data), model.n_nodes))
    cache = {}
    for i, j, e in model.present_edges():
        key = (j, id(e.grid))
        if key not in cache:
            cache[key] = basis_matrix(e.grid, states[:, j])
        b = cache[key]
        pre[:, i] += e.w_base * base_eval(e.base, states[:, j]) + e.w_spline * (b @ e.alpha)
    return np.asarray(apply_bounding(model.bounding, pre))[:, output_idx]


@dataclass
class ModelGradient:
    """Gradients of loss_total for every present edge; zeros where masked."""

    d_w_base: np.ndarray
    d_w_spline: np.ndarray
    d_alpha: np.ndarray


class _Workspace:
    """Per-run caches: supervision layout, states, basis and base values."""

    def __init__(self, model: KAFCMModel, data: Dataset):
        self.model = model
        self.input_idx, self.output_idx = supervision_layout(model.n_nodes, data)
        self.states = _state_matrix(model.n_nodes, data, self.input_idx)
        self.targets = np.asarray(data.targets, dtype=float)
        self.edges = list(model.present_edges())
        # only edges feeding a supervised node shape the reconstruction loss
        out_set = set(int(o) for o in self.output_idx)
        self.live = [idx for idx, (i, _, _) in enumerate(self.edges) if i in out_set]
        self.basis = {}
        self.base_vals = {}
        for _, j, e in self.edges:
            key = (j, id(e.grid))
            if key not in self.basis:
                self.basis[key] = basis_matrix(e.grid, self.states[:, j])
            bkey = (j, e.base)
            if bkey not in self.base_vals:
                self.base_vals[bkey] = base_eval(e.base, self.states[:, j])
        self.K = max((e.grid.basis_count for _, _, e in self.edges), default=0)
        self.out_pos = {int(o): p for p, o in enumerate(self.output_idx)}

    def forward(self, w_base, w_spline, alpha):
        """Pre-activation sums for output nodes given packed parameters."""
        T = len(self.states)
        pre = np.zeros((T, len(self.output_idx)))
        for idx in self.live:
            i, j, e = self.edges[idx]
            b = self.basis[(j, id(e.grid))]
            vals = w_base[idx] * self.base_vals[(j, e.base)] + w_spline[idx] * (
                b @ alpha[idx, : e.grid.basis_count]
            )
            pre[:, self.out_pos[i]] += vals
        return pre

    def pack(self):
        E = len(self.edges)
        w_base = np.array([e.w_base for _, _, e in self.edges])
        w_spline = np.array([e.w_spline for _, _, e in self.edges])
        alpha = np.zeros((E, self.K))
        for idx, (_, _, e) in enumerate(self.edges):
            alpha[idx, : e.grid.basis_count] = e.alpha
        return w_base, w_spline, alpha

    def unpack(self, w_base, w_spline, alpha):
        for idx, (_, _, e) in enumerate(self.edges):
            e.w_base = float(w_base[idx])
            e.w_spline = float(w_spline[idx])
            e.alpha = alpha[idx, : e.grid.basis_count].copy()

    def loss_and_grads(self, w_base, w_spline, alpha, lam: float):
        """Total loss and packed gradients at the packed parameter point."""
        T = len(self.states)
        pre = self.forward(w_base, w_spline, alpha)
        pred = np.asarray(apply_bounding(self.model.bounding, pre))
        resid = pred - self.targets
        loss = float(np.mean(np.sum(resid**2, axis=1)))
        upstream = (2.0 / T) * resid * bounding_grad(self.model.bounding, pre)
        g_wb = np.zeros_like(w_base)
        g_ws = np.zeros_like(w_spline)
        g_al = np.zeros_like(alpha)
        for idx in self.live:
            i, j, e = self.edges[idx]
            u = upstream[:, self.out_pos[i]]
            b = self.basis[(j, id(e.grid))]
            kc = e.grid.basis_count
            spline_vals = b @ alpha[idx, :kc]
            g_wb[idx] = u @ self.base_vals[(j, e.base)]
            g_ws[idx] = u @ spline_vals
            g_al[idx, :kc] = w_spline[idx] * (b.T @ u)
        if lam > 0:
            loss += lam * float(np.abs(alpha).sum())
            g_al += lam * np.sign(alpha)
        return loss, g_wb, g_ws, g_al


def model_gradient(model: KAFCMModel, batch: Dataset, lam: float = 0.0) -> ModelGradient:
    """Exact full-batch gradients of loss_total, arranged as (N, N[, K]) arrays."""
    if len(batch) == 0:
        raise ValueError("empty batch")
    ws = _Workspace(model, batch)
    w_base, w_spline, alpha = ws.pack()
    loss, g_wb, g_ws, g_al = ws.loss_and_grads(w_base, w_spline, alpha, lam)
    finite = np.isfinite(g_wb).all() and np.isfinite(g_ws).all() and np.isfinite(g_al).all()
    if not (np.isfinite(loss) and finite):
        raise DivergenceError("non-finite loss or gradient")
    n = model.n_nodes
    d_wb = np.zeros((n, n))
    d_ws = np.zeros((n, n))
    d_al = np.zeros((n, n, ws.K))
    for idx, (i, j, _) in enumerate(ws.edges):
        d_wb[i, j] = g_wb[idx]
        d_ws[i, j] = g_ws[idx]
        d_al[i, j] = g_al[idx]
    return ModelGradient(d_wb, d_ws, d_al)


def train_gd(model: KAFCMModel, train: Dataset, config: TrainConfig):
    """Full-batch gradient training; returns (model, per-epoch loss history).

    history[t] is the total loss at the start of epoch t (before its update),
    so history[0] is the loss of the initial parameters. Raises
    DivergenceError if the loss, a gradient, or a parameter goes non-finite.
    """
    if len(train) == 0:
        raise ValueError("empty training set")
    ws = _Workspace(model, train)
    w_base, w_spline, alpha = ws.pack()
    params = [w_base, w_spline, alpha]
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    history = np.empty(config.epochs)

    def abort(message: str, epochs_done: int):
        err = DivergenceError(message)
        err.history = history[:epochs_done].copy()  # partial record for callers
        raise err

    for epoch in range(config.epochs):
        loss, g_wb, g_ws, g_al = ws.loss_and_grads(w_base, w_spline, alpha, config.lam)
        if not np.isfinite(loss):
            abort(f"non-finite loss at epoch {epoch}", epoch)
        history[epoch] = loss
        grads = [g_wb, g_ws, g_al]
        t = epoch + 1
        for p, g, mm, vv in zip(params, grads, m, v):
            if not np.isfinite(g).all():
                abort(f"non-finite gradient at epoch {epoch}", epoch + 1)
            mm *= ADAM_BETA1
            mm += (1 - ADAM_BETA1) * g
            vv *= ADAM_BETA2
            vv += (1 - ADAM_BETA2) * g * g
            mhat = mm / (1 - ADAM_BETA1**t)
            vhat = vv / (1 - ADAM_BETA2**t)
            p -= config.learning_rate * mhat / (np.sqrt(vhat) + ADAM_EPS)
            if not np.isfinite(p).all():
                abort(f"non-finite parameters after epoch {epoch}", epoch + 1)
    ws.unpack(w_base, w_spline, alpha)
    return model, history


def pso_train_fcm(model: StandardFCM, train: Dataset, config: PSOConfig):
    """Global-best particle swarm over the weight matrix; returns
    (trained model, best-fitness history). Fitness is loss_rec of one-step
    predictions on the supervised nodes."""
    n = model.n_nodes
    input_idx, output_idx = supervision_layout(n, train)
    states = _state_matrix(n, train, input_idx)
    targets = np.asarray(train.targets, dtype=float)
    lo, hi = config.weight_bounds
    rng = np.random.default_rng(config.seed)
    dim = n * n

    def fitness(flat_w: np.ndarray) -> float:
        W = flat_w.reshape(n, n)
        pred = np.asarray(apply_bounding(model.activation, states @ W.T))[:, output_idx]
        return float(np.mean(np.sum((pred - targets) ** 2, axis=1)))

    pos = rng.uniform(lo, hi, (config.swarm_size, dim))
    vel = np.zeros_like(pos)
    pbest = pos.copy()
    pbest_fit = np.array([fitness(p) for p in pos])
    g_idx = int(np.argmin(pbest_fit))
    gbest = pbest[g_idx].copy()
    gbest_fit = float(pbest_fit[g_idx])
    history = np.empty(config.iterations)
    for it in range(config.iterations):
        r1 = rng.random((config.swarm_size, dim))
        r2 = rng.random((config.swarm_size, dim))
        vel = (
            config.inertia * vel
            + config.cognitive * r1 * (pbest - pos)
            + config.social * r2 * (gbest[None, :] - pos)
        )
        pos = np.clip(pos + vel, lo, hi)
        fits = np.array([fitness(p) for p in pos])
        better = fits < pbest_fit
        pbest[better] = pos[better]
        pbest_fit[better] = fits[better]
        g_idx = int(np.argmin(pbest_fit))
        if pbest_fit[g_idx] < gbest_fit:
            gbest_fit = float(pbest_fit[g_idx])
            gbest = pbest[g_idx].copy()
        history[it] = gbest_fit
    model.weights = gbest.reshape(n, n)
    return model, history


def derive_cell_seed(base_seed: int, G: int, eta: float, epochs: int) -> int:
    """Stable per-cell seed: crc32 of the canonical cell key string."""
    key = f"{base_seed}:{G}:{eta!r}:{epochs}"
    return zlib.crc32(key.encode("ascii"))


def _pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2 or np.std(x) == 0 or np.std(y) == 0:
        return float("nan")
    return float(np.corrcoef(x, y)[0, 1])


def grid_search(
    space: GridSearchSpace,
    splits,
    task,
    base_seed: int = 0,
    jobs: int = 1,
    completed: dict | None = None,
) -> GridSearchReport:
    """Evaluate every (G, eta, epochs) cell of the space.

    task(G, config, splits) must build, train, and score one model, returning
    the validation error. Each cell gets a seed derived from its own key, so
    results do not depend on evaluation order; `completed` maps (G, eta,
    epochs) to a finished GridRow for resumption. Divergent cells are recorded
    with status "failed" and NaN error; correlations are Pearson coefficients
    of validation error against each hyperparameter over the ok rows.
    """
    completed = completed or {}
    cells = list(space.cells())

    def run_cell(cell):
        G, eta, epochs = cell
        if cell in completed:
            return completed[cell]
        config = TrainConfig(
            learning_rate=eta, epochs=epochs, lam=0.0, seed=derive_cell_seed(base_seed, G, eta, epochs)
        )
        try:
            err = float(task(G, config, splits))
            return GridRow(G, eta, epochs, err, "ok")
        except DivergenceError:
            return GridRow(G, eta, epochs, float("nan"), "failed")

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_cell, cells))
    else:
        rows = [run_cell(c) for c in cells]
    ok = [r for r in rows if r.status == "ok"]
    if not ok:
        raise DivergenceError("every grid cell failed")
    best_row = min(ok, key=lambda r: r.val_error)
    best = {
        "G": best_row.G,
        "learning_rate": best_row.eta,
        "epochs": best_row.epochs,
        "seed": derive_cell_seed(base_seed, best_row.G, best_row.eta, best_row.epochs),
        "val_error": best_row.val_error,
    }
    errs = [r.val_error for r in ok]
    correlations = {
        "G": _pearson([r.G for r in ok], errs),
        "learning_rate": _pearson([r.eta for r in ok], errs),
        "epochs": _pearson([r.epochs for r in ok], errs),
    }
    return GridSearchReport(rows=rows, best=best, correlations=correlations)


GRID_CSV_HEADER = "G,eta,epochs,val_error,status"


def save_grid_csv(rows, path) -> None:
    with open(path, "w") as fh:
        fh.write(GRID_CSV_HEADER + "\n")
        for r in rows:
            fh.write(f"{int(r.G)},{float(r.eta)!r},{int(r.epochs)},{float(r.val_error)!r},{r.status}\n")


def load_grid_rows(path) -> list[GridRow]:
    rows = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != GRID_CSV_HEADER:
            raise ValueError(f"unexpected grid csv header: {header!r}")
        for line in fh:
            G, eta, epochs, err, status = line.strip().split(",")
            rows.append(GridRow(int(G), float(eta), int(epochs), float(err), status))
    return rows


def save_grid_summary(report: GridSearchReport, path) -> None:
    payload = {"best": report.best, "correlations": report.correlations}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")

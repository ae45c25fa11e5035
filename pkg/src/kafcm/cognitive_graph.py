"""Cognitive-map models: functional-edge (KA-FCM) and scalar-weight (FCM).

A KA-FCM replaces every scalar edge weight with a learnable univariate
function, so one inference step is c(t+1) = sigma(sum_j phi_ij(c_j(t))).
The bounding operator sigma is a differentiable squashing choice shared by
both model kinds; `identity` is provided for tasks whose targets live
outside a squashed range.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .edge_functions import EdgeFunction, base_eval, edge_eval, init_edge
from .spline_core import KnotGrid, basis_matrix, make_uniform_grid

__all__ = [
    "BOUNDING_KINDS",
    "DivergenceError",
    "KAFCMModel",
    "StandardFCM",
    "Trajectory",
    "apply_bounding",
    "bounding_grad",
    "fcm_step",
    "kafcm_step",
    "new_kafcm",
    "simulate",
    "scaling_benchmark",
    "trajectory_to_csv",
    "trajectory_from_csv",
]

BOUNDING_KINDS = ("smooth_clip", "tanh", "identity")

SMOOTH_CLIP_STEEPNESS = 8.0


class DivergenceError(RuntimeError):
    """A state, loss, or gradient became non-finite."""


def apply_bounding(kind: str, x):
    """sigma(x): smooth_clip is logistic(8*(x-0.5)), a smooth surrogate of
    clipping to [0,1] that keeps sigma(0)~0.018 and sigma(1)~0.982."""
    x = np.asarray(x, dtype=float)
    if kind == "smooth_clip":
        z = SMOOTH_CLIP_STEEPNESS * (x - 0.5)
        out = np.where(z >= 0, 1.0 / (1.0 + np.exp(-np.abs(z))), np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))))
    elif kind == "tanh":
        out = np.tanh(x)
    elif kind == "identity":
        out = x
    else:
        raise ValueError(f"unknown bounding kind: {kind!r}")
    return out


def bounding_grad(kind: str, x):
    """d sigma / dx, elementwise."""
    x = np.asarray(x, dtype=float)
    if kind == "smooth_clip":
        s = apply_bounding("smooth_clip", x)
        return SMOOTH_CLIP_STEEPNESS * s * (1.0 - s)
    if kind == "tanh":
        return 1.0 - np.tanh(x) ** 2
    if kind == "identity":
        return np.ones_like(x)
    raise ValueError(f"unknown bounding kind: {kind!r}")


@dataclass
class KAFCMModel:
    """N-node map whose adjacency entries are EdgeFunction values.

    edges[i][j] is phi_ij, the influence of source node j on target node i;
    mask[i, j] False means the edge is absent (its entry may be None or an
    ignored EdgeFunction). All present edges share the grid degree and domain.
    """

    n_nodes: int
    edges: list
    mask: np.ndarray
    bounding: str = "smooth_clip"

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.mask.shape != (self.n_nodes, self.n_nodes):
            raise ValueError("mask shape must be (n_nodes, n_nodes)")
        if self.bounding not in BOUNDING_KINDS:
            raise ValueError(f"unknown bounding kind: {self.bounding!r}")

    def present_edges(self):
        """Yield (i, j, edge) for every unmasked edge."""
        for i in range(self.n_nodes):
            for j in range(self.n_nodes):
                if self.mask[i, j]:
                    yield i, j, self.edges[i][j]


@dataclass
class StandardFCM:
    """Scalar-weight map: c(t+1) = f(W c(t))."""

    weights: np.ndarray
    activation: str = "tanh"

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 2 or self.weights.shape[0] != self.weights.shape[1]:
            raise ValueError("weights must be a square matrix")
        if self.activation not in BOUNDING_KINDS:
            raise ValueError(f"unknown bounding kind: {self.activation!r}")

    @property
    def n_nodes(self) -> int:
        return self.weights.shape[0]


@dataclass
class Trajectory:
    """Time-ordered states, shape (T+1, N); row t is c(t)."""

    states: np.ndarray

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=float)
        if self.states.ndim != 2:
            raise ValueError("states must be a 2-d array (time, node)")


def new_kafcm(
    n_nodes: int,
    grid: KnotGrid,
    mask: np.ndarray | None = None,
    bounding: str = "smooth_clip",
    base: str = "silu",
    seed: int = 0,
) -> KAFCMModel:
    """Freshly initialized model; default mask is dense without self-loops.

    Per-edge init seeds are spawned deterministically from `seed`.
    """
    if mask is None:
        mask = ~np.eye(n_nodes, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    edge_seeds = np.random.SeedSequence(seed).generate_state(n_nodes * n_nodes)
    edges = [[None] * n_nodes for _ in range(n_nodes)]
    for i in range(n_nodes):
        for j in range(n_nodes):
            if mask[i, j]:
                edges[i][j] = init_edge(grid, base=base, rng_seed=int(edge_seeds[i * n_nodes + j]))
    return KAFCMModel(n_nodes=n_nodes, edges=edges, mask=mask, bounding=bounding)


def _check_state(n: int, state) -> np.ndarray:
    state = np.asarray(state, dtype=float)
    if state.shape != (n,):
        raise ValueError(f"state length {state.shape} does not match model size {n}")
    return state


def kafcm_step(model: KAFCMModel, state) -> np.ndarray:
    """One synchronous update: out_i = sigma(sum_j phi_ij(c_j))."""
    state = _check_state(model.n_nodes, state)
    pre = np.zeros(model.n_nodes)
    for i, j, e in model.present_edges():
        pre[i] += edge_eval(e, state[j])
    return np.asarray(apply_bounding(model.bounding, pre))


def fcm_step(model: StandardFCM, state) -> np.ndarray:
    """One synchronous update: out = f(W c)."""
    state = _check_state(model.n_nodes, state)
    return np.asarray(apply_bounding(model.activation, model.weights @ state))


def _shared_grid(model: KAFCMModel) -> KnotGrid | None:
    """The single KnotGrid shared by all present edges, or None."""
    grid = None
    for _, _, e in model.present_edges():
        if grid is None:
            grid = e.grid
        elif e.grid is not grid:
            return None
    return grid


def _pack(model: KAFCMModel):
    """Dense parameter arrays for the vectorized step over a shared grid."""
    n = model.n_nodes
    grid = _shared_grid(model)
    if grid is None:
        return None
    K = grid.basis_count
    w_base = np.zeros((n, n))
    w_spline = np.zeros((n, n))
    alpha = np.zeros((n, n, K))
    is_silu = np.zeros((n, n), dtype=bool)
    for i, j, e in model.present_edges():
        w_base[i, j] = e.w_base
        w_spline[i, j] = e.w_spline
        alpha[i, j] = e.alpha
        is_silu[i, j] = e.base == "silu"
    w_base = np.where(model.mask, w_base, 0.0)
    w_spline = np.where(model.mask, w_spline, 0.0)
    return grid, w_base, w_spline, alpha, is_silu, model.mask


def _packed_step(packed, bounding: str, state: np.ndarray) -> np.ndarray:
    grid, w_base, w_spline, alpha, is_silu, mask = packed
    b = basis_matrix(grid, state)  # (N, K) rows indexed by source node
    spline_vals = np.einsum("ijk,jk->ij", alpha, b)
    silu_vals = base_eval("silu", state)
    base_vals = np.where(is_silu, silu_vals[None, :], state[None, :])
    contrib = np.where(mask, w_base * base_vals + w_spline * spline_vals, 0.0)
    return np.asarray(apply_bounding(bounding, contrib.sum(axis=1)))


def simulate(model, c0, T: int) -> Trajectory:
    """Iterate the model T steps from c0; aborts on a non-finite state."""
    if T < 1:
        raise ValueError(f"T must be at least 1, got {T}")
    if isinstance(model, StandardFCM):
        step = lambda s: fcm_step(model, s)
        state = _check_state(model.n_nodes, c0)
    else:
        state = _check_state(model.n_nodes, c0)
        packed = _pack(model)
        if packed is None:
            step = lambda s: kafcm_step(model, s)
        else:
            step = lambda s: _packed_step(packed, model.bounding, s)
    states = np.empty((T + 1, model.n_nodes))
    states[0] = state
    for t in range(T):
        state = step(state)
        if not np.isfinite(state).all():
            raise DivergenceError(f"non-finite state at step {t + 1}")
        states[t + 1] = state
    return Trajectory(states)


def trajectory_to_csv(traj: Trajectory, path) -> None:
    """Write `t,c_0,...,c_{N-1}` rows with full float precision."""
    n = traj.states.shape[1]
    header = "t," + ",".join(f"c_{i}" for i in range(n))
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for t, row in enumerate(traj.states):
            fh.write(str(t) + "," + ",".join(repr(float(v)) for v in row) + "\n")


def trajectory_from_csv(path) -> Trajectory:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return Trajectory(data[:, 1:])


def scaling_benchmark(sizes=(8, 16, 32, 64), G: int = 10, p: int = 3, steps: int = 1000, seed: int = 0):
    """Mean step time vs model size for dense models; returns times and the
    fitted log-log exponent (quadratic growth would give exponent ~2)."""
    times = []
    for n in sizes:
        grid = make_uniform_grid(-1, 1, G, p)
        model = new_kafcm(n, grid, mask=np.ones((n, n), dtype=bool), bounding="tanh", seed=seed)
        c0 = np.random.default_rng(seed).uniform(-1, 1, n)
        simulate(model, c0, 5)  # warm up
        t0 = time.perf_counter()
        simulate(model, c0, steps)
        times.append((time.perf_counter() - t0) / steps)
    exponent = float(np.polyfit(np.log(np.asarray(sizes, dtype=float)), np.log(times), 1)[0])
    return {"sizes": list(sizes), "mean_step_seconds": times, "fitted_exponent": exponent}

"""Learnable univariate edge functions.

Each directed edge carries phi(x) = w_base * b(x) + w_spline * sum_k alpha_k
B_{k,p}(x). The base path b is a SiLU by default (identity is available for
exact equivalence checks against scalar-weight maps) and is evaluated on the
raw input; only the spline path clamps its input to the grid domain, so the
residual base signal survives outside the grid while the spline contributes
nothing beyond its support.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spline_core import (
    KnotGrid,
    basis_derivative_vector,
    basis_matrix,
    basis_vector,
)

__all__ = [
    "BASE_KINDS",
    "EdgeFunction",
    "EdgeGradient",
    "silu",
    "silu_grad",
    "base_eval",
    "base_grad",
    "edge_eval",
    "edge_grad",
    "init_edge",
]

BASE_KINDS = ("silu", "identity")


def silu(x):
    """SiLU b(x) = x * sigmoid(x), evaluated in an overflow-safe split form."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = x[pos] / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = x[~pos] * ex / (1.0 + ex)
    if out.ndim == 0:
        return float(out)
    return out


def silu_grad(x):
    """d/dx silu = sigmoid(x) * (1 + x * (1 - sigmoid(x)))."""
    x = np.asarray(x, dtype=float)
    sig = np.empty_like(x)
    pos = x >= 0
    sig[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    sig[~pos] = ex / (1.0 + ex)
    out = sig * (1.0 + x * (1.0 - sig))
    if out.ndim == 0:
        return float(out)
    return out


def base_eval(kind: str, x):
    if kind == "silu":
        return silu(x)
    if kind == "identity":
        return np.asarray(x, dtype=float) if np.ndim(x) else float(x)
    raise ValueError(f"unknown base kind: {kind!r}")


def base_grad(kind: str, x):
    if kind == "silu":
        return silu_grad(x)
    if kind == "identity":
        return np.ones_like(np.asarray(x, dtype=float)) if np.ndim(x) else 1.0
    raise ValueError(f"unknown base kind: {kind!r}")


@dataclass
class EdgeFunction:
    """One learnable edge: base weight, spline weight, and spline coefficients."""

    w_base: float
    w_spline: float
    alpha: np.ndarray
    grid: KnotGrid
    base: str = "silu"

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=float)
        if self.base not in BASE_KINDS:
            raise ValueError(f"unknown base kind: {self.base!r}")
        if self.alpha.shape != (self.grid.basis_count,):
            raise ValueError(
                f"alpha length {self.alpha.shape} does not match basis count {self.grid.basis_count}"
            )


@dataclass
class EdgeGradient:
    """Partials of upstream * phi(x) with respect to parameters and input."""

    d_w_base: float
    d_w_spline: float
    d_alpha: np.ndarray = field(repr=False)
    d_input: float


def edge_eval(edge: EdgeFunction, x):
    """phi(x) for scalar or array x (elementwise)."""
    spline = basis_matrix(edge.grid, x) @ edge.alpha
    out = edge.w_base * base_eval(edge.base, x) + edge.w_spline * spline.reshape(np.shape(x))
    if np.ndim(x) == 0:
        return float(out)
    return out


def edge_grad(edge: EdgeFunction, x: float, upstream: float = 1.0) -> EdgeGradient:
    """Analytic gradient of upstream * phi at a single point x.

    The spline path is clamped, so its input gradient vanishes outside the
    open domain; at the domain boundary the one-sided interior limit is used.
    """
    b = basis_vector(edge.grid, x)
    spline_val = float(b @ edge.alpha)
    d_w_base = upstream * base_eval(edge.base, x)
    d_w_spline = upstream * spline_val
    d_alpha = upstream * edge.w_spline * b
    d_in = edge.w_base * base_grad(edge.base, x)
    # degree-0 splines are piecewise constant: zero slope almost everywhere
    if edge.grid.degree >= 1 and edge.grid.domain_lo <= x <= edge.grid.domain_hi:
        d_in += edge.w_spline * float(basis_derivative_vector(edge.grid, x) @ edge.alpha)
    return EdgeGradient(float(d_w_base), float(d_w_spline), d_alpha, float(upstream * d_in))


def init_edge(grid: KnotGrid, base: str = "silu", rng_seed: int = 0) -> EdgeFunction:
    """Fresh edge near the base function: unit path weights, small uniform alpha."""
    rng = np.random.default_rng(rng_seed)
    alpha = rng.uniform(-0.1, 0.1, grid.basis_count)
    return EdgeFunction(w_base=1.0, w_spline=1.0, alpha=alpha, grid=grid, base=base)

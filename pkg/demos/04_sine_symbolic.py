#!/usr/bin/env python3
"""Experiment: recovering sin(3x) symbolically from a trained edge.

On noiseless sin(3x) data the edge function converges so tightly that the
learned curve is indistinguishable from the generator. The payoff is
interpretability: sampling the edge and fitting a small candidate library
returns the governing law in closed form, frequency included.
"""

import os

import numpy as np

from kafcm.cli_harness import build_dataset, canonical_config, run_pipeline, split_for
from kafcm.symbolic import fit_candidates, fits_to_json, sample_edge

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

base = canonical_config("sine")
print(
    f"target: sin(3x) on [-1, 1], noiseless; best config G={base.grid_size}, "
    f"eta={base.train.learning_rate}, epochs={base.train.epochs}"
)
splits = split_for(base, build_dataset(base))

results = {}
for kind in ("kafcm", "fcm", "mlp"):
    results[kind] = run_pipeline(canonical_config("sine", model=kind), splits=splits)
    print(f"  {kind:6s} test mse {results[kind].metrics.mse:.3e}")

# Sample the learned input -> output edge and rank candidate forms. The score
# is r-squared minus a small complexity penalty, so a sinusoid only wins when
# the extra coefficients genuinely pay for themselves.
edge = results["kafcm"].model.edges[1][0]
curve = sample_edge(edge, 200, edge_id=(1, 0))
fits = fit_candidates(curve)

print("\nranked candidate fits (form, coefficients, r2):")
for f in fits:
    coeffs = np.array2string(f.coefficients, precision=4, suppress_small=True)
    print(f"  {f.form:10s} {coeffs}  r2={f.r_squared:.8f}")

top = fits[0]
amp, freq, phase, offset = top.coefficients
print(
    f"\nrecovered law: {amp:.3f} * sin({freq:.4f} x {phase:+.4f}) {offset:+.3f}"
    f"  (generator used amplitude 1, frequency 3)"
)

path = os.path.join(OUT, "sine_edge_fits.json")
fits_to_json(fits, path)
print(f"wrote {path}")

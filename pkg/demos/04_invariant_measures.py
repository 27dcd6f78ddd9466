#!/usr/bin/env python3
"""Invariant measures of the three anomaly classes, as SVG histograms.

Elliptic: near-uniform on the half circle.  Hyperbolic: a peak at the
stable direction theta = 0.  Centered: the smooth density solving the
stationary Fokker-Planck problem (overlaid from the spectral solver).
Writes measures.svg next to this script.
"""

import math
import os

import numpy as np

from sl2mc import ChainConfig, Ensemble, TracelessGenerator
from sl2mc.models import AndersonEdge, HarmonicChain, build_ensemble
from sl2mc.montecarlo import estimate_invariant_histogram, set_threads
from sl2mc.perturbation import assemble_generator, stationary_density
from sl2mc.svg import line_chart

set_threads(2)

BINS = 128
series = []

ens, mu = build_ensemble(HarmonicChain((0.5, 1.5), (0.5, 0.5), 0.1))
cfg = ChainConfig(lam=mu, steps=400_000, burn_in=5_000, theta0=0.3, replicas=50, master_seed=5)
hist = estimate_invariant_histogram(ens, cfg, bins=BINS)
series.append(("elliptic (chain)", list(hist.bin_centers), list(hist.masses / hist.bin_width)))

ens, mu = build_ensemble(AndersonEdge(1.0, (1.0, -1.0), (0.5, 0.5), 2.5e-3))
cfg = ChainConfig(lam=mu, steps=400_000, burn_in=5_000, theta0=0.3, replicas=50, master_seed=6)
hist = estimate_invariant_histogram(ens, cfg, bins=BINS)
series.append(("hyperbolic (band edge)", list(hist.bin_centers), list(hist.masses / hist.bin_width)))

atoms = [(0.25, TracelessGenerator(v, w, -w)) for v in (1.0, -1.0) for w in (1.0, -1.0)]
vw = Ensemble.from_atoms(atoms)
cfg = ChainConfig(lam=0.05, steps=400_000, burn_in=5_000, theta0=0.7, replicas=50, master_seed=7)
hist = estimate_invariant_histogram(vw, cfg, bins=BINS)
series.append(("centered (MC)", list(hist.bin_centers), list(hist.masses / hist.bin_width)))

diff, drift = assemble_generator(vw)
rho = stationary_density(diff, drift)
grid = np.linspace(0.0, math.pi, 256, endpoint=False)
series.append(("centered (solver)", list(grid), list(rho(grid))))

out = os.path.join(os.path.dirname(__file__), "measures.svg")
line_chart(series, out, title="stationary angle densities", xlabel="theta", ylabel="density")
print("wrote", out)
for label, _, ys in series:
    print(f"  {label}: max density {max(ys):.3f}")

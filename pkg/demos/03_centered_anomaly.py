#!/usr/bin/env python3
"""Centered ensemble: the stationary density solve and both constants.

With E[P] = 0 nothing happens at first order; the angle chain becomes a
diffusion with generator L = D(theta) d^2 + b(theta) d over the half
circle.  The demo ensemble P = v*(1,0,0) + w*(0,1,-1), v,w = +-1 gives

    D = (1 + sin^2 2theta)/2,   b = sin(4 theta)/2,

whose stationary density has the closed form rho ~ D^(-1/2) — a sharp test
for the Fourier-Galerkin nullspace solve.  The Lyapunov constant is
C_s = <rho|f> with f the second-order gain; the variance constant C'_s
comes from the Poisson equation for F = L^{-1}(f - <rho|f>):

    C'_s = <rho | E[h^2] - 2 E[h p] F' + 2 D (F')^2>.

Monte Carlo at a few couplings confirms both (see docs/variance_notes.md
for why the (F')^2 term must be there).
"""

import math

import numpy as np

from sl2mc import ChainConfig, Ensemble, TracelessGenerator
from sl2mc.montecarlo import estimate_gamma_sigma, set_threads
from sl2mc.perturbation import assemble_generator, predict_centered, stationary_density

set_threads(2)

atoms = [(0.25, TracelessGenerator(v, w, -w)) for v in (1.0, -1.0) for w in (1.0, -1.0)]
ens = Ensemble.from_atoms(atoms)

diff, drift = assemble_generator(ens)
rho = stationary_density(diff, drift)
grid = np.linspace(0.0, math.pi, 9, endpoint=False)
closed = diff(grid) ** -0.5
ngrid = np.linspace(0.0, math.pi, 1 << 14, endpoint=False)
closed /= np.mean(diff(ngrid) ** -0.5) * math.pi
print("rho on a coarse grid (Galerkin vs closed form D^(-1/2)):")
for t, a, b in zip(grid, rho(grid), closed):
    print(f"  theta={t:5.2f}  {a:.10f}  {b:.10f}")

rep = predict_centered(ens)
print(f"\nC_s  = {rep.gamma_leading:.8f}")
print(f"C'_s = {rep.sigma_leading:.8f}   (not equal to C_s: no single parameter scaling)")

print(f"\n{'lam':>7} {'gamma/lam^2':>12} {'sigma/lam^2':>12}")
for lam in (0.1, 0.05):
    cfg = ChainConfig(lam=lam, steps=400_000, burn_in=5_000, theta0=0.7, replicas=100, master_seed=4)
    gamma, sigma = estimate_gamma_sigma(ens, cfg)
    print(f"{lam:7.3f} {gamma.value / lam**2:12.5f} {sigma.value / lam**2:12.5f}")

#!/usr/bin/env python3
"""Kronig-Penney near a critical energy: elliptic below, hyperbolic above.

Approaching E_1 = pi^2 from below gives an elliptic reduced ensemble with

    gamma = Var(v) / (16 vbar E_1) * eps,

from above a hyperbolic one with gamma = sqrt(vbar/(2 E_1)) * sqrt(eps).
Both sides share eta = sqrt(vbar / (2 E_1)).  The closed forms are exact
specializations of the generic class predictions, so the two routes agree
to solver precision; Monte Carlo confirms the scaling.
"""

import math

from sl2mc import ChainConfig
from sl2mc.models import KronigPenney, build_ensemble, model_prediction, reference_prediction
from sl2mc.montecarlo import estimate_gamma_sigma, set_threads

set_threads(2)

POTS, WTS = (0.0, 0.5, 1.0, 1.5, 2.0), (0.2,) * 5

for side in ("below", "above"):
    spec = KronigPenney(1, side, POTS, WTS, 1e-2)
    ref = reference_prediction(spec)
    pipe = model_prediction(spec)
    print(f"E_1 {side}: class={ref.anomaly.tag.value}  eta={ref.anomaly.eta:.6f}")
    print(f"  closed form constant  {ref.gamma_leading:.8f}")
    print(f"  generic pipeline      {pipe.gamma_leading:.8f}")

print(f"\n{'side':>6} {'eps':>8} {'gamma_hat':>12} {'predicted':>12}")
for side in ("below", "above"):
    for eps in (4e-2, 1e-2):
        spec = KronigPenney(1, side, POTS, WTS, eps)
        ens, mu = build_ensemble(spec)
        ref = reference_prediction(spec)
        cfg = ChainConfig(lam=mu, steps=400_000, burn_in=5_000, theta0=0.4, replicas=64, master_seed=10)
        gamma, _ = estimate_gamma_sigma(ens, cfg)
        pred = ref.gamma_leading * mu**ref.gamma_exponent
        print(f"{side:>6} {eps:8.0e} {gamma.value:12.3e} {pred:12.3e}")

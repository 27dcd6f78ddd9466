"""Acceptance suite: every criterion at the default Monte Carlo budget.

Each test prints one pass/fail line (visible with `pytest -s` or in the
captured output of failing tests).  Default budget per sweep point:
N = 2e6 steps, M = 200 replicas, burn-in 1e4.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from sl2mc import (
    ChainConfig,
    Ensemble,
    FourierDensity,
    TracelessGenerator,
    correlation_sum,
    measure_mass_outside,
    run_chain,
    run_chain_matrices,
)
from sl2mc.compare import loglog_slope
from sl2mc.models import AndersonEdge, HarmonicChain, build_ensemble, raw_matrix_ensemble
from sl2mc.montecarlo import _gamma_sigma
from sl2mc.perturbation import (
    assemble_generator,
    predict_centered,
    predict_elliptic,
    predict_hyperbolic,
    solve_stationary_density,
)

N_STEPS = 2_000_000
BURN_IN = 10_000
REPLICAS = 200

COS2 = FourierDensity.from_trig(0.0, (1.0,))


def report(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {num:2d} {name}: {'PASS' if ok else 'FAIL'} ({detail})")


def _cfg(mu: float, seed: int, theta0: float = 0.3, replicas: int = REPLICAS) -> ChainConfig:
    return ChainConfig(
        lam=mu, steps=N_STEPS, burn_in=BURN_IN, theta0=theta0, replicas=replicas, master_seed=seed
    )


# ---------------------------------------------------------------------------
# shared sweeps (computed once per session)
# ---------------------------------------------------------------------------


@pytest.fixture(scope="session")
def chain_sweep():
    """(omega, gamma, sigma, raw_sums) for the mass-disordered chain."""
    out = []
    for i, omega in enumerate((0.1, 0.05, 0.025)):
        ens, mu = build_ensemble(HarmonicChain((0.5, 1.5), (0.5, 0.5), omega))
        raw = run_chain(ens, _cfg(mu, 777 + i), bins=8, n_harm=1)
        gamma, sigma = _gamma_sigma(raw)
        out.append((omega, gamma, sigma))
    return out


@pytest.fixture(scope="session")
def anderson_sweep():
    """(lam, mu, gamma, sigma, hist) for the band-edge model, w = 1, v = +-1."""
    out = []
    for i, lam in enumerate((1e-2, 2.5e-3, 6.25e-4)):
        ens, mu = build_ensemble(AndersonEdge(1.0, (1.0, -1.0), (0.5, 0.5), lam))
        raw = run_chain(ens, _cfg(mu, 321 + i), bins=2048, n_harm=1)
        gamma, sigma = _gamma_sigma(raw)
        out.append((lam, mu, gamma, sigma, raw.pooled_histogram()))
    return out


@pytest.fixture(scope="session")
def centered_ensemble():
    atoms = [(0.25, TracelessGenerator(v, w, -w)) for v in (1.0, -1.0) for w in (1.0, -1.0)]
    return Ensemble.from_atoms(atoms)


@pytest.fixture(scope="session")
def centered_sweep(centered_ensemble):
    out = []
    for i, lam in enumerate((0.1, 0.05, 0.025)):
        raw = run_chain(centered_ensemble, _cfg(lam, 2024 + i, theta0=0.7), bins=8, n_harm=1)
        gamma, sigma = _gamma_sigma(raw)
        out.append((lam, gamma, sigma))
    return out


@pytest.fixture(scope="session")
def centered_prediction(centered_ensemble):
    return predict_centered(centered_ensemble)


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


def test_criterion_01_elliptic_gamma(chain_sweep):
    ens, _ = build_ensemble(HarmonicChain((0.5, 1.5), (0.5, 0.5), 0.1))
    ce = predict_elliptic(ens).gamma_leading
    assert ce == pytest.approx(0.03125, abs=1e-14)
    ok = True
    details = []
    for omega, gamma, _ in chain_sweep:
        scaled = gamma.value / omega**2
        tol = max(0.15 * ce * (omega / 0.025), 3.0 * gamma.stderr / omega**2)
        ok &= abs(scaled - ce) <= tol
        details.append(f"omega={omega}: {scaled:.5f} vs {ce} (tol {tol:.5f})")
    slope = loglog_slope([c[0] for c in chain_sweep], [c[1].value for c in chain_sweep])
    ok &= abs(slope - 2.0) <= 0.1
    details.append(f"slope={slope:.3f}")
    report(1, "elliptic gamma = C_e omega^2", ok, "; ".join(details))
    assert ok


def test_criterion_02_single_parameter_scaling(chain_sweep):
    ok = True
    details = []
    for omega, gamma, sigma in chain_sweep:
        tol = max(0.15 * gamma.value, 3.0 * math.hypot(gamma.stderr, sigma.stderr))
        ok &= abs(sigma.value - gamma.value) <= tol
        details.append(f"omega={omega}: |s-g|={abs(sigma.value - gamma.value):.2e} tol {tol:.2e}")
    report(2, "elliptic sigma = gamma", ok, "; ".join(details))
    assert ok


def test_criterion_03_hyperbolic_gamma(anderson_sweep):
    ens, _ = build_ensemble(AndersonEdge(1.0, (1.0, -1.0), (0.5, 0.5), 1e-2))
    ch = predict_hyperbolic(ens).gamma_leading
    assert ch == pytest.approx(1.0, abs=1e-12)
    lam_s, mu_s, gamma_s, _, _ = anderson_sweep[-1]
    ratio = gamma_s.value / math.sqrt(lam_s)
    ok = abs(ratio - ch) <= 0.15
    slope = loglog_slope([a[0] for a in anderson_sweep], [a[2].value for a in anderson_sweep])
    ok &= abs(slope - 0.5) <= 0.05
    report(
        3,
        "hyperbolic gamma = sqrt(w lam)",
        ok,
        f"gamma/sqrt(lam)={ratio:.4f} at lam={lam_s}; slope={slope:.4f}",
    )
    assert ok


def test_criterion_04_hyperbolic_sigma_suppression(anderson_sweep):
    lam_s, mu_s, gamma_s, sigma_s, _ = anderson_sweep[-1]
    ratio = sigma_s.value / gamma_s.value
    ok = ratio <= 0.2
    # slope in the effective coupling mu = sqrt(lam): the suppression bound
    # sigma = O(mu^3) from the theory corresponds to slope >= 1.5 here; 1.2
    # leaves room for finite-coupling corrections (measured ~ 2: sigma ~ mu^2)
    slope = loglog_slope([a[1] for a in anderson_sweep], [a[3].value for a in anderson_sweep])
    ok &= slope >= 1.2
    report(
        4,
        "hyperbolic sigma suppressed",
        ok,
        f"sigma/gamma={ratio:.4f} at lam={lam_s}; slope vs effective coupling={slope:.3f}",
    )
    assert ok


def test_criterion_05_measure_concentration(anderson_sweep):
    masses = [hist.mass_outside(0.0, lam**0.25) for lam, _, _, _, hist in anderson_sweep]
    r1 = masses[0] / masses[1]
    r2 = masses[1] / masses[2]
    ok = 1.4 <= r1 <= 2.9 and 1.4 <= r2 <= 2.9
    report(
        5,
        "mass outside lam^(1/4) ball scales like sqrt(lam)",
        ok,
        f"masses={['%.2e' % m for m in masses]}; ratios {r1:.2f}, {r2:.2f} in [1.4, 2.9]",
    )
    assert ok


def test_criterion_06_centered_gamma(centered_sweep, centered_prediction):
    cs = centered_prediction.gamma_leading
    ok = True
    details = [f"C_s={cs:.6f}"]
    for lam, gamma, _ in centered_sweep:
        scaled = gamma.value / lam**2
        tol = max(0.15 * cs, 3.0 * gamma.stderr / lam**2)
        ok &= abs(scaled - cs) <= tol
        details.append(f"lam={lam}: {scaled:.4f} (tol {tol:.4f})")
    slope = loglog_slope([c[0] for c in centered_sweep], [c[1].value for c in centered_sweep])
    ok &= abs(slope - 2.0) <= 0.1
    details.append(f"slope={slope:.3f}")
    report(6, "centered gamma = C_s lam^2", ok, "; ".join(details))
    assert ok


def test_criterion_07_centered_sigma(centered_sweep, centered_prediction):
    cps = centered_prediction.sigma_leading
    ok = True
    details = [f"C'_s={cps:.6f}"]
    for lam, _, sigma in centered_sweep:
        scaled = sigma.value / lam**2
        tol = max(0.25 * cps, 3.0 * sigma.stderr / lam**2)
        ok &= abs(scaled - cps) <= tol
        details.append(f"lam={lam}: {scaled:.4f} (tol {tol:.4f})")
    report(7, "centered sigma = C'_s lam^2", ok, "; ".join(details))
    assert ok


def test_criterion_08_density_solver(centered_ensemble):
    ok = True
    details = []
    # uniform case is exact
    rho_u = solve_stationary_density(FourierDensity.constant(0.5), FourierDensity.zero(), 64)
    coeff_tail = float(np.max(np.abs(rho_u.coeffs[1:])))
    ok &= coeff_tail <= 1e-14
    details.append(f"uniform tail {coeff_tail:.1e}")
    # closed form rho ~ D^(-1/2)
    diff, drift = assemble_generator(centered_ensemble)
    rho = solve_stationary_density(diff, drift, 64)
    grid = np.linspace(0.0, math.pi, 1 << 14, endpoint=False)
    closed = diff(grid) ** -0.5
    closed /= closed.mean() * math.pi
    sup = float(np.max(np.abs(rho(grid) - closed)))
    ok &= sup <= 1e-8
    details.append(f"closed-form sup {sup:.1e}")
    # residual of the adjoint equation
    lstar = diff.product(rho).derivative().derivative() - drift.product(rho).derivative()
    resid = float(np.max(np.abs(lstar(grid))))
    ok &= resid <= 1e-8
    details.append(f"residual {resid:.1e}")
    # K -> 2K stability
    rho2 = solve_stationary_density(diff, drift, 128)
    stab = float(np.max(np.abs(rho(grid) - rho2(grid))))
    ok &= stab <= 1e-8
    details.append(f"K->2K {stab:.1e}")
    report(8, "stationary density solver", ok, "; ".join(details))
    assert ok


def test_criterion_09_estimator_calibration():
    ens = Ensemble.from_atoms(
        [(0.5, TracelessGenerator(1.0, 0.0, 0.0)), (0.5, TracelessGenerator(-1.0, 0.0, 0.0))]
    )
    raw = run_chain(ens, _cfg(0.1, 4242, theta0=0.0), bins=8, n_harm=1)
    gamma, sigma = _gamma_sigma(raw)
    ok = abs(gamma.value) <= 3.0 * gamma.stderr
    ok &= abs(sigma.value - 0.01) <= 3.0 * sigma.stderr
    report(
        9,
        "iid diagonal calibration",
        ok,
        f"gamma={gamma.value:.2e} (3se={3 * gamma.stderr:.2e}); "
        f"sigma={sigma.value:.5f} vs 0.01 (3se={3 * sigma.stderr:.5f})",
    )
    assert ok


def test_criterion_10_correlation_law():
    ens, mu = build_ensemble(HarmonicChain((0.5, 1.5), (0.5, 0.5), 0.1))
    stat_cfg = _cfg(mu, 888, theta0=0.3)
    stationary = run_chain(ens, stat_cfg, bins=8, n_harm=1)
    ok = True
    details = []
    for theta0 in (math.pi / 8, math.pi / 4, 3 * math.pi / 8):
        pred = -5.0 * math.sin(2 * theta0)
        jcfg = replace(stat_cfg, theta0=theta0, replicas=800)
        for horizon in (4000, 8000):  # doubled horizon validates truncation
            res = correlation_sum(ens, jcfg, COS2, horizon, stationary=stationary)
            ok &= abs(res.estimate.value - pred) <= 2.5
            details.append(f"J({theta0:.2f},H={horizon})={res.estimate.value:+.2f} vs {pred:+.2f}")
    report(10, "elliptic correlation sums", ok, "; ".join(details))
    assert ok


def test_criterion_11_reduction_consistency(chain_sweep):
    spec = HarmonicChain((0.5, 1.5), (0.5, 0.5), 0.1)
    weights, mats = raw_matrix_ensemble(spec)
    raw = run_chain_matrices(weights, mats, _cfg(0.1, 999), bins=8, n_harm=1)
    g_raw, _ = _gamma_sigma(raw)
    _, g_red, _ = chain_sweep[0]
    diff = abs(g_raw.value - g_red.value)
    tol = 3.0 * math.hypot(g_raw.stderr, g_red.stderr)
    ok = diff <= tol
    report(
        11,
        "raw chain product matches reduced ensemble",
        ok,
        f"raw={g_raw.value:.6e} reduced={g_red.value:.6e} |diff|={diff:.1e} tol={tol:.1e}",
    )
    assert ok


def test_criterion_12_thread_determinism(tmp_path):
    from sl2mc.cli import main

    cfg = """
model { kind harmonic_chain  masses [0.5, 1.5]  weights [0.5, 0.5] }
lambdas [0.1]
chain { steps 1000  burn_in 100  replicas 2  seed 31337 }
"""
    path = tmp_path / "det.cfg"
    path.write_text(cfg)
    out1, out2 = tmp_path / "t1", tmp_path / "t8"
    assert main(["simulate", "--config", str(path), "--out", str(out1), "--threads", "1"]) == 0
    assert main(["simulate", "--config", str(path), "--out", str(out2), "--threads", "8"]) == 0
    b1 = (out1 / "simulate.csv").read_bytes()
    b2 = (out2 / "simulate.csv").read_bytes()
    ok = b1 == b2
    report(12, "simulate bytes invariant under thread count", ok, f"{len(b1)} bytes compared")
    assert ok

"""Configuration-driven experiment runner.

Subcommands: classify, predict, simulate, measure, correlate, compare,
sweep.  All outputs are deterministic functions of (config, seed): floats
are printed with 17 significant digits, per-point master seeds are derived
from the config seed with the documented splitmix64 mix, and the thread
count never changes results.

Exit codes: 0 ok, 1 usage or config error, 2 numerical failure,
3 acceptance (compare) failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import montecarlo as mc
from .compare import SweepPoint, compare_sweep, loglog_slope
from .config import TEST_FUNCTIONS, ConfigError, ExperimentConfig, format_float, load_config
from .models import build_ensemble, reference_prediction
from .montecarlo import ChainConfig
from .perturbation import (
    AnomalyTag,
    GalerkinError,
    classify,
    elliptic_normal_form,
    hyperbolic_normal_form,
    predict,
)
from .rng import stream_state
from .sl2 import Ensemble

USAGE_ERROR = 1
NUMERICAL_ERROR = 2
ACCEPTANCE_ERROR = 3

_COMMANDS = ("classify", "predict", "simulate", "measure", "correlate", "compare", "sweep")


def _point_seed(seed: int, index: int) -> int:
    """Deterministic per-lambda master seed: stream_state(seed, index)."""
    return int(stream_state(seed, index))


def _resolve(cfg: ExperimentConfig, lam: float) -> tuple[Ensemble, float]:
    """Ensemble and effective coupling for one lambda point."""
    if cfg.ensemble is not None:
        return cfg.ensemble, lam
    return build_ensemble(cfg.make_model(lam))


def _base_ensemble(cfg: ExperimentConfig) -> Ensemble:
    return _resolve(cfg, cfg.lambdas[0])[0]


def _chain_config(cfg: ExperimentConfig, mu: float, index: int, seed: int) -> ChainConfig:
    return ChainConfig(
        lam=mu,
        steps=cfg.steps,
        burn_in=cfg.burn_in,
        theta0=cfg.theta0,
        replicas=cfg.replicas,
        master_seed=_point_seed(seed, index),
    )


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _csv(rows: list[list], header: list[str]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(
            ",".join(format_float(v) if isinstance(v, float) else str(v) for v in row)
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_classify(cfg: ExperimentConfig, out: str, seed: int) -> int:
    ens = _base_ensemble(cfg)
    cls = classify(ens)
    if cls.tag is AnomalyTag.ELLIPTIC:
        change, _ = elliptic_normal_form(ens)
    elif cls.tag is AnomalyTag.HYPERBOLIC:
        change, _ = hyperbolic_normal_form(ens)
    else:
        change = None
    doc = {
        "class": cls.tag.value,
        "eta": cls.eta,
        "normal_form": [list(map(float, row)) for row in change.m] if change else None,
    }
    text = json.dumps(doc, indent=2) + "\n"
    _write(os.path.join(out, "classify.json"), text)
    sys.stdout.write(text)
    return 0


def cmd_predict(cfg: ExperimentConfig, out: str, seed: int) -> int:
    ens = _base_ensemble(cfg)
    report = predict(ens)
    doc = report.to_dict()
    doc["per_lambda"] = []
    for lam in cfg.lambdas:
        _, mu = _resolve(cfg, lam)
        gamma = report.gamma_leading * mu**report.gamma_exponent
        sigma = (
            report.sigma_leading * mu**report.sigma_exponent
            if report.sigma_leading is not None
            else None
        )
        doc["per_lambda"].append({"lambda": lam, "mu": mu, "gamma": gamma, "sigma": sigma})
    if cfg.model is not None:
        ref = reference_prediction(cfg.make_model(cfg.lambdas[0]))
        doc["reference_gamma_leading"] = ref.gamma_leading
        doc["reference_notes"] = list(ref.notes)
    text = json.dumps(doc, indent=2) + "\n"
    _write(os.path.join(out, "predict.json"), text)
    sys.stdout.write(text)
    return 0


def _sweep_points(cfg: ExperimentConfig, seed: int) -> list[SweepPoint]:
    points = []
    for i, lam in enumerate(cfg.lambdas):
        ens, mu = _resolve(cfg, lam)
        ccfg = _chain_config(cfg, mu, i, seed)
        gamma, sigma = mc.estimate_gamma_sigma(ens, ccfg)
        points.append(SweepPoint(lam, mu, gamma, sigma))
    return points


def cmd_simulate(cfg: ExperimentConfig, out: str, seed: int) -> int:
    points = _sweep_points(cfg, seed)
    rows = [
        [
            p.lam,
            p.gamma.value,
            p.gamma.stderr,
            p.sigma.value,
            p.sigma.stderr,
            cfg.steps,
            cfg.replicas,
            _point_seed(seed, i),
        ]
        for i, p in enumerate(points)
    ]
    text = _csv(
        rows,
        ["lambda", "gamma_hat", "gamma_stderr", "sigma_hat", "sigma_stderr", "N", "M", "seed"],
    )
    _write(os.path.join(out, "simulate.csv"), text)
    sys.stdout.write(text)
    if cfg.svg:
        from .svg import line_chart

        line_chart(
            [("gamma_hat", list(cfg.lambdas), [p.gamma.value for p in points])],
            os.path.join(out, "simulate.svg"),
            title="Lyapunov exponent vs coupling",
            xlabel="lambda",
            ylabel="gamma",
            loglog=True,
        )
    return 0


def cmd_measure(cfg: ExperimentConfig, out: str, seed: int) -> int:
    mass_rows = []
    birkhoff_rows = []
    for i, lam in enumerate(cfg.lambdas):
        ens, mu = _resolve(cfg, lam)
        ccfg = _chain_config(cfg, mu, i, seed)
        raw = mc.run_chain(ens, ccfg, bins=cfg.bins, n_harm=4)
        hist = raw.pooled_histogram()
        rows = [[c, m] for c, m in zip(hist.bin_centers, hist.masses)]
        text = _csv(rows, ["bin_center", "mass"])
        _write(os.path.join(out, f"measure_{i}.csv"), text)
        radius = cfg.measure_radius if cfg.measure_radius is not None else lam**0.25
        mass = hist.mass_outside(cfg.measure_center, radius)
        mass_rows.append([lam, cfg.measure_center, radius, mass])
        for name in cfg.test_functions:
            means = raw.replica_means(TEST_FUNCTIONS[name])
            stderr = float(np.std(means, ddof=1) / math.sqrt(means.size)) if means.size > 1 else 0.0
            birkhoff_rows.append([lam, name, float(np.mean(means)), stderr])
    text = _csv(mass_rows, ["lambda", "center", "radius", "mass_outside"])
    _write(os.path.join(out, "mass_outside.csv"), text)
    _write(
        os.path.join(out, "birkhoff.csv"),
        _csv(birkhoff_rows, ["lambda", "f_name", "I_hat", "I_stderr"]),
    )
    sys.stdout.write(text)
    return 0


def cmd_correlate(cfg: ExperimentConfig, out: str, seed: int) -> int:
    if not cfg.correlate_theta0s:
        raise ConfigError("correlate needs theta0s")
    f = TEST_FUNCTIONS[cfg.correlate_f]
    rows = []
    for i, lam in enumerate(cfg.lambdas):
        ens, mu = _resolve(cfg, lam)
        if cfg.correlate_horizon is not None:
            horizon = cfg.correlate_horizon
        else:
            report = predict(ens)
            gamma_guess = report.gamma_leading * mu**report.gamma_exponent
            horizon = mc.truncation_horizon(mu, gamma_guess, cfg.steps)
        for j, theta0 in enumerate(cfg.correlate_theta0s):
            ccfg = ChainConfig(
                lam=mu,
                steps=cfg.steps,
                burn_in=cfg.burn_in,
                theta0=theta0,
                replicas=cfg.replicas,
                master_seed=_point_seed(seed, i * 1000 + j),
            )
            res = mc.correlation_sum(ens, ccfg, f, horizon)
            rows.append([lam, theta0, cfg.correlate_f, res.estimate.value, res.estimate.stderr, res.horizon])
    text = _csv(rows, ["lambda", "theta0", "f_name", "J_hat", "J_stderr", "H"])
    _write(os.path.join(out, "correlate.csv"), text)
    sys.stdout.write(text)
    return 0


def cmd_compare(cfg: ExperimentConfig, out: str, seed: int) -> int:
    ens = _base_ensemble(cfg)
    report = predict(ens)
    points = _sweep_points(cfg, seed)
    rows = compare_sweep(
        report,
        points,
        gamma_rel_tol=cfg.gamma_rel_tol,
        sigma_rel_tol=cfg.sigma_rel_tol,
        slope_tol=cfg.slope_tol,
        hyperbolic_sigma_ratio=cfg.hyperbolic_sigma_ratio,
    )
    table = [
        [
            r.name,
            r.measured,
            r.expected,
            (r.measured / r.expected) if r.expected != 0.0 else float("nan"),
            r.tolerance,
            "pass" if r.passed else "fail",
        ]
        for r in rows
    ]
    text = _csv(table, ["check", "measured", "expected", "ratio", "tolerance", "status"])
    _write(os.path.join(out, "compare.csv"), text)
    sys.stdout.write(text)
    for r in rows:
        sys.stdout.write(r.line() + "\n")
    slope = loglog_slope([p.lam for p in points], [p.gamma.value for p in points]) if len(points) > 1 else float("nan")
    sys.stdout.write(f"gamma log-log slope across lambdas: {format_float(slope)}\n")
    return 0 if all(r.passed for r in rows) else ACCEPTANCE_ERROR


def cmd_sweep(cfg: ExperimentConfig, out: str, seed: int) -> int:
    rc = 0
    cmd_classify(cfg, out, seed)
    cmd_predict(cfg, out, seed)
    cmd_simulate(cfg, out, seed)
    cmd_measure(cfg, out, seed)
    if cfg.correlate_theta0s:
        cmd_correlate(cfg, out, seed)
    rc = cmd_compare(cfg, out, seed)
    return rc


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="sl2mc",
        description="Monte Carlo laboratory for random SL(2,R) matrix products",
    )
    parser.add_argument("command", choices=_COMMANDS)
    parser.add_argument("--config", required=True, help="experiment config file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override config seed (u64)")
    parser.add_argument("--threads", type=int, default=None, help="worker threads (never changes results)")
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return USAGE_ERROR if ex.code not in (0, None) else 0

    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError, ValueError) as ex:
        sys.stderr.write(f"config error: {ex}\n")
        return USAGE_ERROR

    seed = cfg.seed if args.seed is None else args.seed
    if not (0 <= seed < 2**64):
        sys.stderr.write("config error: seed must fit in 64 bits\n")
        return USAGE_ERROR
    if args.threads is not None:
        if args.threads < 1:
            sys.stderr.write("config error: threads must be >= 1\n")
            return USAGE_ERROR
        mc.set_threads(args.threads)

    os.makedirs(args.out, exist_ok=True)
    handler = {
        "classify": cmd_classify,
        "predict": cmd_predict,
        "simulate": cmd_simulate,
        "measure": cmd_measure,
        "correlate": cmd_correlate,
        "compare": cmd_compare,
        "sweep": cmd_sweep,
    }[args.command]
    try:
        return handler(cfg, args.out, seed)
    except ConfigError as ex:
        sys.stderr.write(f"config error: {ex}\n")
        return USAGE_ERROR
    except (GalerkinError, ArithmeticError, np.linalg.LinAlgError, ValueError) as ex:
        # model-validity and solver failures (degenerate diffusion, residuals,
        # ill-conditioned normal forms) are numerical, not usage, errors
        sys.stderr.write(f"numerical failure: {ex}\n")
        return NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())

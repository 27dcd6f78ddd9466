"""Joining Monte Carlo estimates with predictions: checks and slope fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .montecarlo import Estimate
from .perturbation import AnomalyTag, PredictionReport

__all__ = ["CheckRow", "SweepPoint", "compare_sweep", "loglog_slope"]


@dataclass(frozen=True)
class CheckRow:
    name: str
    measured: float
    expected: float
    tolerance: float
    passed: bool

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (
            f"{status}  {self.name}: measured {self.measured:.6g}, "
            f"expected {self.expected:.6g}, tol {self.tolerance:.3g}"
        )


@dataclass(frozen=True)
class SweepPoint:
    lam: float  # model coupling as configured
    mu: float  # effective coupling driving the ensemble
    gamma: Estimate
    sigma: Estimate


def loglog_slope(xs, ys) -> float:
    xs = np.log(np.asarray(xs, dtype=float))
    ys = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(xs, ys, 1)[0])


def compare_sweep(
    report: PredictionReport,
    points: list[SweepPoint],
    gamma_rel_tol: float = 0.15,
    sigma_rel_tol: float = 0.25,
    slope_tol: float = 0.1,
    hyperbolic_sigma_ratio: float = 0.2,
) -> list[CheckRow]:
    """Per-point and slope checks of gamma and sigma against a report.

    gamma: |gamma_hat / mu^e - C| <= max(rel_tol * C, 3 stderr / mu^e) with
    the relative band widened proportionally to mu / mu_min (the remainder
    of the expansion is one order higher).  sigma: class-specific (equality
    with gamma for elliptic, predicted constant for centered, suppression
    ratio and slope for hyperbolic).  Slopes are fitted in the model
    coupling for gamma and in the effective coupling for the hyperbolic
    sigma bound.
    """
    rows: list[CheckRow] = []
    tag = report.anomaly.tag
    e = report.gamma_exponent
    c_gamma = report.gamma_leading
    mu_min = min(p.mu for p in points)

    for p in points:
        scaled = p.gamma.value / p.mu**e
        err = 3.0 * p.gamma.stderr / p.mu**e
        tol = max(gamma_rel_tol * (p.mu / mu_min) * abs(c_gamma), err)
        rows.append(
            CheckRow(
                f"gamma/mu^{e:g} at lam={p.lam:g}",
                scaled,
                c_gamma,
                tol,
                abs(scaled - c_gamma) <= tol,
            )
        )

    if len(points) >= 2:
        slope = loglog_slope([p.lam for p in points], [p.gamma.value for p in points])
        # exponent in the model coupling: e * d log mu / d log lam
        power = math.log(points[0].mu / points[-1].mu) / math.log(points[0].lam / points[-1].lam)
        expected = e * power
        rows.append(
            CheckRow("gamma log-log slope", slope, expected, slope_tol, abs(slope - expected) <= slope_tol)
        )

    if tag is AnomalyTag.ELLIPTIC:
        for p in points:
            tol = max(sigma_rel_tol * abs(p.gamma.value), 3.0 * math.hypot(p.sigma.stderr, p.gamma.stderr))
            rows.append(
                CheckRow(
                    f"sigma=gamma at lam={p.lam:g}",
                    p.sigma.value,
                    p.gamma.value,
                    tol,
                    abs(p.sigma.value - p.gamma.value) <= tol,
                )
            )
    elif tag is AnomalyTag.CENTERED:
        c_sigma = report.sigma_leading or 0.0
        for p in points:
            scaled = p.sigma.value / p.mu**2
            tol = max(sigma_rel_tol * abs(c_sigma), 3.0 * p.sigma.stderr / p.mu**2)
            rows.append(
                CheckRow(
                    f"sigma/mu^2 at lam={p.lam:g}",
                    scaled,
                    c_sigma,
                    tol,
                    abs(scaled - c_sigma) <= tol,
                )
            )
    elif tag is AnomalyTag.HYPERBOLIC:
        smallest = min(points, key=lambda p: p.lam)
        ratio = smallest.sigma.value / smallest.gamma.value
        rows.append(
            CheckRow(
                f"sigma/gamma at lam={smallest.lam:g}",
                ratio,
                0.0,
                hyperbolic_sigma_ratio,
                ratio <= hyperbolic_sigma_ratio,
            )
        )
        if len(points) >= 2:
            slope = loglog_slope([p.mu for p in points], [p.sigma.value for p in points])
            rows.append(
                CheckRow(
                    "sigma log-log slope vs effective coupling (lower bound)",
                    slope,
                    report.sigma_exponent,
                    0.3,
                    slope >= 1.2,
                )
            )
    return rows

"""Anomaly classification, normal forms and perturbative predictions.

An ensemble exp(lam*P + lam^2*Q) is classified by the mean generator:
det E[P] > 0 (elliptic), < 0 (hyperbolic), E[P] = 0 (centered), and the
leftover parabolic case which no predictor covers.  Each class has a
leading-order law for the Lyapunov exponent gamma and the CLT variance
sigma; the centered case requires solving for the stationary density of
the angle diffusion with a Fourier-Galerkin nullspace solve.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .circle import BasisChange, conjugate_ensemble
from .fourier import FourierDensity
from .sl2 import Ensemble, TracelessGenerator, ensemble_moments

__all__ = [
    "AnomalyTag",
    "AnomalyClass",
    "PredictionReport",
    "GalerkinError",
    "classify",
    "elliptic_normal_form",
    "hyperbolic_normal_form",
    "predict_elliptic",
    "predict_hyperbolic",
    "assemble_generator",
    "solve_stationary_density",
    "stationary_density",
    "solve_poisson",
    "predict_centered",
    "predict",
    "elliptic_j_prediction",
]

DEFAULT_ORDER = 64
MAX_ORDER = 512
RESIDUAL_TOL = 1e-8
NEGATIVITY_TOL = -1e-9
NORMAL_FORM_TOL = 1e-10


class AnomalyTag(str, enum.Enum):
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    CENTERED = "centered"
    PARABOLIC = "parabolic"


@dataclass(frozen=True)
class AnomalyClass:
    tag: AnomalyTag
    eta: float  # sqrt(|det E[P]|); 0 for centered/parabolic

    def __post_init__(self) -> None:
        if self.eta < 0.0:
            raise ValueError("eta must be >= 0")


@dataclass(frozen=True)
class PredictionReport:
    """Leading-order asymptotics gamma ~ C*lam^e with the class that produced them."""

    anomaly: AnomalyClass
    gamma_leading: float
    gamma_exponent: float
    sigma_leading: float | None
    sigma_exponent: float
    sigma_upper_bound_only: bool
    normal_form: BasisChange
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "class": self.anomaly.tag.value,
            "eta": self.anomaly.eta,
            "gamma_leading": self.gamma_leading,
            "gamma_exponent": self.gamma_exponent,
            "sigma_leading": self.sigma_leading,
            "sigma_exponent": self.sigma_exponent,
            "sigma_upper_bound_only": self.sigma_upper_bound_only,
            "normal_form": [list(row) for row in self.normal_form.m],
            "notes": list(self.notes),
        }


class GalerkinError(RuntimeError):
    """Spectral solve failed its residual or positivity check; increase K."""


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def classify(ens: Ensemble, tol: float = 1e-10) -> AnomalyClass:
    """Anomaly trichotomy of the mean generator, with scale-aware tolerances."""
    if tol <= 0.0:
        raise ValueError("tol must be > 0")
    mean = ens.mean_generator()
    det = mean.det()
    norm = mean.norm()
    tol_centered = tol * (1.0 + ens.max_generator_norm())
    tol_det = tol * (1.0 + norm * norm)
    if norm <= tol_centered:
        return AnomalyClass(AnomalyTag.CENTERED, 0.0)
    if det > tol_det:
        return AnomalyClass(AnomalyTag.ELLIPTIC, math.sqrt(det))
    if det < -tol_det:
        return AnomalyClass(AnomalyTag.HYPERBOLIC, math.sqrt(-det))
    return AnomalyClass(AnomalyTag.PARABOLIC, 0.0)


def _require(ens: Ensemble, tag: AnomalyTag) -> AnomalyClass:
    cls = classify(ens)
    if cls.tag is not tag:
        raise ValueError(f"ensemble classifies as {cls.tag.value}, need {tag.value}")
    return cls


def _sign_fix(m: np.ndarray) -> np.ndarray:
    """Make the first column's leading component positive (global sign)."""
    if m[0, 0] < 0.0 or (m[0, 0] == 0.0 and m[1, 0] < 0.0):
        return -m
    return m


# ---------------------------------------------------------------------------
# normal forms
# ---------------------------------------------------------------------------


def elliptic_normal_form(ens: Ensemble) -> tuple[BasisChange, Ensemble]:
    """Basis change after which E[P] = ((0, -eta), (eta, 0)) with eta > 0.

    M has det 1 when the mean generator already rotates counterclockwise
    (positive lower-left entry); otherwise a reflection is included, so
    the target is always the standard rotation generator.
    """
    cls = _require(ens, AnomalyTag.ELLIPTIC)
    mean = ens.mean_generator()
    eta = cls.eta
    s = 1.0 if mean.c > 0.0 else -1.0
    # columns u1 = e1, u2 = s*K@e1 with K = mean/eta satisfy K u1 = s u2, K u2 = -s u1
    v = np.array([[1.0, s * mean.a / eta], [0.0, s * mean.c / eta]])
    v = v / math.sqrt(v[0, 0] * v[1, 1] - v[0, 1] * v[1, 0])
    m = np.array([[v[1, 1], -v[0, 1]], [-v[1, 0], v[0, 0]]])  # V^{-1}, det 1
    if s < 0.0:
        m = np.array([[1.0, 0.0], [0.0, -1.0]]) @ m
    m = _sign_fix(m)
    change = BasisChange(m, "elliptic-normal")
    conj = conjugate_ensemble(change, ens)
    target = TracelessGenerator(0.0, -eta, eta)
    resid = (conj.mean_generator() - target).norm()
    if resid > NORMAL_FORM_TOL * (1.0 + eta):
        raise ArithmeticError(f"normal form residual {resid:.2e} (ill-conditioned mean)")
    return change, conj


def hyperbolic_normal_form(ens: Ensemble) -> tuple[BasisChange, Ensemble]:
    """Basis change after which E[P] = diag(eta, -eta) with eta > 0.

    The expanding eigendirection goes to theta = 0, which is the stable
    fixed point of the averaged projective flow; det M = 1.
    """
    cls = _require(ens, AnomalyTag.HYPERBOLIC)
    mean = ens.mean_generator()
    eta = cls.eta

    def eigvec(mu: float) -> np.ndarray:
        cand1 = np.array([mean.b, mu - mean.a])
        cand2 = np.array([mean.a + mu, mean.c])
        v = cand1 if cand1 @ cand1 >= cand2 @ cand2 else cand2
        v = v / math.sqrt(v @ v)
        if v[0] < 0.0 or (v[0] == 0.0 and v[1] < 0.0):
            v = -v
        return v

    vp, vm = eigvec(eta), eigvec(-eta)
    v = np.column_stack([vp, vm])
    det = v[0, 0] * v[1, 1] - v[0, 1] * v[1, 0]
    if abs(det) < 1e-12:
        raise ArithmeticError("eigenvectors are degenerate (near-parabolic mean)")
    if det < 0.0:
        v[:, 1] = -v[:, 1]
        det = -det
    v = v / math.sqrt(det)
    m = np.array([[v[1, 1], -v[0, 1]], [-v[1, 0], v[0, 0]]])
    m = _sign_fix(m)
    change = BasisChange(m, "hyperbolic-normal")
    conj = conjugate_ensemble(change, ens)
    target = TracelessGenerator(eta, 0.0, 0.0)
    resid = (conj.mean_generator() - target).norm()
    if resid > NORMAL_FORM_TOL * (1.0 + eta):
        raise ArithmeticError(f"normal form residual {resid:.2e} (ill-conditioned mean)")
    return change, conj


# ---------------------------------------------------------------------------
# first-order predictions
# ---------------------------------------------------------------------------


def _var_p1_p23(conj: Ensemble) -> tuple[float, float]:
    cov = ensemble_moments(conj).covariance()
    var1 = float(cov[0, 0])
    var23 = float(cov[1, 1] + cov[2, 2] + 2.0 * cov[1, 2])
    return var1, var23


def predict_elliptic(ens: Ensemble) -> PredictionReport:
    """gamma = sigma = C_e*lam^2 with C_e = (4 Var p1 + Var(p2+p3))/8 in normal form."""
    cls = _require(ens, AnomalyTag.ELLIPTIC)
    change, conj = elliptic_normal_form(ens)
    var1, var23 = _var_p1_p23(conj)
    ce = 0.125 * (4.0 * var1 + var23)
    notes: tuple[str, ...] = ()
    if ce <= 1e-14 * (1.0 + cls.eta**2):
        notes = ("degenerate: positivity hypothesis violated (no fluctuation in the rotating frame)",)
    return PredictionReport(
        anomaly=cls,
        gamma_leading=ce,
        gamma_exponent=2.0,
        sigma_leading=ce,
        sigma_exponent=2.0,
        sigma_upper_bound_only=False,
        normal_form=change,
        notes=notes,
    )


def predict_hyperbolic(ens: Ensemble) -> PredictionReport:
    """gamma = eta*lam + O(lam^{3/2}); sigma only bounded, O(lam^{3/2})."""
    cls = _require(ens, AnomalyTag.HYPERBOLIC)
    change, conj = hyperbolic_normal_form(ens)
    cov = ensemble_moments(conj).covariance()
    notes: tuple[str, ...] = ()
    if cov[1, 1] <= 1e-14 * (1.0 + cls.eta**2):
        notes = ("hypothesis violated: Var(p2) = 0 in normal form (measure may not concentrate)",)
    return PredictionReport(
        anomaly=cls,
        gamma_leading=cls.eta,
        gamma_exponent=1.0,
        sigma_leading=None,
        sigma_exponent=1.5,
        sigma_upper_bound_only=True,
        normal_form=change,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# centered case: angle diffusion and its stationary density
# ---------------------------------------------------------------------------


def assemble_generator(ens: Ensemble) -> tuple[FourierDensity, FourierDensity]:
    """Diffusion D = E[p^2]/2 and drift b = E[q + p p'/2] of the angle chain."""
    _require(ens, AnomalyTag.CENTERED)
    mom = ensemble_moments(ens)
    diff = 0.5 * mom.p_sq
    drift = mom.drift2
    if diff.min_value(1024) <= 0.0:
        raise ValueError("E[p^2] is not strictly positive: the angle diffusion is not elliptic")
    return diff, drift


def _banded_solve(rows_main, band: int, rhs: np.ndarray) -> np.ndarray:
    """Solve the (2K+1)x(2K+1) banded system given a row-coefficient callback.

    rows_main(k, m) must return the matrix entry coupling row k to column
    k - m for |m| <= band (k runs over -K..K).
    """
    n = rhs.size
    K = (n - 1) // 2
    ab = np.zeros((2 * band + 1, n), dtype=np.complex128)
    for i in range(n):
        k = i - K
        for m in range(-band, band + 1):
            j = i - m
            if 0 <= j < n:
                ab[band + i - j, j] += rows_main(k, m)
    return solve_banded((band, band), ab, rhs)


def _padded_full(f: FourierDensity, half: int) -> np.ndarray:
    """Full coefficient array re-centered at index `half` (zero padded)."""
    out = np.zeros(2 * half + 1, dtype=np.complex128)
    K = f.order
    out[half - K : half + K + 1] = f.full_coeffs()
    return out


def _row_coeff_adjoint(diff_full, drift_full, K_c, k: int, m: int) -> complex:
    # row k of L* rho = d^2(D rho) - d(b rho): the e^{2ik} coefficient couples
    # to rho_{k-m} through D_m and b_m
    d = diff_full[K_c + m] if abs(m) <= K_c else 0.0
    b = drift_full[K_c + m] if abs(m) <= K_c else 0.0
    return -4.0 * k * k * d - 2.0j * k * b


def _row_coeff_forward(diff_full, drift_full, K_c, k: int, m: int) -> complex:
    # row k of L F = D F'' + b F': derivatives hit the column index l = k - m
    el = k - m
    d = diff_full[K_c + m] if abs(m) <= K_c else 0.0
    b = drift_full[K_c + m] if abs(m) <= K_c else 0.0
    return -4.0 * el * el * d + 2.0j * el * b


def solve_stationary_density(
    diff: FourierDensity, drift: FourierDensity, order: int = DEFAULT_ORDER
) -> FourierDensity:
    """Unit-mass solution of d^2(D rho) - d(b rho) = 0 by Fourier-Galerkin.

    The k = 0 row of the adjoint operator is identically zero (divergence
    form), so it is replaced by the normalization row integral(rho) = 1.
    Residual and nonnegativity are verified on a fine grid; failure raises
    :class:`GalerkinError` (increase K).
    """
    if order < 16:
        raise ValueError("order must be >= 16")
    if diff.min_value(1024) <= 0.0:
        raise ValueError("diffusion coefficient must be strictly positive")
    band = max(diff.order, drift.order, 1)
    K = order
    n = 2 * K + 1
    K_c = max(diff.order, drift.order)
    diff_full, drift_full = _padded_full(diff, K_c), _padded_full(drift, K_c)

    rhs = np.zeros(n, dtype=np.complex128)
    rhs[K] = 1.0

    def rows(k: int, m: int) -> complex:
        if k == 0:
            return math.pi if m == 0 else 0.0
        return _row_coeff_adjoint(diff_full, drift_full, K_c, k, m)

    sol = _banded_solve(rows, band, rhs)
    rho = FourierDensity(sol[K:])

    resid = _adjoint_residual(diff, drift, rho)
    if resid > RESIDUAL_TOL:
        raise GalerkinError(f"stationary residual {resid:.2e} > {RESIDUAL_TOL}: increase K")
    if rho.min_value(max(4 * K, 512)) < NEGATIVITY_TOL:
        raise GalerkinError(f"density attains {rho.min_value():.2e} < 0: increase K")
    return rho


def _adjoint_residual(diff, drift, rho) -> float:
    lstar = diff.product(rho).derivative().derivative() - drift.product(rho).derivative()
    grid = np.linspace(0.0, math.pi, max(8 * lstar.order, 512), endpoint=False)
    return float(np.max(np.abs(lstar(grid))))


def stationary_density(
    diff: FourierDensity, drift: FourierDensity, order: int = DEFAULT_ORDER
) -> FourierDensity:
    """solve_stationary_density with order doubling up to MAX_ORDER."""
    k = order
    while True:
        try:
            return solve_stationary_density(diff, drift, k)
        except GalerkinError:
            if 2 * k > MAX_ORDER:
                raise
            k *= 2


def solve_poisson(
    diff: FourierDensity,
    drift: FourierDensity,
    rho: FourierDensity,
    f: FourierDensity,
    order: int = DEFAULT_ORDER,
) -> FourierDensity:
    """Solve (D d^2 + b d) F = f - <rho|f> with the gauge c_0(F) = 0.

    The constant direction spans the kernel of the operator, so the k = 0
    row is replaced by F_0 = 0; solvability holds because the right side
    is orthogonal to rho.
    """
    band = max(diff.order, drift.order, 1)
    K = max(order, f.order)
    n = 2 * K + 1
    K_c = max(diff.order, drift.order)
    diff_full, drift_full = _padded_full(diff, K_c), _padded_full(drift, K_c)

    mean = rho.inner(f)
    g = f - FourierDensity.constant(mean)
    g_full = np.zeros(n, dtype=np.complex128)
    gf = g.full_coeffs()
    g_full[K - g.order : K + g.order + 1] = gf
    g_full[K] = 0.0  # k = 0 row carries the gauge, not the equation

    def rows(k: int, m: int) -> complex:
        if k == 0:
            return 1.0 if m == 0 else 0.0
        return _row_coeff_forward(diff_full, drift_full, K_c, k, m)

    sol = _banded_solve(rows, band, g_full)
    F = FourierDensity(sol[K:])

    # residual of the actual equation, including the dropped k = 0 row
    lf = diff.product(F.derivative().derivative()) + drift.product(F.derivative())
    err = lf - g
    grid = np.linspace(0.0, math.pi, max(8 * err.order, 512), endpoint=False)
    resid = float(np.max(np.abs(err(grid))))
    scale = 1.0 + float(np.max(np.abs(g(grid))))
    if resid > RESIDUAL_TOL * scale:
        raise GalerkinError(f"poisson residual {resid:.2e}: increase K")
    return F


def predict_centered(ens: Ensemble, order: int = DEFAULT_ORDER) -> PredictionReport:
    """Second-order laws gamma = C_s*lam^2, sigma = C'_s*lam^2.

    C_s = <rho|f> with f the lam^2 coefficient of the expected log gain.
    C'_s evaluates the stationary variance formula with the correlation
    sum replaced by its leading expression nu(F) - F, F = L^{-1}(f - <rho|f>):

        C'_s = <rho | E[h^2] - 2 E[h p] F' + 2 D (F')^2>

    The last term collects the second-order part of the gain hitting the
    correlation tail; dropping it is inconsistent with Monte Carlo (see
    the validation demo and the acceptance suite).
    """
    cls = _require(ens, AnomalyTag.CENTERED)
    diff, drift = assemble_generator(ens)
    mom = ensemble_moments(ens)
    f = mom.gain2
    k = order
    while True:
        try:
            rho = solve_stationary_density(diff, drift, k)
            F = solve_poisson(diff, drift, rho, f, k)
            break
        except GalerkinError:
            if 2 * k > MAX_ORDER:
                raise
            k *= 2
    cs = rho.inner(f)
    fp = F.derivative()
    cps = (
        rho.inner(mom.h_sq)
        - 2.0 * rho.inner(mom.h_p.product(fp))
        + 2.0 * rho.inner(diff.product(fp.product(fp)))
    )
    return PredictionReport(
        anomaly=cls,
        gamma_leading=cs,
        gamma_exponent=2.0,
        sigma_leading=cps,
        sigma_exponent=2.0,
        sigma_upper_bound_only=False,
        normal_form=BasisChange.identity("custom"),
        notes=(),
    )


def predict(ens: Ensemble, order: int = DEFAULT_ORDER) -> PredictionReport:
    """Dispatch on the anomaly class; the parabolic case is not covered."""
    cls = classify(ens)
    if cls.tag is AnomalyTag.ELLIPTIC:
        return predict_elliptic(ens)
    if cls.tag is AnomalyTag.HYPERBOLIC:
        return predict_hyperbolic(ens)
    if cls.tag is AnomalyTag.CENTERED:
        return predict_centered(ens, order)
    raise ValueError("parabolic anomalies are not covered (non-generic)")


def elliptic_j_prediction(eta: float, lam: float, f: FourierDensity, theta0: float) -> float:
    """Leading term of the correlation sum at an elliptic anomaly.

    J(f) ~ -(F(theta0) - nu(F))/(lam*eta) with F the zero-mean antiderivative
    of f - mean(f); nu(F) is approximated by the uniform average (error O(lam)).
    """
    if eta <= 0 or lam <= 0:
        raise ValueError("need eta > 0 and lam > 0")
    F = (f - FourierDensity.constant(f.const)).antiderivative()
    return -float(F(theta0)) / (lam * eta)

"""Monte Carlo estimators for Lyapunov exponents, variances and measures.

Replicas are independent chains with counter-based streams (see
:mod:`sl2mc.rng`), reduced in replica order, so a run is a deterministic
function of (ensemble, config) for any thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .fourier import FourierDensity
from .rng import mix64
from .sl2 import Ensemble, build_transfer

__all__ = [
    "ChainConfig",
    "Estimate",
    "Histogram",
    "RawChainSums",
    "CorrelationResult",
    "set_threads",
    "max_threads",
    "run_chain",
    "run_chain_matrices",
    "estimate_lyapunov",
    "estimate_variance",
    "estimate_gamma_sigma",
    "estimate_invariant_histogram",
    "birkhoff_sum",
    "correlation_sum",
    "measure_mass_outside",
    "truncation_horizon",
    "DEFAULT_STEPS",
    "DEFAULT_BURN_IN",
    "DEFAULT_REPLICAS",
]

DEFAULT_STEPS = 2_000_000
DEFAULT_BURN_IN = 10_000
DEFAULT_REPLICAS = 200
DEFAULT_BINS = 256
DEFAULT_HARMONICS = 8

# seed-domain separator for the auxiliary stationary run of correlation_sum
_STATIONARY_SALT = 0xA5A5A5A5A5A5A5A5


def set_threads(n: int) -> int:
    """Set worker threads for the kernels; returns the effective count.

    Requests beyond the machine limit are clamped.  Thread count never
    changes results, only wall time.
    """
    import numba

    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n


def max_threads() -> int:
    import numba

    return int(numba.config.NUMBA_NUM_THREADS)


@dataclass(frozen=True)
class ChainConfig:
    """Budget and seeding of one Monte Carlo run."""

    lam: float
    steps: int = DEFAULT_STEPS
    burn_in: int = DEFAULT_BURN_IN
    theta0: float = 0.0
    replicas: int = DEFAULT_REPLICAS
    master_seed: int = 0

    def __post_init__(self) -> None:
        if not self.lam > 0.0:
            raise ValueError("lam must be > 0")
        if not (self.steps > self.burn_in >= 0):
            raise ValueError("need steps > burn_in >= 0")
        if self.replicas < 1:
            raise ValueError("need at least one replica")
        if not (0 <= int(self.master_seed) < 2**64):
            raise ValueError("master_seed must fit in 64 bits")
        if not (0.0 <= self.theta0 < math.pi):
            raise ValueError("theta0 must lie in [0, pi)")

    @property
    def kept_steps(self) -> int:
        return self.steps - self.burn_in


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    n_effective: int

    def __post_init__(self) -> None:
        if self.stderr < 0.0:
            raise ValueError("stderr must be >= 0")


@dataclass(frozen=True)
class Histogram:
    """Empirical invariant measure on uniform bins of [0, pi)."""

    masses: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        m = np.asarray(self.masses, dtype=float)
        if m.ndim != 1 or m.size < 1:
            raise ValueError("masses must be a 1-d array")
        if np.min(m) < 0.0:
            raise ValueError("masses must be nonnegative")
        if abs(float(np.sum(m)) - 1.0) > 1e-12:
            raise ValueError("masses must sum to 1")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)

    @property
    def bin_count(self) -> int:
        return self.masses.size

    @property
    def bin_width(self) -> float:
        return math.pi / self.bin_count

    @property
    def bin_centers(self) -> np.ndarray:
        return (np.arange(self.bin_count) + 0.5) * self.bin_width

    def mean_of(self, f) -> float:
        """Approximate integral of f against the histogram (bin centers)."""
        return float(np.sum(self.masses * f(self.bin_centers)))

    def mass_outside(self, center: float, radius: float) -> float:
        """Mass of {dist(theta, center) > radius} on the circle of period pi.

        Boundary bins are counted by the fraction of their width that lies
        outside the ball.
        """
        frac = _outside_fractions(self.bin_count, center, radius)
        return float(np.dot(self.masses, frac))


def _outside_fractions(bins: int, center: float, radius: float) -> np.ndarray:
    """Per-bin fraction at circle distance > radius from center (period pi)."""
    if radius >= 0.5 * math.pi:
        return np.zeros(bins)
    width = math.pi / bins
    sub = 32
    ts = (np.arange(bins)[:, None] + (np.arange(sub)[None, :] + 0.5) / sub) * width
    d = np.abs(ts - center)
    d = np.minimum(d, math.pi - d)
    return np.mean(d > radius, axis=1)


@dataclass(frozen=True)
class RawChainSums:
    """Per-replica raw sums from one run; reduction order is replica index."""

    config: ChainConfig
    gain_sum: np.ndarray  # (M,) compensated sums of g_n after burn-in
    harm_cos: np.ndarray  # (M, K) sums of cos(2k theta_n)
    harm_sin: np.ndarray  # (M, K) sums of sin(2k theta_n)
    hist_counts: np.ndarray  # (M, bins) occupation counts
    theta_last: np.ndarray  # (M,)

    @property
    def kept_steps(self) -> int:
        return self.config.kept_steps

    @property
    def n_harmonics(self) -> int:
        return self.harm_cos.shape[1]

    def replica_gamma(self) -> np.ndarray:
        return self.gain_sum / self.kept_steps

    def pooled_histogram(self) -> Histogram:
        counts = self.hist_counts.sum(axis=0)
        return Histogram(counts / counts.sum())

    def replica_means(self, f: FourierDensity) -> np.ndarray:
        """Per-replica Birkhoff means of a trig polynomial (exact).

        f must have order <= the number of collected harmonics.
        """
        if f.order > self.n_harmonics:
            raise ValueError(
                f"f has harmonics up to {f.order}, collected only {self.n_harmonics}"
            )
        n = self.kept_steps
        out = np.full(self.gain_sum.shape[0], f.const)
        for k in range(1, f.order + 1):
            out = out + (
                f.cos_coeff(k) * self.harm_cos[:, k - 1] + f.sin_coeff(k) * self.harm_sin[:, k - 1]
            ) / n
        return out


def _transfer_arrays(ens: Ensemble, lam: float):
    mats = [build_transfer(lam, p, q) for p, q in zip(ens.generators, ens.corrections)]
    return _matrix_arrays(mats)


def _matrix_arrays(mats):
    t11 = np.array([m.t11 for m in mats])
    t12 = np.array([m.t12 for m in mats])
    t21 = np.array([m.t21 for m in mats])
    t22 = np.array([m.t22 for m in mats])
    return t11, t12, t21, t22


def run_chain_matrices(
    weights,
    matrices,
    cfg: ChainConfig,
    bins: int = DEFAULT_BINS,
    n_harm: int = DEFAULT_HARMONICS,
) -> RawChainSums:
    """Drive the chain with explicit SL(2,R) matrices (one per atom).

    This is the raw-product path used to cross-validate model reductions;
    cfg.lam is ignored except for bookkeeping.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size != len(matrices):
        raise ValueError("weights and matrices must align")
    if np.min(w) < 0 or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must be a probability vector")
    cumw = np.cumsum(w)
    t11, t12, t21, t22 = _matrix_arrays(matrices)
    gain, hc, hs, hist, last = _kernels.chain_kernel(
        t11,
        t12,
        t21,
        t22,
        cumw,
        cfg.steps,
        cfg.burn_in,
        cfg.theta0,
        cfg.replicas,
        np.uint64(cfg.master_seed),
        int(bins),
        int(n_harm),
    )
    return RawChainSums(cfg, gain, hc, hs, hist, last)


def run_chain(
    ens: Ensemble,
    cfg: ChainConfig,
    bins: int = DEFAULT_BINS,
    n_harm: int = DEFAULT_HARMONICS,
) -> RawChainSums:
    """Iterate theta_{n+1} = S(T_n, theta_n) over all replicas.

    T_n is drawn from the finite ensemble at coupling cfg.lam (the per-atom
    transfer matrices are exact exponentials, precomputed once).  After
    burn-in each step feeds (theta_n, g_n) to the collectors.
    """
    cumw = ens.cumulative_weights()
    t11, t12, t21, t22 = _transfer_arrays(ens, cfg.lam)
    gain, hc, hs, hist, last = _kernels.chain_kernel(
        t11,
        t12,
        t21,
        t22,
        cumw,
        cfg.steps,
        cfg.burn_in,
        cfg.theta0,
        cfg.replicas,
        np.uint64(cfg.master_seed),
        int(bins),
        int(n_harm),
    )
    return RawChainSums(cfg, gain, hc, hs, hist, last)


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------


def _gamma_sigma(raw: RawChainSums) -> tuple[Estimate, Estimate]:
    gam = raw.replica_gamma()
    m = gam.size
    gamma_hat = float(np.mean(gam))
    gamma_err = float(np.std(gam, ddof=1) / math.sqrt(m)) if m > 1 else 0.0
    # CLT statistics (L_r - n*gamma_hat)/sqrt(n); their sample variance
    stats = (raw.gain_sum - raw.kept_steps * gamma_hat) / math.sqrt(raw.kept_steps)
    if m > 1:
        sigma_hat = float(np.var(stats, ddof=1))
        sigma_err = sigma_hat * math.sqrt(2.0 / (m - 1))
    else:
        sigma_hat, sigma_err = 0.0, 0.0
    return (
        Estimate(gamma_hat, gamma_err, m * raw.kept_steps),
        Estimate(sigma_hat, sigma_err, m),
    )


def estimate_gamma_sigma(ens: Ensemble, cfg: ChainConfig) -> tuple[Estimate, Estimate]:
    """Lyapunov exponent and CLT variance from one set of runs."""
    return _gamma_sigma(run_chain(ens, cfg, bins=8, n_harm=1))


def estimate_lyapunov(ens: Ensemble, cfg: ChainConfig) -> Estimate:
    """Mean log-norm gain per step, averaged over replicas."""
    return estimate_gamma_sigma(ens, cfg)[0]


def estimate_variance(ens: Ensemble, cfg: ChainConfig) -> Estimate:
    """Variance of the Gaussian limit of the centered, normalized log norm.

    The sample variance of the per-replica CLT statistics; its own stderr
    is sigma*sqrt(2/(M-1)), so fewer than ~30 replicas give little meaning.
    """
    return estimate_gamma_sigma(ens, cfg)[1]


def estimate_invariant_histogram(
    ens: Ensemble, cfg: ChainConfig, bins: int = DEFAULT_BINS
) -> Histogram:
    """Occupation histogram of theta_n after burn-in, pooled over replicas."""
    if bins < 8:
        raise ValueError("need at least 8 bins")
    return run_chain(ens, cfg, bins=bins, n_harm=1).pooled_histogram()


def _as_trig_poly(f, n_harm: int) -> FourierDensity:
    if isinstance(f, FourierDensity):
        return f
    # project a callable onto harmonics and insist the projection is exact
    grid = np.linspace(0.0, math.pi, 4 * n_harm + 9, endpoint=False)
    vals = np.asarray(f(grid), dtype=float)
    if vals.shape != grid.shape:
        vals = np.array([float(f(t)) for t in grid])
    poly = FourierDensity.from_samples(vals, n_harm)
    resid = float(np.max(np.abs(poly(grid) - vals)))
    if resid > 1e-10 * (1.0 + float(np.max(np.abs(vals)))):
        raise ValueError(
            f"test function is not a trig polynomial of degree <= {n_harm} "
            f"(projection residual {resid:.2e})"
        )
    return poly


def birkhoff_sum(ens: Ensemble, cfg: ChainConfig, f) -> Estimate:
    """Replica-averaged Birkhoff mean of f along the stationary chain.

    f may be a FourierDensity or a callable that is (numerically) a trig
    polynomial within the collected harmonic range.
    """
    poly = _as_trig_poly(f, DEFAULT_HARMONICS)
    raw = run_chain(ens, cfg, bins=8, n_harm=max(1, poly.order))
    means = raw.replica_means(poly)
    m = means.size
    err = float(np.std(means, ddof=1) / math.sqrt(m)) if m > 1 else 0.0
    return Estimate(float(np.mean(means)), err, m * raw.kept_steps)


@dataclass(frozen=True)
class CorrelationResult:
    """Truncated correlation sum J(f) from a fixed starting angle."""

    estimate: Estimate
    horizon: int
    stationary_mean: float  # nu_hat(f) from the auxiliary stationary run
    theta0: float


def truncation_horizon(lam: float, gamma_guess: float, steps: int) -> int:
    """Default horizon ceil(8 / (lam * gamma_guess)) capped at steps/10."""
    if lam <= 0 or gamma_guess <= 0:
        raise ValueError("need positive lam and gamma_guess")
    return int(min(math.ceil(8.0 / (lam * gamma_guess)), steps // 10))


def correlation_sum(
    ens: Ensemble,
    cfg: ChainConfig,
    f,
    horizon: int,
    stationary: RawChainSums | None = None,
) -> CorrelationResult:
    """Estimate sum_{n=1..H} (f(theta_n) - nu(f)) started at cfg.theta0.

    The partial sums use replicas of length H started exactly at cfg.theta0
    with no burn-in (the sum depends on the starting angle).  nu(f) comes
    from a separate long stationary run with cfg's full budget and burn-in,
    seeded from a salted master seed, unless a precomputed run is supplied.
    The reported stderr combines the replica scatter with H times the
    uncertainty of nu_hat(f), which is what makes large horizons costly.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if cfg.burn_in == 0:
        raise ValueError("cfg needs a burn-in for the stationary reference run")
    poly = _as_trig_poly(f, DEFAULT_HARMONICS)
    n_harm = max(1, poly.order)

    if stationary is None:
        stat_cfg = replace(cfg, master_seed=int(mix64(np.uint64(cfg.master_seed) ^ np.uint64(_STATIONARY_SALT))))
        stationary = run_chain(ens, stat_cfg, bins=8, n_harm=n_harm)
    stat_means = stationary.replica_means(poly)
    nu_f = float(np.mean(stat_means))
    nu_err = float(np.std(stat_means, ddof=1) / math.sqrt(stat_means.size))

    jcfg = replace(cfg, steps=horizon, burn_in=0)
    raw = run_chain(ens, jcfg, bins=8, n_harm=n_harm)
    sums = raw.replica_means(poly) * horizon  # Sum_{n=1..H} f(theta_n)
    js = sums - horizon * nu_f
    m = js.size
    scatter = float(np.std(js, ddof=1) / math.sqrt(m)) if m > 1 else 0.0
    err = math.hypot(scatter, horizon * nu_err)
    return CorrelationResult(Estimate(float(np.mean(js)), err, m), horizon, nu_f, cfg.theta0)


def measure_mass_outside(
    ens: Ensemble,
    cfg: ChainConfig,
    center: float,
    radius: float,
    bins: int = 1024,
) -> Estimate:
    """Stationary probability of {dist(theta, center) > radius}.

    No point of the period-pi circle is farther than pi/2 from the center,
    so radius >= pi/2 yields exactly zero without running the chain.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    if radius >= 0.5 * math.pi:
        return Estimate(0.0, 0.0, cfg.replicas)
    raw = run_chain(ens, cfg, bins=bins, n_harm=1)
    frac = _outside_fractions(bins, center, radius)
    counts = raw.hist_counts.astype(float)
    vals = (counts @ frac) / counts.sum(axis=1)
    m = vals.size
    err = float(np.std(vals, ddof=1) / math.sqrt(m)) if m > 1 else 0.0
    return Estimate(float(np.mean(vals)), err, m)

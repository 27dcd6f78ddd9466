"""Monte Carlo laboratory for products of random SL(2,R) matrices.

Random transfer matrices of the form exp(lam*P + lam^2*Q) are iterated
through their projective action on the half circle; the package estimates
the Lyapunov exponent, its central-limit variance, the invariant measure
and correlation sums, and compares them against small-coupling predictions
for elliptic, hyperbolic and centered ensembles, including three physical
models (random harmonic chain, Anderson band edges, Kronig-Penney).
"""

from .circle import (
    BasisChange,
    angle_of_vector,
    conjugate_ensemble,
    drift_expansion,
    log_norm_gain,
    p_function,
    projective_act,
    reduce_angle,
    unzoom,
    zoom,
)
from .fourier import FourierDensity
from .montecarlo import (
    ChainConfig,
    CorrelationResult,
    Estimate,
    Histogram,
    birkhoff_sum,
    correlation_sum,
    estimate_gamma_sigma,
    estimate_invariant_histogram,
    estimate_lyapunov,
    estimate_variance,
    measure_mass_outside,
    run_chain,
    run_chain_matrices,
    set_threads,
    truncation_horizon,
)
from .models import (
    AndersonEdge,
    HarmonicChain,
    KronigPenney,
    build_ensemble,
    raw_matrix_ensemble,
    raw_transfer,
    reference_prediction,
)
from .perturbation import (
    AnomalyClass,
    AnomalyTag,
    GalerkinError,
    PredictionReport,
    assemble_generator,
    classify,
    elliptic_j_prediction,
    elliptic_normal_form,
    hyperbolic_normal_form,
    predict,
    predict_centered,
    predict_elliptic,
    predict_hyperbolic,
    solve_poisson,
    solve_stationary_density,
    stationary_density,
)
from .sl2 import (
    Ensemble,
    MomentTable,
    QPolynomial,
    TracelessGenerator,
    Unimodular2x2,
    build_transfer,
    ensemble_moments,
    exponential,
    sample_atom,
)

__version__ = "0.1.0"

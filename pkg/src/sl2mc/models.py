"""Physical models reduced to near-identity SL(2,R) ensembles.

Three disordered one-dimensional systems whose transfer matrices, after
explicit basis changes, take the form exp(mu*P + mu^2*Q) in an effective
coupling mu:

* random harmonic chain at small frequency omega       (elliptic, mu = omega)
* Anderson model at the band edge E = 2 + w*lam        (elliptic for w < 0,
  hyperbolic for w > 0; mu = sqrt(lam))
* random Kronig-Penney model near a critical energy    (elliptic below,
  hyperbolic above; mu = sqrt(eps))

Each builder returns the reduced ensemble together with mu, plus a
closed-form reference prediction to check the generic pipeline against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circle import BasisChange
from .perturbation import (
    AnomalyClass,
    AnomalyTag,
    PredictionReport,
    predict,
)
from .sl2 import Ensemble, QPolynomial, TracelessGenerator, Unimodular2x2

__all__ = [
    "HarmonicChain",
    "AndersonEdge",
    "KronigPenney",
    "ModelSpec",
    "build_ensemble",
    "reference_prediction",
    "raw_transfer",
    "raw_matrix_ensemble",
    "chain_conjugation",
]


def _check_atoms(weights, values, what: str) -> tuple[tuple[float, ...], tuple[float, ...]]:
    w = tuple(float(x) for x in weights)
    v = tuple(float(x) for x in values)
    if len(w) != len(v) or not w:
        raise ValueError(f"{what}: weights and values must align and be non-empty")
    if min(w) < 0 or abs(sum(w) - 1.0) > 1e-12:
        raise ValueError(f"{what}: weights must be a probability vector")
    return w, v


@dataclass(frozen=True)
class HarmonicChain:
    """Random masses m_n > 0 at frequency coupling omega."""

    masses: tuple[float, ...]
    weights: tuple[float, ...]
    coupling: float  # omega

    def __post_init__(self) -> None:
        w, m = _check_atoms(self.weights, self.masses, "harmonic chain")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "masses", m)
        if min(m) <= 0.0:
            raise ValueError("masses must be positive and bounded away from zero")
        if not self.coupling > 0.0:
            raise ValueError("coupling omega must be > 0")

    def mean_mass(self) -> float:
        return sum(w * m for w, m in zip(self.weights, self.masses))


@dataclass(frozen=True)
class AndersonEdge:
    """Band edge E = 2 + w*lam of the discrete Anderson model."""

    w: float
    potentials: tuple[float, ...]
    weights: tuple[float, ...]
    coupling: float  # lam

    def __post_init__(self) -> None:
        wts, vs = _check_atoms(self.weights, self.potentials, "anderson edge")
        object.__setattr__(self, "weights", wts)
        object.__setattr__(self, "potentials", vs)
        if self.w == 0.0:
            raise ValueError("w must be nonzero (w = 0 is not an edge offset)")
        if not self.coupling > 0.0:
            raise ValueError("coupling lam must be > 0")
        mean_v = sum(a * b for a, b in zip(wts, vs))
        if abs(mean_v) > 1e-12:
            raise ValueError("potential distribution must be centered")


@dataclass(frozen=True)
class KronigPenney:
    """Critical energy E_l = (pi*l)^2 approached from below or above by eps."""

    l: int
    side: str  # "below" or "above"
    potentials: tuple[float, ...]
    weights: tuple[float, ...]
    coupling: float  # eps

    def __post_init__(self) -> None:
        wts, vs = _check_atoms(self.weights, self.potentials, "kronig-penney")
        object.__setattr__(self, "weights", wts)
        object.__setattr__(self, "potentials", vs)
        if self.l < 1:
            raise ValueError("band index l must be >= 1")
        if self.side not in ("below", "above"):
            raise ValueError("side must be 'below' or 'above'")
        if not self.coupling > 0.0:
            raise ValueError("coupling eps must be > 0")
        if self.mean_potential() <= 0.0:
            raise ValueError("mean potential must be positive near a critical energy")

    def mean_potential(self) -> float:
        return sum(w * v for w, v in zip(self.weights, self.potentials))

    def critical_energy(self) -> float:
        return (math.pi * self.l) ** 2


ModelSpec = HarmonicChain | AndersonEdge | KronigPenney


# ---------------------------------------------------------------------------
# reductions
# ---------------------------------------------------------------------------


def _chain_generators(mass: float, mean_mass: float) -> tuple[TracelessGenerator, QPolynomial]:
    # normal form after M3 M2 M1: 1 + mu*(0, -sqrt(Em); m/sqrt(Em), 0) - mu^2*(m,0;0,0)
    # matching exp(mu P + mu^2 Q) through mu^2 gives Q = -(m/2, 0; 0, -m/2)
    root = math.sqrt(mean_mass)
    p = TracelessGenerator(0.0, -root, mass / root)
    q = QPolynomial.constant(TracelessGenerator(-0.5 * mass, 0.0, 0.0))
    return p, q


def build_ensemble(spec: ModelSpec) -> tuple[Ensemble, float]:
    """Reduced ensemble in the model's normal-form coordinates and its
    effective coupling mu (omega, sqrt(lam) or sqrt(eps))."""
    if isinstance(spec, HarmonicChain):
        em = spec.mean_mass()
        atoms = [(w,) + _chain_generators(m, em) for w, m in zip(spec.weights, spec.masses)]
        return Ensemble.from_atoms(atoms), spec.coupling

    if isinstance(spec, AndersonEdge):
        mu = math.sqrt(spec.coupling)
        if spec.w > 0.0:
            sw = math.sqrt(spec.w)
            atoms = []
            for wt, v in zip(spec.weights, spec.potentials):
                p = TracelessGenerator((2.0 * spec.w - v) / (2.0 * sw), v / (2.0 * sw), -v / (2.0 * sw))
                q = QPolynomial.constant(
                    TracelessGenerator(0.0, -(spec.w - v) / 2.0, -(spec.w - v) / 2.0)
                )
                atoms.append((wt, p, q))
            return Ensemble.from_atoms(atoms), mu
        # w < 0: same normal form as the chain with mass v - w > 0 in the mean
        em = -spec.w
        atoms = [
            (wt,) + _chain_generators(v - spec.w, em)
            for wt, v in zip(spec.weights, spec.potentials)
        ]
        return Ensemble.from_atoms(atoms), mu

    if isinstance(spec, KronigPenney):
        mu = math.sqrt(spec.coupling)
        el = spec.critical_energy()
        vbar = spec.mean_potential()
        eta = math.sqrt(vbar / (2.0 * el))
        atoms = []
        for wt, v in zip(spec.weights, spec.potentials):
            g = (v - vbar) / (2.0 * math.sqrt(2.0 * vbar * el))
            if spec.side == "below":
                p = TracelessGenerator(-g, eta + g, -eta - g)
                q = QPolynomial.constant(TracelessGenerator(0.0, -v / (4.0 * el), -v / (4.0 * el)))
            else:
                p = TracelessGenerator(-eta - g, g, -g)
                q = QPolynomial.constant(TracelessGenerator(0.0, v / (4.0 * el), v / (4.0 * el)))
            atoms.append((wt, p, q))
        return Ensemble.from_atoms(atoms), mu

    raise TypeError(f"unknown model spec {type(spec).__name__}")


def chain_conjugation(spec: HarmonicChain) -> BasisChange:
    """The explicit basis change M3 M2 M1 taking the raw chain transfer
    matrix to the reduced normal form (omega-dependent)."""
    if not isinstance(spec, HarmonicChain):
        raise TypeError("conjugation chain is provided for the harmonic chain")
    m1 = np.array([[1.0, 0.0], [1.0, -1.0]])
    m2 = np.array([[spec.coupling, 0.0], [0.0, 1.0]])
    m3 = np.array([[-math.sqrt(spec.mean_mass()), 0.0], [0.0, 1.0]])
    return BasisChange(m3 @ m2 @ m1, "custom")


# ---------------------------------------------------------------------------
# closed-form references and raw matrices
# ---------------------------------------------------------------------------


def _variance(weights, values) -> float:
    mean = sum(w * v for w, v in zip(weights, values))
    return sum(w * (v - mean) ** 2 for w, v in zip(weights, values))


def reference_prediction(spec: ModelSpec) -> PredictionReport:
    """Closed-form leading constants, expressed in the effective coupling mu.

    Must agree with predict(build_ensemble(spec)) to 1e-9 for the chain and
    both Kronig-Penney sides.  For the elliptic Anderson edge (w < 0) the
    often-quoted constant (E[v^2]-w^2)/(8w) is negative and inconsistent
    with the mass-substitution reduction; the reduction value Var(v)/(8|w|)
    is returned, with a warning note recording the discrepancy.
    """
    if isinstance(spec, HarmonicChain):
        em = spec.mean_mass()
        ce = 0.125 * _variance(spec.weights, spec.masses) / em
        cls = AnomalyClass(AnomalyTag.ELLIPTIC, math.sqrt(em))
        return PredictionReport(cls, ce, 2.0, ce, 2.0, False, BasisChange.identity(), ())

    if isinstance(spec, AndersonEdge):
        if spec.w > 0.0:
            eta = math.sqrt(spec.w)
            cls = AnomalyClass(AnomalyTag.HYPERBOLIC, eta)
            return PredictionReport(cls, eta, 1.0, None, 1.5, True, BasisChange.identity(), ())
        varv = _variance(spec.weights, spec.potentials)
        ce = 0.125 * varv / abs(spec.w)
        cls = AnomalyClass(AnomalyTag.ELLIPTIC, math.sqrt(abs(spec.w)))
        note = (
            "below-band edge: using the reduction constant Var(v)/(8|w|); the "
            "often-quoted form (E[v^2]-w^2)/(8w) is negative for w<0 and is not used",
        )
        return PredictionReport(cls, ce, 2.0, ce, 2.0, False, BasisChange.identity(), note)

    if isinstance(spec, KronigPenney):
        el = spec.critical_energy()
        vbar = spec.mean_potential()
        eta = math.sqrt(vbar / (2.0 * el))
        if spec.side == "below":
            ce = _variance(spec.weights, spec.potentials) / (16.0 * vbar * el)
            cls = AnomalyClass(AnomalyTag.ELLIPTIC, eta)
            return PredictionReport(cls, ce, 2.0, ce, 2.0, False, BasisChange.identity(), ())
        cls = AnomalyClass(AnomalyTag.HYPERBOLIC, eta)
        return PredictionReport(cls, eta, 1.0, None, 1.5, True, BasisChange.identity(), ())

    raise TypeError(f"unknown model spec {type(spec).__name__}")


def raw_transfer(spec: ModelSpec, sample: float) -> Unimodular2x2:
    """Exact unreduced transfer matrix for one disorder value.

    Chain: ((2 - omega^2 m, -1), (1, 0)); Anderson: ((E - lam v, -1), (1, 0))
    with E = 2 + w lam.  The Kronig-Penney raw form is not provided (only
    the reduced matrices are specified)."""
    if isinstance(spec, HarmonicChain):
        return Unimodular2x2(2.0 - spec.coupling**2 * sample, -1.0, 1.0, 0.0)
    if isinstance(spec, AndersonEdge):
        e = 2.0 + spec.w * spec.coupling
        return Unimodular2x2(e - spec.coupling * sample, -1.0, 1.0, 0.0)
    if isinstance(spec, KronigPenney):
        raise ValueError("raw transfer form not specified for the Kronig-Penney reduction")
    raise TypeError(f"unknown model spec {type(spec).__name__}")


def raw_matrix_ensemble(spec: ModelSpec) -> tuple[tuple[float, ...], list[Unimodular2x2]]:
    """Weights and raw transfer matrices for direct product simulation."""
    if isinstance(spec, HarmonicChain):
        return spec.weights, [raw_transfer(spec, m) for m in spec.masses]
    if isinstance(spec, AndersonEdge):
        return spec.weights, [raw_transfer(spec, v) for v in spec.potentials]
    raise ValueError("raw matrices are available for the chain and Anderson models only")


def model_prediction(spec: ModelSpec, order: int = 64) -> PredictionReport:
    """Generic pipeline prediction of the reduced ensemble."""
    ens, _ = build_ensemble(spec)
    return predict(ens, order)

"""Projective action of SL(2,R) on the half circle [0, pi).

Directions of R^2 are parametrized by theta with e_theta = (cos theta,
sin theta); a matrix T acts by renormalizing T e_theta.  The per-step
log-norm gain of that action drives every Lyapunov estimate, and the
small-coupling expansion of the action is what the predictors integrate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sl2 import Ensemble, TracelessGenerator, Unimodular2x2, ensemble_moments

__all__ = [
    "PI",
    "reduce_angle",
    "angle_of_vector",
    "unit_vector",
    "projective_act",
    "log_norm_gain",
    "p_function",
    "drift_expansion",
    "zoom",
    "unzoom",
    "BasisChange",
    "conjugate_ensemble",
]

PI = math.pi


def reduce_angle(theta: float) -> float:
    """Canonical representative in [0, pi); input within one period of it."""
    if theta >= PI:
        theta -= PI
    elif theta < 0.0:
        theta += PI
    return 0.0 if theta == PI else theta


def unit_vector(theta: float) -> np.ndarray:
    return np.array([math.cos(theta), math.sin(theta)])


def angle_of_vector(v) -> float:
    """The unique theta in [0, pi) with v parallel to e_theta."""
    x, y = float(v[0]), float(v[1])
    if x == 0.0 and y == 0.0:
        raise ValueError("degenerate direction: zero vector has no angle")
    t = math.atan2(y, x)
    if t < 0.0:
        t += PI
    return 0.0 if t == PI else t


def projective_act(t: Unimodular2x2, theta: float) -> float:
    """Angle of T e_theta; the exact map that drives all simulation."""
    c, s = math.cos(theta), math.sin(theta)
    return angle_of_vector((t.t11 * c + t.t12 * s, t.t21 * c + t.t22 * s))


def log_norm_gain(t: Unimodular2x2, theta: float) -> float:
    """log ||T e_theta||, computed from the unit vector so it never overflows."""
    c, s = math.cos(theta), math.sin(theta)
    x = t.t11 * c + t.t12 * s
    y = t.t21 * c + t.t22 * s
    return 0.5 * math.log(x * x + y * y)


def p_function(g: TracelessGenerator, theta: float) -> float:
    """First-order angular velocity -a sin2t - b sin^2 t + c cos^2 t."""
    s, c = math.sin(theta), math.cos(theta)
    return -g.a * (2.0 * s * c) - g.b * s * s + g.c * c * c


def drift_expansion(ens: Ensemble, lam: float, theta: float) -> float:
    """E[S(theta)] - theta through second order in the coupling.

    Equals lam*E[p](theta) + lam^2*(E[q](theta) + E[p p']/2), with q taken
    from the constant part of Q.
    """
    mom = ensemble_moments(ens)
    return lam * float(mom.mean_p_theta(theta)) + lam * lam * float(mom.drift2(theta))


def zoom(lam: float, theta_hat: float) -> float:
    """Magnify the neighborhood of pi/2: arctan(tan(theta_hat)/sqrt(lam)).

    Fixes 0 and pi/2 and is a monotone bijection of [0, pi) for lam > 0.
    """
    if lam <= 0.0:
        raise ValueError("zoom needs lam > 0")
    t = math.atan(math.tan(theta_hat) / math.sqrt(lam))
    if theta_hat > 0.5 * PI:
        t += PI
    elif theta_hat == 0.5 * PI:
        t = 0.5 * PI
    return reduce_angle(t)


def unzoom(lam: float, theta: float) -> float:
    """Inverse of :func:`zoom`: arctan(sqrt(lam) * tan(theta))."""
    if lam <= 0.0:
        raise ValueError("unzoom needs lam > 0")
    t = math.atan(math.sqrt(lam) * math.tan(theta))
    if theta > 0.5 * PI:
        t += PI
    elif theta == 0.5 * PI:
        t = 0.5 * PI
    return reduce_angle(t)


@dataclass(frozen=True)
class BasisChange:
    """Invertible change of basis T -> M T M^{-1} (det need not be 1)."""

    m: np.ndarray
    label: str = "custom"

    def __post_init__(self) -> None:
        m = np.asarray(self.m, dtype=float)
        if m.shape != (2, 2):
            raise ValueError("basis change must be 2x2")
        if abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]) <= 1e-12:
            raise ValueError("basis change must be invertible")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @staticmethod
    def identity(label: str = "custom") -> "BasisChange":
        return BasisChange(np.eye(2), label)

    def det(self) -> float:
        return float(self.m[0, 0] * self.m[1, 1] - self.m[0, 1] * self.m[1, 0])

    def inverse(self) -> "BasisChange":
        return BasisChange(np.linalg.inv(self.m), self.label)

    def compose(self, other: "BasisChange") -> "BasisChange":
        """self after other: x -> self.m @ other.m @ x."""
        return BasisChange(self.m @ other.m, self.label)


def conjugate_ensemble(m: BasisChange | np.ndarray, ens: Ensemble) -> Ensemble:
    """Conjugate every atom generator by M; weights unchanged."""
    mat = m.m if isinstance(m, BasisChange) else np.asarray(m, dtype=float)
    return Ensemble(
        ens.weights,
        tuple(p.conjugated(mat) for p in ens.generators),
        tuple(q.conjugated(mat) for q in ens.corrections),
    )

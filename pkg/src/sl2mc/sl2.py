"""Exact arithmetic for sl(2,R) generators, SL(2,R) matrices and ensembles.

A generator is stored by the three free entries (a, b, c) of

    G = ( a   b )
        ( c  -a )

and a transfer matrix close to the identity is exp(lam*P + lam^2*Q(lam))
with P a generator and Q a low-degree polynomial in lam with generator
coefficients.  Ensembles are finite lists of weighted (P, Q) atoms, which
keeps every moment computation exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fourier import FourierDensity

__all__ = [
    "TracelessGenerator",
    "Unimodular2x2",
    "QPolynomial",
    "Ensemble",
    "MomentTable",
    "exponential",
    "build_transfer",
    "ensemble_moments",
    "sample_atom",
]

DET_TOL = 1e-12
MAX_Q_DEGREE = 2


@dataclass(frozen=True)
class TracelessGenerator:
    """Element of sl(2,R): the matrix ((a, b), (c, -a))."""

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0

    def det(self) -> float:
        return -self.a * self.a - self.b * self.c

    def norm(self) -> float:
        """Frobenius norm of the 2x2 matrix."""
        return math.sqrt(2.0 * self.a * self.a + self.b * self.b + self.c * self.c)

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, -self.a]])

    def __add__(self, other: "TracelessGenerator") -> "TracelessGenerator":
        return TracelessGenerator(self.a + other.a, self.b + other.b, self.c + other.c)

    def __sub__(self, other: "TracelessGenerator") -> "TracelessGenerator":
        return TracelessGenerator(self.a - other.a, self.b - other.b, self.c - other.c)

    def __mul__(self, s: float) -> "TracelessGenerator":
        return TracelessGenerator(self.a * s, self.b * s, self.c * s)

    __rmul__ = __mul__

    def conjugated(self, m: np.ndarray) -> "TracelessGenerator":
        """M G M^{-1}, traceless by construction.

        The trace part cancels analytically; it is removed explicitly so
        roundoff can never accumulate into a trace.
        """
        m = np.asarray(m, dtype=float)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det) <= 1e-12:
            raise ValueError("basis change must be invertible")
        g = self.as_matrix()
        adj = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])
        y = m @ g @ adj / det
        return TracelessGenerator(0.5 * (y[0, 0] - y[1, 1]), y[0, 1], y[1, 0])


TracelessGenerator.ZERO = TracelessGenerator(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Unimodular2x2:
    """SL(2,R) matrix; |det - 1| <= 1e-12 is enforced at construction.

    The tolerance scales with the squared entry size beyond norm one:
    the float det of a large matrix carries cancellation error of that
    order even when the matrix is exactly unimodular.
    """

    t11: float
    t12: float
    t21: float
    t22: float

    def __post_init__(self) -> None:
        scale = max(abs(self.t11), abs(self.t12), abs(self.t21), abs(self.t22), 1.0)
        if abs(self.det() - 1.0) > DET_TOL * scale * scale:
            raise ValueError(f"matrix has det {self.det()!r}, not unimodular")

    def det(self) -> float:
        return self.t11 * self.t22 - self.t12 * self.t21

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.t11, self.t12], [self.t21, self.t22]])

    @staticmethod
    def identity() -> "Unimodular2x2":
        return Unimodular2x2(1.0, 0.0, 0.0, 1.0)

    @staticmethod
    def from_matrix(m: np.ndarray) -> "Unimodular2x2":
        m = np.asarray(m, dtype=float)
        return Unimodular2x2(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def __matmul__(self, other: "Unimodular2x2") -> "Unimodular2x2":
        return Unimodular2x2(
            self.t11 * other.t11 + self.t12 * other.t21,
            self.t11 * other.t12 + self.t12 * other.t22,
            self.t21 * other.t11 + self.t22 * other.t21,
            self.t21 * other.t12 + self.t22 * other.t22,
        )

    def inverse(self) -> "Unimodular2x2":
        return Unimodular2x2(self.t22, -self.t12, -self.t21, self.t11)

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return np.array([self.t11 * v[0] + self.t12 * v[1], self.t21 * v[0] + self.t22 * v[1]])


@dataclass(frozen=True)
class QPolynomial:
    """Second-order correction Q(lam) = sum_j lam^j Q_j, degree <= 2."""

    coefficients: tuple[TracelessGenerator, ...] = ()

    def __post_init__(self) -> None:
        if len(self.coefficients) > MAX_Q_DEGREE + 1:
            raise ValueError(f"Q degree limited to {MAX_Q_DEGREE}")

    @staticmethod
    def zero() -> "QPolynomial":
        return QPolynomial(())

    @staticmethod
    def constant(g: TracelessGenerator) -> "QPolynomial":
        return QPolynomial((g,))

    @property
    def q0(self) -> TracelessGenerator:
        return self.coefficients[0] if self.coefficients else TracelessGenerator.ZERO

    def at(self, lam: float) -> TracelessGenerator:
        acc = TracelessGenerator.ZERO
        for j, g in enumerate(self.coefficients):
            acc = acc + (lam**j) * g
        return acc

    def conjugated(self, m: np.ndarray) -> "QPolynomial":
        return QPolynomial(tuple(g.conjugated(m) for g in self.coefficients))


@dataclass(frozen=True)
class Ensemble:
    """Finite-support distribution over (P, Q) generator pairs."""

    weights: tuple[float, ...]
    generators: tuple[TracelessGenerator, ...]
    corrections: tuple[QPolynomial, ...]

    def __post_init__(self) -> None:
        n = len(self.weights)
        if n == 0:
            raise ValueError("ensemble needs at least one atom")
        if len(self.generators) != n or len(self.corrections) != n:
            raise ValueError("weights, generators, corrections must align")
        if min(self.weights) < 0.0:
            raise ValueError("weights must be nonnegative")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {sum(self.weights)!r}, not 1")

    @staticmethod
    def from_atoms(atoms) -> "Ensemble":
        """Atoms are (weight, P) or (weight, P, Q) tuples."""
        ws, ps, qs = [], [], []
        for atom in atoms:
            if len(atom) == 2:
                w, p = atom
                q = QPolynomial.zero()
            else:
                w, p, q = atom
            if isinstance(q, TracelessGenerator):
                q = QPolynomial.constant(q)
            ws.append(float(w))
            ps.append(p)
            qs.append(q)
        return Ensemble(tuple(ws), tuple(ps), tuple(qs))

    def __len__(self) -> int:
        return len(self.weights)

    def atoms(self):
        return zip(self.weights, self.generators, self.corrections)

    def mean_generator(self) -> TracelessGenerator:
        acc = TracelessGenerator.ZERO
        for w, p, _ in self.atoms():
            acc = acc + w * p
        return acc

    def cumulative_weights(self) -> np.ndarray:
        return np.cumsum(np.asarray(self.weights, dtype=float))

    def max_generator_norm(self) -> float:
        return max(p.norm() for p in self.generators)


# ---------------------------------------------------------------------------
# matrix exponential of a generator
# ---------------------------------------------------------------------------

_SINCLIKE_CUT = 1e-8  # on x = lam^2 * (-det G); |lam*d| < 1e-4


def _cosh_sinclike(x: float) -> tuple[float, float]:
    """cosh(sqrt(x)) and sinh(sqrt(x))/sqrt(x) for signed x = (lam*d)^2."""
    if abs(x) < _SINCLIKE_CUT:
        # series keeps the nilpotent/near-parabolic branch free of cancellation
        return 1.0 + x / 2.0 + x * x / 24.0, 1.0 + x / 6.0 + x * x / 120.0
    if x > 0.0:
        r = math.sqrt(x)
        return math.cosh(r), math.sinh(r) / r
    r = math.sqrt(-x)
    return math.cos(r), math.sin(r) / r


def exponential(lam: float, g: TracelessGenerator) -> Unimodular2x2:
    """exp(lam*G) via the closed form cosh(lam*d)*I + (sinh(lam*d)/d)*G.

    d = sqrt(-det G) may be real (hyperbolic), zero (parabolic) or
    imaginary (elliptic, where cosh/sinh become cos/sin).
    """
    x = lam * lam * (-g.det())
    ch, sl = _cosh_sinclike(x)
    s = lam * sl
    return Unimodular2x2(ch + s * g.a, s * g.b, s * g.c, ch - s * g.a)


def build_transfer(lam: float, p: TracelessGenerator, q: QPolynomial) -> Unimodular2x2:
    """exp(lam*P + lam^2*Q(lam)): assemble the generator, then exponentiate."""
    if lam < 0.0:
        raise ValueError("coupling lam must be >= 0")
    gen = lam * p + (lam * lam) * q.at(lam)
    return exponential(1.0, gen)


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentTable:
    """Every ensemble expectation the predictors need.

    The theta-dependent entries are exact trig polynomials (harmonics 0, 2, 4)
    of the functions entering the projective dynamics:

    * ``mean_p_theta``  E[p(theta)]        with p from the generator P
    * ``p_sq``          E[p(theta)^2]
    * ``h_sq``          E[h(theta)^2]      h = p1 cos2theta + (p2+p3)/2 sin2theta
    * ``h_p``           E[h(theta) p(theta)]
    * ``mean_h``        E[h(theta)]
    * ``drift2``        E[q(theta) + p(theta) p'(theta)/2]   with q from Q^(0)
    * ``gain2``         coefficient of lam^2 in E[per-step log gain]
    """

    mean_p: TracelessGenerator
    det_mean_p: float
    second_moment: np.ndarray = field(repr=False)  # 3x3, E[p_i p_j]
    mean_q0: TracelessGenerator
    mean_p_theta: FourierDensity
    p_sq: FourierDensity
    h_sq: FourierDensity
    h_p: FourierDensity
    mean_h: FourierDensity
    drift2: FourierDensity
    gain2: FourierDensity

    def covariance(self) -> np.ndarray:
        m = np.array([self.mean_p.a, self.mean_p.b, self.mean_p.c])
        return self.second_moment - np.outer(m, m)


def ensemble_moments(ens: Ensemble) -> MomentTable:
    mean_p = ens.mean_generator()
    second = np.zeros((3, 3))
    mean_q0 = TracelessGenerator.ZERO

    # accumulators for the trig polynomials: (const, c2, s2, c4, s4)
    mp = np.zeros(5)
    psq = np.zeros(5)
    hsq = np.zeros(5)
    hp = np.zeros(5)
    mh = np.zeros(5)
    dr2 = np.zeros(5)
    g2 = np.zeros(5)

    for w, p, q in ens.atoms():
        a, b, c = p.a, p.b, p.c
        vec = np.array([a, b, c])
        second += w * np.outer(vec, vec)
        mean_q0 = mean_q0 + w * q.q0

        alpha = 0.5 * (c - b)  # p(theta) = alpha + beta cos2 + gamma sin2
        beta = 0.5 * (b + c)
        gam = -a
        aq, bq, cq = q.q0.a, q.q0.b, q.q0.c
        alq = 0.5 * (cq - bq)
        beq = 0.5 * (bq + cq)
        gaq = -aq

        mp += w * np.array([alpha, beta, gam, 0.0, 0.0])
        psq += w * np.array(
            [
                alpha * alpha + 0.5 * (beta * beta + gam * gam),
                2.0 * alpha * beta,
                2.0 * alpha * gam,
                0.5 * (beta * beta - gam * gam),
                beta * gam,
            ]
        )
        hsq += w * np.array(
            [
                0.5 * (a * a + beta * beta),
                0.0,
                0.0,
                0.5 * (a * a - beta * beta),
                a * beta,
            ]
        )
        hp += w * np.array(
            [
                0.5 * (a * beta + beta * gam),
                a * alpha,
                alpha * beta,
                0.5 * (a * beta - beta * gam),
                0.5 * (a * gam + beta * beta),
            ]
        )
        mh += w * np.array([0.0, a, beta, 0.0, 0.0])
        # q(theta) + p p' / 2
        dr2 += w * np.array(
            [
                alq,
                beq + alpha * gam,
                gaq - alpha * beta,
                beta * gam,
                0.5 * (gam * gam - beta * beta),
            ]
        )
        # lam^2 coefficient of the expected log gain
        g2 += w * np.array(
            [
                0.5 * (a * a + beta * beta),
                aq + alpha * beta,
                beq - a * alpha,
                -0.5 * (a * a - beta * beta),
                -a * beta,
            ]
        )

    def tp(v: np.ndarray) -> FourierDensity:
        return FourierDensity.from_trig(v[0], cos_coeffs=(v[1], v[3]), sin_coeffs=(v[2], v[4]))

    return MomentTable(
        mean_p=mean_p,
        det_mean_p=mean_p.det(),
        second_moment=second,
        mean_q0=mean_q0,
        mean_p_theta=tp(mp),
        p_sq=tp(psq),
        h_sq=tp(hsq),
        h_p=tp(hp),
        mean_h=tp(mh),
        drift2=tp(dr2),
        gain2=tp(g2),
    )


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def sample_atom(ens: Ensemble, rng_state) -> tuple[TracelessGenerator, QPolynomial]:
    """Draw one atom; consumes exactly one uniform from the stream.

    ``rng_state`` is a :class:`sl2mc.rng.SplitMix64`.  Atom i is selected as
    the smallest i with u < cumweights[i].
    """
    u = rng_state.uniform()
    cum = ens.cumulative_weights()
    idx = int(np.searchsorted(cum, u, side="right"))
    if idx >= len(ens):
        idx = len(ens) - 1
    return ens.generators[idx], ens.corrections[idx]

"""Pi-periodic real functions stored as truncated Fourier series.

A function on the half circle [0, pi) is written

    f(theta) = sum_{k=-K..K} c_k exp(2i k theta),   c_{-k} = conj(c_k),

so only the coefficients for k >= 0 are stored.  In real form

    f(theta) = a_0 + sum_{k>=1} a_k cos(2k theta) + b_k sin(2k theta)

with a_k = 2 Re c_k and b_k = -2 Im c_k.  Densities, drift/diffusion
coefficients and all prediction integrands are band limited, so this
representation is exact for them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["FourierDensity"]


@dataclass(frozen=True)
class FourierDensity:
    """Truncated Fourier series of a real pi-periodic function.

    ``coeffs[k]`` is c_k for k = 0..K; negative harmonics are implied by
    conjugate symmetry.  c_0 must be real (its imaginary part is dropped
    at construction if below 1e-12, rejected otherwise).
    """

    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=np.complex128).copy()
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a non-empty 1-d array")
        if abs(c[0].imag) > 1e-12 * (1.0 + abs(c[0].real)):
            raise ValueError("c_0 of a real function must be real")
        c[0] = c[0].real
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_trig(const: float, cos_coeffs=(), sin_coeffs=()) -> "FourierDensity":
        """Build from real coefficients of 1, cos(2k theta), sin(2k theta)."""
        a = np.asarray(cos_coeffs, dtype=float)
        b = np.asarray(sin_coeffs, dtype=float)
        K = max(a.size, b.size)
        c = np.zeros(K + 1, dtype=np.complex128)
        c[0] = const
        for k in range(1, K + 1):
            ak = a[k - 1] if k <= a.size else 0.0
            bk = b[k - 1] if k <= b.size else 0.0
            c[k] = 0.5 * (ak - 1j * bk)
        return FourierDensity(c)

    @staticmethod
    def constant(value: float) -> "FourierDensity":
        return FourierDensity(np.array([value], dtype=np.complex128))

    @staticmethod
    def zero() -> "FourierDensity":
        return FourierDensity.constant(0.0)

    @staticmethod
    def from_samples(values: np.ndarray, order: int) -> "FourierDensity":
        """Project equispaced samples on [0, pi) onto harmonics <= order.

        The sample count must exceed 2*order; aliasing is the caller's
        responsibility (used for band-limited functions only).
        """
        values = np.asarray(values, dtype=float)
        n = values.size
        if n <= 2 * order:
            raise ValueError("need more than 2*order samples")
        spec = np.fft.rfft(values) / n
        c = np.zeros(order + 1, dtype=np.complex128)
        c[0] = spec[0].real
        # theta_j = pi*j/n makes exp(2ik theta_j) the DFT mode exp(2pi i kj/n),
        # so c_k is spec[k] as-is.
        m = min(order, spec.size - 1)
        c[1 : m + 1] = spec[1 : m + 1]
        return FourierDensity(c)

    # -- basic structure ----------------------------------------------

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def const(self) -> float:
        return float(self.coeffs[0].real)

    def cos_coeff(self, k: int) -> float:
        if k == 0:
            return self.const
        return 2.0 * float(self.coeffs[k].real) if k <= self.order else 0.0

    def sin_coeff(self, k: int) -> float:
        if k == 0 or k > self.order:
            return 0.0
        return -2.0 * float(self.coeffs[k].imag)

    def full_coeffs(self) -> np.ndarray:
        """Coefficient array for k = -K..K."""
        K = self.order
        full = np.zeros(2 * K + 1, dtype=np.complex128)
        full[K:] = self.coeffs
        full[:K] = np.conj(self.coeffs[1:][::-1])
        return full

    def truncated(self, order: int) -> "FourierDensity":
        c = np.zeros(order + 1, dtype=np.complex128)
        m = min(order, self.order)
        c[: m + 1] = self.coeffs[: m + 1]
        return FourierDensity(c)

    # -- evaluation and calculus ---------------------------------------

    def __call__(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        out = np.full(theta.shape, self.const)
        for k in range(1, self.order + 1):
            ck = self.coeffs[k]
            out = out + 2.0 * ck.real * np.cos(2 * k * theta) - 2.0 * ck.imag * np.sin(2 * k * theta)
        return out

    def derivative(self) -> "FourierDensity":
        k = np.arange(self.order + 1)
        return FourierDensity(2j * k * self.coeffs)

    def antiderivative(self) -> "FourierDensity":
        """Periodic antiderivative with zero mean; requires const == 0."""
        if abs(self.const) > 1e-12:
            raise ValueError("only zero-mean functions have a periodic antiderivative")
        c = np.zeros_like(self.coeffs)
        for k in range(1, self.order + 1):
            c[k] = self.coeffs[k] / (2j * k)
        return FourierDensity(c)

    def integral(self) -> float:
        """Integral over one period [0, pi]."""
        return float(np.pi * self.const)

    # -- algebra --------------------------------------------------------

    def __add__(self, other: "FourierDensity") -> "FourierDensity":
        K = max(self.order, other.order)
        c = np.zeros(K + 1, dtype=np.complex128)
        c[: self.order + 1] += self.coeffs
        c[: other.order + 1] += other.coeffs
        return FourierDensity(c)

    def __sub__(self, other: "FourierDensity") -> "FourierDensity":
        return self + (other * -1.0)

    def __mul__(self, scalar: float) -> "FourierDensity":
        return FourierDensity(self.coeffs * float(scalar))

    __rmul__ = __mul__

    def product(self, other: "FourierDensity") -> "FourierDensity":
        """Pointwise product (exact convolution; order adds)."""
        full = np.convolve(self.full_coeffs(), other.full_coeffs())
        K = self.order + other.order  # harmonic 0 sits at index K of the convolution
        return FourierDensity(full[K:])

    def inner(self, other: "FourierDensity") -> float:
        """<self|other> = integral of self*other over [0, pi]."""
        K = min(self.order, other.order)
        s = self.coeffs[0].real * other.coeffs[0].real
        if K >= 1:
            s += 2.0 * np.sum(self.coeffs[1 : K + 1] * np.conj(other.coeffs[1 : K + 1])).real
        return float(np.pi * s)

    # -- density checks --------------------------------------------------

    def grid(self, n: int | None = None) -> np.ndarray:
        n = n if n is not None else max(4 * self.order, 64)
        return np.linspace(0.0, np.pi, n, endpoint=False)

    def min_value(self, n: int | None = None) -> float:
        return float(np.min(self(self.grid(n))))

    def validate_density(self, tol_neg: float = -1e-9, tol_int: float = 1e-10) -> None:
        if abs(self.integral() - 1.0) > tol_int:
            raise ValueError(f"density integral {self.integral()} != 1")
        if self.min_value() < tol_neg:
            raise ValueError(f"density attains {self.min_value()} < {tol_neg}")

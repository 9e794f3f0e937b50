"""Periodic functions on R/Z and the basic Fourier multipliers.

A :class:`SpectralFunction` holds grid samples at ``x_j = j/N`` together
with the Fourier coefficients

    u_hat(k) = (1/N) sum_j u(x_j) exp(-2 pi i k x_j),

stored in FFT order (``numpy.fft.fftfreq(N, 1/N)``).  The Nyquist mode is
always zero, so the two representations are an exact transform pair.

Physical operators use ``D``-symbol ``2 pi i k`` and ``Lambda = H D`` with
symbol ``2 pi |k|``.  The homogeneous half norm is reported with the
normalized weight ``|k|``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, DomainError, RepresentationError

MIN_MODES = 8
#: absolute tolerance on |u_hat(0)| before an inverse rejects its input
MEAN_ZERO_TOL = 1e-12
HERMITIAN_TOL = 1e-12


def wavenumbers(n: int) -> np.ndarray:
    """Integer wavenumbers in FFT order; the Nyquist slot reads ``-n/2``."""
    return np.fft.fftfreq(n, 1.0 / n).round().astype(np.int64)


def grid(n: int) -> np.ndarray:
    return np.arange(n) / n


def check_modes(n: int) -> int:
    if int(n) != n or n < MIN_MODES or n % 2:
        raise ConfigurationError(
            f"grid size must be an even integer >= {MIN_MODES}, got {n!r}")
    return int(n)


def dealias_cutoff(n: int) -> int:
    """Largest wavenumber kept by the 2/3 rule (quadratic products alias-free)."""
    return (n - 1) // 3


@dataclass(frozen=True, eq=False)
class SpectralFunction:
    """A periodic function sampled on a uniform grid of ``n_modes`` points.

    Build instances with :func:`analyze`, :meth:`from_coeffs` or
    :meth:`from_callable`; the constructor expects already consistent data.
    Complex-valued functions (e.g. the exponentials ``e_k``) are allowed;
    :attr:`is_real` tells them apart.
    """

    samples: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        self.samples.setflags(write=False)
        self.coeffs.setflags(write=False)

    @property
    def n_modes(self) -> int:
        return self.samples.shape[0]

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.samples)

    @cached_property
    def k(self) -> np.ndarray:
        return wavenumbers(self.n_modes)

    @classmethod
    def from_coeffs(cls, coeffs, real: bool = True) -> "SpectralFunction":
        coeffs = np.array(coeffs, dtype=complex)
        coeffs[coeffs.shape[0] // 2] = 0.0
        return cls(synthesize(coeffs, real=real), coeffs)

    @classmethod
    def from_callable(cls, func, n: int) -> "SpectralFunction":
        return analyze(func(grid(check_modes(n))))

    @classmethod
    def zeros(cls, n: int) -> "SpectralFunction":
        n = check_modes(n)
        return cls(np.zeros(n), np.zeros(n, dtype=complex))

    @classmethod
    def constant(cls, value: float, n: int) -> "SpectralFunction":
        return analyze(np.full(check_modes(n), float(value)))

    @classmethod
    def exponential(cls, m: int, n: int) -> "SpectralFunction":
        """The complex exponential ``e_m(x) = exp(2 pi i m x)``."""
        n = check_modes(n)
        if abs(m) >= n // 2:
            raise ConfigurationError(f"mode {m} not resolved on {n} points")
        coeffs = np.zeros(n, dtype=complex)
        coeffs[m % n] = 1.0
        return cls.from_coeffs(coeffs, real=False)

    def coeff(self, m: int) -> complex:
        """Coefficient of wavenumber ``m``; zero outside the resolved band."""
        n = self.n_modes
        if abs(m) >= n // 2:
            return 0j
        return complex(self.coeffs[m % n])

    @property
    def mean(self) -> complex | float:
        c = self.coeffs[0]
        return float(c.real) if self.is_real else complex(c)

    def value_at_zero(self):
        return self.samples[0]

    def with_coeffs(self, coeffs) -> "SpectralFunction":
        coeffs = np.asarray(coeffs, dtype=complex)
        samples = np.fft.ifft(coeffs) * self.n_modes
        if self.is_real:
            samples = samples.real
        return SpectralFunction(samples, coeffs)

    def _check_grid(self, other: "SpectralFunction"):
        if other.n_modes != self.n_modes:
            raise ConfigurationError(
                f"grid mismatch: {self.n_modes} vs {other.n_modes}")

    def __add__(self, other):
        if isinstance(other, SpectralFunction):
            self._check_grid(other)
            return SpectralFunction(self.samples + other.samples,
                                    self.coeffs + other.coeffs)
        return analyze(self.samples + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, SpectralFunction):
            self._check_grid(other)
            return SpectralFunction(self.samples - other.samples,
                                    self.coeffs - other.coeffs)
        return analyze(self.samples - other)

    def __neg__(self):
        return SpectralFunction(-self.samples, -self.coeffs)

    def __mul__(self, other):
        """Scalar scaling, or the raw (aliased) pointwise product."""
        if isinstance(other, SpectralFunction):
            self._check_grid(other)
            return analyze(self.samples * other.samples)
        return SpectralFunction(self.samples * other, self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return SpectralFunction(self.samples / scalar, self.coeffs / scalar)

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def __repr__(self):
        kind = "real" if self.is_real else "complex"
        return f"SpectralFunction(n_modes={self.n_modes}, {kind})"


def analyze(samples) -> SpectralFunction:
    """Fourier analysis of grid samples; the Nyquist coefficient is zeroed."""
    samples = np.asarray(samples)
    if samples.ndim != 1:
        raise ConfigurationError("samples must be one-dimensional")
    n = check_modes(samples.shape[0])
    real = not np.iscomplexobj(samples)
    coeffs = np.fft.fft(samples) / n
    if coeffs[n // 2] != 0:
        coeffs[n // 2] = 0.0
        samples = np.fft.ifft(coeffs) * n
        if real:
            samples = samples.real
    else:
        samples = np.array(samples, dtype=float if real else complex)
    return SpectralFunction(samples, coeffs)


def synthesize(coeffs, real: bool = True) -> np.ndarray:
    """Grid samples from FFT-ordered coefficients.

    With ``real=True`` the coefficients must be Hermitian symmetric,
    ``c(-k) = conj(c(k))``, otherwise :class:`RepresentationError`.
    """
    if isinstance(coeffs, SpectralFunction):
        real = coeffs.is_real
        coeffs = coeffs.coeffs
    coeffs = np.asarray(coeffs, dtype=complex)
    n = check_modes(coeffs.shape[0])
    if real:
        mirrored = np.conj(coeffs[(-np.arange(n)) % n])
        mirrored[n // 2] = coeffs[n // 2]
        scale = max(1.0, float(np.max(np.abs(coeffs))))
        if np.max(np.abs(coeffs - mirrored)) > HERMITIAN_TOL * scale:
            raise RepresentationError(
                "coefficients are not Hermitian symmetric; "
                "they do not describe a real function")
    samples = np.fft.ifft(coeffs) * n
    return samples.real.copy() if real else samples


def apply_symbol(u: SpectralFunction, symbol: np.ndarray) -> SpectralFunction:
    """Multiply coefficients by symbol values given in FFT order."""
    return u.with_coeffs(u.coeffs * symbol)


def hilbert(u: SpectralFunction) -> SpectralFunction:
    """Hilbert transform, symbol ``-i sgn(k)`` with ``sgn(0) = 0``."""
    return apply_symbol(u, -1j * np.sign(u.k))


def derivative(u: SpectralFunction, order: int = 1) -> SpectralFunction:
    return apply_symbol(u, (2j * np.pi * u.k) ** order)


def _require_mean_zero(m: SpectralFunction, what: str) -> np.ndarray:
    mean = m.coeffs[0]
    if abs(mean) > MEAN_ZERO_TOL:
        raise DomainError(
            f"{what}: input has mean {mean:.3e}; not in the image of D "
            "(mean-zero functions)")
    coeffs = m.coeffs.copy()
    coeffs[0] = 0.0
    return coeffs


def chart_normalize(coeffs: np.ndarray) -> np.ndarray:
    """Fix the mean so that the synthesized function vanishes at x = 0."""
    coeffs = coeffs.copy()
    coeffs[0] = 0.0
    coeffs[0] = -coeffs.sum()
    return coeffs


def divide_symbol(m: SpectralFunction, symbol: np.ndarray,
                  what: str = "inverse") -> SpectralFunction:
    """Solve ``P u = m`` for mean-zero ``m``, normalized by ``u(0) = 0``.

    ``symbol`` must be nonzero away from ``k = 0``.
    """
    coeffs = _require_mean_zero(m, what)
    safe = symbol.copy()
    safe[0] = 1.0
    safe[m.n_modes // 2] = 1.0
    return m.with_coeffs(chart_normalize(coeffs / safe))


def antiderivative(m: SpectralFunction) -> SpectralFunction:
    """``u(x) = int_0^x m(t) dt`` for mean-zero ``m``."""
    return divide_symbol(m, 2j * np.pi * m.k, "antiderivative")


def lambda_symbol(n: int) -> np.ndarray:
    return 2 * np.pi * np.abs(wavenumbers(n)).astype(float)


def lambda_apply(u: SpectralFunction) -> SpectralFunction:
    """``Lambda = H D``, symbol ``2 pi |k|``."""
    return apply_symbol(u, lambda_symbol(u.n_modes))


def lambda_invert(m: SpectralFunction) -> SpectralFunction:
    """Inverse of ``Lambda`` onto the chart hyperplane ``u(0) = 0``."""
    return divide_symbol(m, lambda_symbol(m.n_modes), "lambda_invert")


def h_half_norm_sq(u: SpectralFunction) -> float:
    """Homogeneous half norm squared, ``sum_k |k| |u_hat(k)|^2``."""
    return float(np.sum(np.abs(u.k) * np.abs(u.coeffs) ** 2))


def sobolev_norm_sq(u: SpectralFunction, k: float) -> float:
    """``sum_j (1 + j^2)^k |u_hat(j)|^2``; ``k = 0`` is the L2 norm (Parseval)."""
    if k < 0:
        raise ConfigurationError(f"Sobolev index must be >= 0, got {k}")
    weight = (1.0 + u.k.astype(float) ** 2) ** k
    return float(np.sum(weight * np.abs(u.coeffs) ** 2))


def homogeneous_norm_sq(u: SpectralFunction, k: int) -> float:
    """``sum_j |2 pi j|^(2k) |u_hat(j)|^2`` = ``||D^k u||_{L2}^2``."""
    weight = (2 * np.pi * np.abs(u.k).astype(float)) ** (2 * k)
    return float(np.sum(weight * np.abs(u.coeffs) ** 2))


def dealias(u: SpectralFunction) -> SpectralFunction:
    """Zero every mode above the 2/3-rule cutoff."""
    keep = np.abs(u.k) <= dealias_cutoff(u.n_modes)
    return u.with_coeffs(np.where(keep, u.coeffs, 0.0))


def product(u: SpectralFunction, v: SpectralFunction,
            dealiased: bool = True) -> SpectralFunction:
    w = u * v
    return dealias(w) if dealiased else w


def shift(u: SpectralFunction, j: int) -> SpectralFunction:
    """Cyclic grid shift: ``(shift u)(x_i) = u(x_{i + j})``."""
    return analyze(np.roll(u.samples, -j))


def _phases(x: np.ndarray, n_pos: int) -> np.ndarray:
    """``exp(2 pi i k x)`` for ``k = 0..n_pos-1`` as a (len(x), n_pos) array.

    Built from two short exponential tables (blocks of 8) to avoid
    len(x) * n_pos complex exponentials.
    """
    b = 8
    small = np.exp(2j * np.pi * np.multiply.outer(x, np.arange(b)))
    big = np.exp(2j * np.pi * np.multiply.outer(x, np.arange(0, n_pos, b)))
    return (big[:, :, None] * small[:, None, :]).reshape(x.shape[0], -1)[:, :n_pos]


def evaluate(u: SpectralFunction, x, order: int = 0) -> np.ndarray:
    """Sum the Fourier series of ``D^order u`` at arbitrary points ``x``.

    Exact for the band-limited interpolant; cost O(len(x) * N).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    c = u.coeffs * (2j * np.pi * u.k) ** order if order else u.coeffs
    half = u.n_modes // 2
    phase = _phases(x, half)
    if u.is_real:
        return c[0].real + 2.0 * (phase[:, 1:] @ c[1:half]).real
    neg = c[-1:-half:-1]
    return phase @ c[:half] + np.conj(phase[:, 1:]) @ neg

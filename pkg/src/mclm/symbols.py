"""Fourier-multiplier symbols and the derivative operators of a conjugation.

For a multiplier ``P`` and a diffeomorphism ``phi``, the n-th derivative of
``phi -> R_phi P R_phi^{-1}`` is ``R_phi P_n(u_1, ..., u_n) R_phi^{-1}`` where
``P_n`` satisfies

    P_0 = P,
    P_{n+1}(u_1..u_{n+1}) = [u_{n+1} D, P_n(u_1..u_n)]
                            - sum_i P_n(u_1, .., u_{i,x} u_{n+1}, .., u_n).

On exponentials ``P_n(e_{m_1}..e_{m_n}) e_{m_0} = p_n(m_0..m_n) e_{m_0+..+m_n}``
with ``p_n`` given by a scalar recurrence.  For the normalized symbol
``p_0(m) = |m|`` every ``p_n`` is ``(2 pi i)^n`` times an integer; the
integer part is computed here exactly, both by the recurrence and by the
alternating-sum closed form built on ``f_n(t) = t^(n-1) |t|``.  Physical
``Lambda`` (symbol ``2 pi |m|``) has symbols ``2 pi`` times these.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError
from .spectral import (SpectralFunction, apply_symbol, derivative,
                       divide_symbol, product)

TWO_PI_I = 2j * np.pi


@dataclass(frozen=True)
class MultiplierSymbol:
    """Symbol ``k -> p(k)`` of a Fourier multiplier of order ``order``.

    ``bound_const`` is a constant ``C`` with ``|p(m)| <= C |m|^order`` for
    ``m != 0``.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    order: int
    bound_const: float

    def __call__(self, k):
        return np.asarray(self.func(np.asarray(k)), dtype=complex)

    def apply(self, u: SpectralFunction) -> SpectralFunction:
        return apply_symbol(u, self(u.k))

    def solve(self, m: SpectralFunction) -> SpectralFunction:
        """Inverse on mean-zero functions, normalized by ``u(0) = 0``."""
        return divide_symbol(m, self(m.k), f"inverse of {self.name}")

    def is_hermitian(self, k_max: int) -> bool:
        k = np.arange(1, k_max + 1)
        return bool(np.allclose(self(-k), np.conj(self(k)), rtol=0, atol=1e-14))

    def is_real_even(self, k_max: int) -> bool:
        """True when the operator is L2-symmetric (real, even symbol)."""
        k = np.arange(-k_max, k_max + 1)
        vals = self(k)
        return bool(np.all(vals.imag == 0) and np.allclose(vals, vals[::-1]))

    def order_holds(self, k_max: int) -> bool:
        m = np.arange(-k_max, k_max + 1)
        m = m[m != 0]
        bound = self.bound_const * np.abs(m).astype(float) ** self.order
        return bool(np.all(np.abs(self(m)) <= bound * (1 + 1e-14)))

    def __repr__(self):
        return f"MultiplierSymbol({self.name!r}, order={self.order})"


IDENTITY = MultiplierSymbol("identity", lambda k: np.ones(np.shape(k)), 0, 1.0)
HILBERT = MultiplierSymbol("hilbert", lambda k: -1j * np.sign(k), 0, 1.0)
DERIVATIVE = MultiplierSymbol("derivative", lambda k: TWO_PI_I * k, 1, 2 * np.pi)
LAMBDA = MultiplierSymbol("lambda", lambda k: 2 * np.pi * np.abs(k), 1, 2 * np.pi)
LAMBDA_NORM = MultiplierSymbol("lambda_norm", lambda k: np.abs(k), 1, 1.0)
NEG_D2 = MultiplierSymbol(
    "neg_d2", lambda k: (2 * np.pi * np.asarray(k, dtype=float)) ** 2, 2,
    4 * np.pi ** 2)

INERTIA = {"hd": LAMBDA, "d2": NEG_D2}


def apply_multiplier(p: MultiplierSymbol, u: SpectralFunction) -> SpectralFunction:
    return p.apply(u)


# -- scalar symbol sequences ------------------------------------------------

def _check_tuple(m: Sequence[int], n: int) -> tuple:
    m = tuple(m)
    if len(m) != n + 1:
        raise DomainError(f"arity {n} symbol takes {n + 1} wavenumbers, got {len(m)}")
    if any(mj == 0 for mj in m):
        raise DomainError(f"wavenumbers must be nonzero, got {m}")
    return m


class MultilinearSymbol:
    """Symbol ``(m_0, ..., m_n) -> p_n(m_0, ..., m_n)`` of arity ``n``.

    Calling the object validates the tuple (all entries nonzero); the
    recurrence itself evaluates lower symbols on unrestricted tuples.
    """

    def __init__(self, n: int, raw: Callable[[tuple], complex]):
        self.n = n
        self._raw = raw

    @classmethod
    def from_multiplier(cls, p) -> "MultilinearSymbol":
        if isinstance(p, MultiplierSymbol):
            return cls(0, lambda m: complex(p(m[0])))
        return cls(0, lambda m: p(m[0]))

    def raw(self, m: tuple):
        return self._raw(m)

    def __call__(self, *m):
        if len(m) == 1 and isinstance(m[0], (tuple, list)):
            m = m[0]
        return self._raw(_check_tuple(m, self.n))


def symbol_p_next(p_n: MultilinearSymbol) -> MultilinearSymbol:
    """One step of the symbol recurrence, evaluated lazily per tuple.

    ``p_{n+1}(m_0..m_{n+1}) = 2 pi i [ (m_0+..+m_n) p_n(m_0..m_n)
    - sum_j m_j p_n(m_0, .., m_j + m_{n+1}, .., m_n) ]``.
    Integer-valued base symbols stay exact if ``factor`` is 1.
    """
    return _next(p_n, TWO_PI_I)


def _next(p_n: MultilinearSymbol, factor) -> MultilinearSymbol:
    n = p_n.n

    def raw(m):
        head, last = m[:n + 1], m[n + 1]
        total = sum(head) * p_n.raw(head)
        for j in range(n + 1):
            shifted = head[:j] + (head[j] + last,) + head[j + 1:]
            total -= head[j] * p_n.raw(shifted)
        return factor * total

    return MultilinearSymbol(n + 1, raw)


def lambda_integer_symbols(n_max: int) -> list[MultilinearSymbol]:
    """Exact integer parts ``q_n = p_n / (2 pi i)^n`` for ``p_0(m) = |m|``."""
    seq = [MultilinearSymbol(0, lambda m: abs(m[0]))]
    for _ in range(n_max):
        seq.append(_next(seq[-1], 1))
    return seq


def f_power(n: int, t):
    """``f_n(t) = t^(n-1) |t|``."""
    return t ** (n - 1) * abs(t)


def closed_form_integer(n: int, m: Sequence[int]) -> int:
    """Integer part of the alternating-sum closed form for ``p_n``."""
    m0, rest = m[0], m[1:]
    total = 0
    for p in range(n + 1):
        for subset in itertools.combinations(rest, p):
            total += (-1) ** p * f_power(n, m0 + sum(subset))
    return m0 * total


def symbol_p_closed(n: int, m: Sequence[int]) -> complex:
    """``p_n`` of the normalized symbol ``|m|`` from the closed form."""
    if n == 0:
        raise ConfigurationError("closed form starts at n = 1; use p_0(m) = |m|")
    m = _check_tuple(m, n)
    return TWO_PI_I ** n * closed_form_integer(n, m)


# -- vectorized integer evaluation ------------------------------------------

def nonzero_tuples(n: int, m_max: int, m0=None) -> np.ndarray:
    """All tuples in ``[-m_max, m_max]^(n+1)`` without zeros, shape (T, n+1).

    ``m0`` pins the first entry (used to chunk large enumerations).
    """
    vals = np.array([v for v in range(-m_max, m_max + 1) if v != 0], dtype=np.int64)
    axes = [np.array([m0], dtype=np.int64) if m0 is not None else vals] + [vals] * n
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=-1)


def recurrence_integer_array(n: int, m: np.ndarray) -> np.ndarray:
    """Integer parts ``q_n`` by the recurrence, vectorized over rows of ``m``."""
    if n == 0:
        return np.abs(m[:, 0])
    head, last = m[:, :n], m[:, n]
    out = head.sum(axis=1) * recurrence_integer_array(n - 1, head)
    for j in range(n):
        shifted = head.copy()
        shifted[:, j] += last
        out -= head[:, j] * recurrence_integer_array(n - 1, shifted)
    return out


def closed_form_integer_array(n: int, m: np.ndarray) -> np.ndarray:
    m0, rest = m[:, 0], m[:, 1:]
    total = np.zeros(m.shape[0], dtype=np.int64)
    for p in range(n + 1):
        for subset in itertools.combinations(range(n), p):
            t = m0 + rest[:, list(subset)].sum(axis=1)
            total += (-1) ** p * t ** (n - 1) * np.abs(t)
    return m0 * total


def order_bound_ratio(n: int, m: np.ndarray, constant: float | None = None) -> np.ndarray:
    """``|q_n| / (K |m_0| prod |m_j|)`` with ``K = n!`` by default."""
    K = math.factorial(n) if constant is None else constant
    q = np.abs(closed_form_integer_array(n, m)).astype(float)
    return q / (K * np.prod(np.abs(m), axis=1).astype(float))


# -- operator level -----------------------------------------------------------

def apply_P_n(P: MultiplierSymbol, directions: Sequence[SpectralFunction],
              v: SpectralFunction, dealiased: bool = True) -> SpectralFunction:
    """Apply ``P_n(u_1, ..., u_n)`` to ``v`` through the operator recurrence.

    Products are 2/3-dealiased unless ``dealiased`` is False.
    """
    directions = list(directions)
    for u in directions:
        if u.n_modes != v.n_modes:
            raise ConfigurationError("all inputs must share one grid")
    if not directions:
        return P.apply(v)
    *rest, last = directions

    def mul(a, b):
        return product(a, b, dealiased)

    out = (mul(last, derivative(apply_P_n(P, rest, v, dealiased)))
           - apply_P_n(P, rest, mul(last, derivative(v)), dealiased))
    for i, u_i in enumerate(rest):
        replaced = rest[:i] + [mul(derivative(u_i), last)] + rest[i + 1:]
        out = out - apply_P_n(P, replaced, v, dealiased)
    return out

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mclm import spectral as sp
from mclm.errors import ConfigurationError, DomainError
from mclm.spectral import SpectralFunction
from mclm.symbols import (DERIVATIVE, HILBERT, LAMBDA, LAMBDA_NORM, NEG_D2,
                          MultilinearSymbol, apply_P_n, closed_form_integer,
                          closed_form_integer_array, lambda_integer_symbols,
                          nonzero_tuples, order_bound_ratio,
                          recurrence_integer_array, symbol_p_closed,
                          symbol_p_next)

PI = np.pi
Q = lambda_integer_symbols(4)
nonzero = st.integers(-8, 8).filter(lambda v: v != 0)


@pytest.mark.parametrize("sym,k,expected", [
    (DERIVATIVE, 3, 6j * PI),
    (HILBERT, -2, 1j),
    (HILBERT, 0, 0),
    (LAMBDA, -3, 6 * PI),
    (LAMBDA_NORM, -3, 3),
    (NEG_D2, 2, 16 * PI ** 2),
])
def test_multiplier_values(sym, k, expected):
    assert sym(k) == pytest.approx(expected)


def test_multiplier_properties():
    for sym in (DERIVATIVE, HILBERT, LAMBDA, NEG_D2):
        assert sym.is_hermitian(64)
        assert sym.order_holds(64)
    assert LAMBDA.is_real_even(64)
    assert not DERIVATIVE.is_real_even(64)


def test_multiplier_solve_inverts_apply(rng):
    from mclm.verify import random_band_limited
    u = random_band_limited(64, 10, rng, basepoint=True)
    assert (LAMBDA.solve(LAMBDA.apply(u)) - u).max_norm() < 1e-12


# Hand-expanded recurrence values (integer parts q_n = p_n / (2 pi i)^n).
#   q_1(m0, m1) = m0|m0| - m0|m0+m1|
#   q_2(1,1,1):   q_1(1,1) = 1 - 2 = -1, q_1(2,1) = 4 - 6 = -2, q_1(1,2) = 1 - 3 = -2
#                 q_2 = 2*(-1) - [1*q_1(2,1) + 1*q_1(1,2)] = -2 + 4 = 2
#   q_2(1,-1,1) = 0 * q_1(1,-1) - [q_1(2,-1) - q_1(1,0)] = -(2 - 0) = -2
@pytest.mark.parametrize("m,q", [
    ((1, 1), -1), ((2, -1), 2), ((3, -6), 0), ((-2, 5), 2),
    ((1, 1, 1), 2), ((1, -1, 1), -2),
])
def test_integer_symbol_hand_values(m, q):
    assert Q[len(m) - 1](m) == q
    assert closed_form_integer(len(m) - 1, m) == q


def test_physical_symbol_values():
    p1 = symbol_p_next(MultilinearSymbol.from_multiplier(LAMBDA_NORM))
    assert p1(1, 1) == pytest.approx(-2j * PI)
    assert p1(2, -1) == pytest.approx(4j * PI)
    assert symbol_p_next(p1)(1, 1, 1) == pytest.approx(-8 * PI ** 2)
    assert symbol_p_closed(1, (3, -6)) == 0
    assert symbol_p_closed(2, (1, 1, 1)) == pytest.approx(-8 * PI ** 2)


def test_zero_wavenumber_rejected():
    with pytest.raises(DomainError):
        Q[1](0, 2)
    with pytest.raises(DomainError):
        Q[1](1, 2, 3)
    with pytest.raises(ConfigurationError):
        symbol_p_closed(0, (1,))


@settings(max_examples=200, deadline=None)
@given(m=st.lists(nonzero, min_size=2, max_size=5))
def test_recurrence_equals_closed_form(m):
    n = len(m) - 1
    assert Q[n](tuple(m)) == closed_form_integer(n, m)


def test_vectorized_matches_scalar():
    m = nonzero_tuples(2, 3)
    assert m.shape == (6 ** 3, 3)
    rec = recurrence_integer_array(2, m)
    assert all(rec[i] == Q[2](tuple(int(v) for v in m[i])) for i in range(len(m)))
    assert np.array_equal(rec, closed_form_integer_array(2, m))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bound_with_n_factorial_is_sharp(n):
    ratio = order_bound_ratio(n, nonzero_tuples(n, 6))
    assert ratio.max() == pytest.approx(1.0, abs=0.0)


def test_bound_with_smaller_constant_fails():
    # q_2(1,1,1) = 2 exceeds (2-1)! * 1 * 1 * 1
    m = np.array([[1, 1, 1]])
    assert order_bound_ratio(2, m, constant=math.factorial(1))[0] == 2.0


def _mode(k, n=128):
    return SpectralFunction.exponential(k, n)


def test_apply_P0_is_multiplier():
    assert apply_P_n(LAMBDA, [], _mode(3)).coeff(3) == pytest.approx(6 * PI)


def test_apply_P1_on_exponentials():
    out = apply_P_n(LAMBDA, [_mode(1)], _mode(1))
    assert out.coeff(2) == pytest.approx(-4 * PI ** 2 * 1j, rel=1e-12)
    assert np.sum(np.abs(out.coeffs) > 1e-9) == 1


def test_apply_P2_on_exponentials():
    out = apply_P_n(LAMBDA, [_mode(1), _mode(1)], _mode(1))
    assert out.coeff(3) == pytest.approx(-16 * PI ** 3, rel=1e-12)


def test_P1_is_commutator_with_derivative(rng):
    # P_1(u) v = u (P v)_x - P(u v_x) for a multiplier P
    from mclm.verify import random_band_limited
    u = random_band_limited(128, 8, rng)
    v = random_band_limited(128, 8, rng)
    lhs = apply_P_n(LAMBDA, [u], v)
    rhs = (sp.product(u, sp.derivative(LAMBDA.apply(v)))
           - LAMBDA.apply(sp.product(u, sp.derivative(v))))
    assert (lhs - rhs).max_norm() < 1e-10 * rhs.max_norm()


def test_P_n_symmetric_in_directions(rng):
    from mclm.verify import random_band_limited
    u1, u2, v = (random_band_limited(128, 6, rng) for _ in range(3))
    a = apply_P_n(LAMBDA, [u1, u2], v)
    b = apply_P_n(LAMBDA, [u2, u1], v)
    assert (a - b).max_norm() < 1e-9 * a.max_norm()


def test_mismatched_grids_rejected():
    with pytest.raises(ConfigurationError):
        apply_P_n(LAMBDA, [_mode(1, 64)], _mode(1, 128))

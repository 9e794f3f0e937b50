"""Self-verification suites driven by the ``verify`` subcommand.

Each check returns a :class:`Check`; a suite is a list of them.  Random
inputs come from ``numpy.random.default_rng(seed)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import spectral as sp
from .diffeo import conjugate, conjugation_derivative, make_diffeo
from .flows import ModelParams, SolverConfig, cross_validate
from .spectral import SpectralFunction
from .symbols import (LAMBDA, closed_form_integer_array, nonzero_tuples,
                      order_bound_ratio, recurrence_integer_array)


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.name:<44} {self.value:12.4e}  (tol {self.tolerance:.1e}) {self.detail}"


def _bounded(name, value, tol, detail=""):
    return Check(name, float(value), tol, bool(value <= tol), detail)


def random_band_limited(n: int, k_max: int, rng, amplitude: float = 1.0,
                        decay: float = 1.0, mean_zero: bool = False,
                        basepoint: bool = False) -> SpectralFunction:
    """Random real trigonometric polynomial of degree ``k_max``."""
    coeffs = np.zeros(n, dtype=complex)
    for k in range(1, k_max + 1):
        z = (rng.normal() + 1j * rng.normal()) * amplitude / k ** decay
        coeffs[k], coeffs[-k] = z, np.conj(z)
    if not mean_zero:
        coeffs[0] = rng.normal() * amplitude
    u = SpectralFunction.from_coeffs(coeffs)
    if basepoint:
        u = u - u.samples[0]
    return u


# -- symbols ---------------------------------------------------------------------

def symbol_checks(m_max: int = 8, n_max: int = 4, bound_m_max: int = 16) -> list[Check]:
    checks = []
    for n in range(1, n_max + 1):
        m = nonzero_tuples(n, m_max)
        mismatches = int(np.count_nonzero(
            recurrence_integer_array(n, m) != closed_form_integer_array(n, m)))
        checks.append(Check(f"recurrence == closed form, n={n} ({len(m)} tuples)",
                            mismatches, 0, mismatches == 0))
    for n in range(1, n_max + 1):
        worst = 0.0
        for m0 in range(-bound_m_max, bound_m_max + 1):
            if m0 == 0:
                continue
            worst = max(worst, float(order_bound_ratio(n, nonzero_tuples(n, bound_m_max, m0)).max()))
        checks.append(_bounded(f"|q_n| / (n! |m_0| prod|m_j|), n={n}", worst, 1.0))
    return checks


# -- operators --------------------------------------------------------------------

def operator_checks(seed: int = 0, n: int = 128) -> list[Check]:
    rng = np.random.default_rng(seed)
    u = random_band_limited(n, 20, rng, mean_zero=True)
    checks = [_bounded("H(H u) = -u", (sp.hilbert(sp.hilbert(u)) + u).max_norm(), 1e-12)]

    u = random_band_limited(n, 20, rng, decay=2.0)
    comm = (sp.lambda_apply(sp.derivative(u)) - sp.derivative(sp.lambda_apply(u))).max_norm()
    h2 = math.sqrt(sp.sobolev_norm_sq(u, 2))
    checks.append(_bounded("[Lambda, D] u / |u|_H2", comm / h2, 1e-10))

    worst = 0.0
    for j in (1, 5, 37):
        for op in (sp.hilbert, sp.lambda_apply, sp.derivative):
            ref = op(u)
            worst = max(worst, (sp.shift(ref, j) - op(sp.shift(u, j))).max_norm()
                        / ref.max_norm())
    checks.append(_bounded("shift equivariance (relative)", worst, 1e-13))

    c = u - u.samples[0]
    checks.append(_bounded("Lambda^{-1} Lambda u = u on the chart",
                           (sp.lambda_invert(sp.lambda_apply(c)) - c).max_norm(), 1e-11))

    orders = []
    for _ in range(5):
        orders.append(gateaux_order(rng, n))
    checks.append(Check("Gateaux finite-difference order (min of 5)",
                        min(orders), 1.9, min(orders) >= 1.9))
    return checks


def gateaux_order(rng, n: int = 128, eps=(1e-3, 1e-4)) -> float:
    """Observed order of central differences of ``phi -> Lambda_phi(v)``."""
    f = random_band_limited(n, 6, rng, amplitude=0.004, decay=2.0,
                            mean_zero=True, basepoint=True)
    v = random_band_limited(n, 6, rng, decay=1.0)
    d = random_band_limited(n, 6, rng, amplitude=0.3, decay=2.0,
                            mean_zero=True, basepoint=True)
    phi = make_diffeo(f)
    exact = conjugation_derivative(LAMBDA, phi, v, d)
    errors = []
    for e in eps:
        fd = (conjugate(LAMBDA, make_diffeo(f + e * d), v)
              - conjugate(LAMBDA, make_diffeo(f - e * d), v)) / (2 * e)
        errors.append((fd - exact).max_norm() / exact.max_norm())
    return float(np.polyfit(np.log(eps), np.log(errors), 1)[0])


# -- geodesic ------------------------------------------------------------------------

def geodesic_checks(t_end: float = 0.5, n: int = 128, dt: float = 1e-3) -> list[Check]:
    x = sp.grid(n)
    cases = {
        "a=2, 0.05 sin": (2.0, 0.05 * np.sin(2 * np.pi * x)),
        "a=1, 0.05 sin + 0.02 sin 4 pi x": (
            1.0, 0.05 * np.sin(2 * np.pi * x) + 0.02 * np.sin(4 * np.pi * x)),
    }
    cfg = SolverConfig(n_modes=n, dt=dt, t_end=t_end, output_stride=50)
    checks = []
    for label, (a, samples) in cases.items():
        dev = cross_validate(sp.analyze(samples), ModelParams(a=a), cfg)
        checks.append(_bounded(f"Euler vs Lagrange, {label}", dev, 1e-6))
    return checks


SUITES = {
    "symbols": lambda seed: symbol_checks(),
    "operators": lambda seed: operator_checks(seed),
    "geodesic": lambda seed: geodesic_checks(),
}


def run_suite(name: str, seed: int = 0) -> list[Check]:
    names = list(SUITES) if name == "all" else [name]
    checks = []
    for suite in names:
        checks.extend(SUITES[suite](seed))
    return checks

"""Basepoint-fixing circle diffeomorphisms in the global chart ``phi = id + f``.

``f`` is periodic with ``f(0) = 0`` and ``1 + f' > 0``.  Composition with a
diffeomorphism sums the Fourier series of the composed function at the
displaced grid points, so it is exact for band-limited data.  Inversion
solves ``y + f(y) = x_j`` by safeguarded Newton iteration.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChartError, NumericalError, OrientationError
from .spectral import SpectralFunction, analyze, derivative, evaluate, grid
from .symbols import MultiplierSymbol

BASEPOINT_TOL = 1e-10
ORIENTATION_MARGIN = 1e-8
NEWTON_TOL = 1e-13
NEWTON_MAX_ITER = 50


@dataclass(frozen=True, eq=False)
class Diffeo:
    """``phi = id + f``; build through :func:`make_diffeo`."""

    f: SpectralFunction

    @property
    def n_modes(self) -> int:
        return self.f.n_modes

    @property
    def points(self) -> np.ndarray:
        """``phi(x_j)`` on the grid."""
        return grid(self.n_modes) + self.f.samples

    def jacobian(self) -> np.ndarray:
        """``phi_x = 1 + f'`` on the grid."""
        return 1.0 + derivative(self.f).samples

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x + evaluate(self.f, x)


def identity(n: int) -> Diffeo:
    return Diffeo(SpectralFunction.zeros(n))


def make_diffeo(f: SpectralFunction) -> Diffeo:
    """Validate ``f`` as a chart displacement and wrap it."""
    if not f.is_real:
        raise ChartError("displacement must be real")
    f0 = f.samples[0]
    if abs(f0) > BASEPOINT_TOL:
        raise ChartError(f"f(0) = {f0:.3e}; the map must fix the basepoint")
    if f0 != 0.0:
        f = f - f0
    jac_min = float(np.min(1.0 + derivative(f).samples))
    if jac_min <= ORIENTATION_MARGIN:
        raise OrientationError(
            f"min(1 + f') = {jac_min:.3e} is not above {ORIENTATION_MARGIN}")
    return Diffeo(f)


def tangent_vector(w: SpectralFunction) -> SpectralFunction:
    """Project ``w`` onto ``{w(0) = 0}``, rejecting values beyond tolerance."""
    w0 = w.samples[0]
    if abs(w0) > BASEPOINT_TOL:
        raise ChartError(f"tangent vector has w(0) = {w0:.3e}")
    return w - w0 if w0 != 0.0 else w


def compose(v: SpectralFunction, phi: Diffeo) -> SpectralFunction:
    """``v o phi`` sampled on the grid."""
    return analyze(evaluate(v, phi.points))


def compose_diffeo(phi: Diffeo, psi: Diffeo) -> Diffeo:
    """``phi o psi = id + g + f o psi`` for ``phi = id + f``, ``psi = id + g``."""
    return make_diffeo(psi.f + compose(phi.f, psi))


def invert(phi: Diffeo) -> Diffeo:
    """``phi^{-1}`` by Newton iteration on the monotone lift, bisection fallback."""
    n = phi.n_modes
    x = grid(n)
    f = phi.f
    if not np.any(f.samples):
        return phi
    bound = float(np.max(np.abs(f.samples))) * 1.5 + 1e-12
    lo, hi = x - bound, x + bound
    y = x - f.samples
    for _ in range(NEWTON_MAX_ITER):
        resid = y + evaluate(f, y) - x
        lo = np.where(resid < 0, np.maximum(lo, y), lo)
        hi = np.where(resid > 0, np.minimum(hi, y), hi)
        if np.max(np.abs(resid)) <= NEWTON_TOL:
            break
        step = resid / (1.0 + evaluate(f, y, order=1))
        y_new = y - step
        outside = (y_new <= lo) | (y_new >= hi) | ~np.isfinite(y_new)
        y = np.where(outside, 0.5 * (lo + hi), y_new)
    else:
        resid = y + evaluate(f, y) - x
        raise NumericalError(
            f"inversion did not converge: max residual {np.max(np.abs(resid)):.3e}, "
            f"worst node {int(np.argmax(np.abs(resid)))}")
    # one polishing step drives the residual to roundoff level
    y = y - resid / (1.0 + evaluate(f, y, order=1))
    g = analyze(y - x)
    # dropping the Nyquist mode of the (non-band-limited) inverse moves g(0)
    return make_diffeo(g - g.samples[0])


def conjugate(A: MultiplierSymbol, phi: Diffeo, v: SpectralFunction,
              inverse: Diffeo | None = None) -> SpectralFunction:
    """``A_phi(v) = (A (v o phi^{-1})) o phi``."""
    psi = invert(phi) if inverse is None else inverse
    return compose(A.apply(compose(v, psi)), phi)


def conjugation_derivative(A: MultiplierSymbol, phi: Diffeo, v: SpectralFunction,
                           dphi: SpectralFunction,
                           inverse: Diffeo | None = None) -> SpectralFunction:
    """Directional derivative of ``phi -> A_phi(v)`` along ``dphi``.

    Equals ``R_phi [u, A] D R_phi^{-1} v`` with ``u = dphi o phi^{-1}``.
    """
    dphi = tangent_vector(dphi)
    psi = invert(phi) if inverse is None else inverse
    w = compose(v, psi)
    u = compose(dphi, psi)
    bracket = u * derivative(A.apply(w)) - A.apply(u * derivative(w))
    return compose(bracket, phi)


def inner_product(phi: Diffeo, eta: SpectralFunction, xi: SpectralFunction,
                  A: MultiplierSymbol, inverse: Diffeo | None = None) -> float:
    """Right-invariant pairing ``int eta * A_phi(xi) * phi_x dx`` (trapezoid rule)."""
    a_xi = conjugate(A, phi, xi, inverse)
    integrand = eta.samples * a_xi.samples * phi.jacobian()
    return float(np.mean(integrand.real))

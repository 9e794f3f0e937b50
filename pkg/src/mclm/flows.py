"""Time integration of the modified CLM family.

Three interchangeable descriptions of one flow on the chart ``u(0) = 0``:

* velocity form      ``u_t = -A^{-1}[u (Au)_x + a (Au) u_x]``
* momentum form      ``w_t + u w_x + a u_x w = 0`` with ``w = A u``
* Lagrangian system  ``phi_t = v``, ``v_t = S_phi(v)`` with
  ``S(u) = A^{-1}{[A, u] u_x - a (A u) u_x}`` conjugated by ``phi``.

``A`` is either ``Lambda = H D`` ("hd") or ``-D^2`` ("d2").  The family
``w_t + alpha u w_x = H w * w``, ``u_x = H w`` is available separately; for
``alpha != 0`` it is the momentum form with ``a = -1/alpha`` after the time
rescaling ``t -> alpha t`` (and ``w -> -w``).

All steps are classical fixed-step RK4.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import spectral as sp
from .diffeo import (Diffeo, compose, identity, inner_product, invert,
                     make_diffeo, tangent_vector)
from .errors import (ConfigurationError, DomainError, IntegrityError,
                     MCLMError, StepRejected)
from .spectral import SpectralFunction
from .symbols import INERTIA, LAMBDA_NORM, MultiplierSymbol

log = logging.getLogger(__name__)

FORMULATIONS = ("eulerian-u", "eulerian-omega", "lagrangian", "gclm")
BRACKET_MEAN_TOL = 1e-6
DRIFT_TOL = 1e-6


@dataclass(frozen=True)
class ModelParams:
    """Model parameter ``a`` (or ``alpha`` with ``a = -1/alpha``) and inertia."""

    a: float | None = None
    inertia: str = "hd"
    alpha: float | None = None

    def __post_init__(self):
        if self.inertia not in INERTIA:
            raise ConfigurationError(
                f"inertia must be one of {sorted(INERTIA)}, got {self.inertia!r}")
        if self.alpha is not None:
            if not math.isfinite(self.alpha):
                raise ConfigurationError("alpha must be finite")
            implied = None if self.alpha == 0 else -1.0 / self.alpha
            if self.a is not None and self.a != implied:
                raise ConfigurationError(
                    f"a = {self.a} is inconsistent with alpha = {self.alpha}")
            object.__setattr__(self, "a", implied)
        elif self.a is None or not math.isfinite(self.a):
            raise ConfigurationError("give a finite a or an alpha")

    @classmethod
    def from_alpha(cls, alpha: float, inertia: str = "hd") -> "ModelParams":
        return cls(alpha=alpha, inertia=inertia)

    @property
    def operator(self) -> MultiplierSymbol:
        return INERTIA[self.inertia]


@dataclass(frozen=True)
class SolverConfig:
    n_modes: int = 128
    dt: float = 1e-3
    t_end: float = 1.0
    dealias: bool = True
    blowup_sup_ux: float = 50.0
    blowup_tail: float = 1e-3
    output_stride: int = 1
    formulation: str = "eulerian-u"
    #: cap on ||u0||_{H^2}; None disables the check (blow-up studies)
    amplitude_cap: float | None = 0.5

    def __post_init__(self):
        n = self.n_modes
        if int(n) != n or n < 32 or n & (n - 1):
            raise ConfigurationError(f"n_modes must be a power of two >= 32, got {n}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if not (self.t_end >= 0 and math.isfinite(self.t_end)):
            raise ConfigurationError(f"t_end must be non-negative, got {self.t_end}")
        if int(self.output_stride) != self.output_stride or self.output_stride < 1:
            raise ConfigurationError("output_stride must be a positive integer")
        if self.formulation not in FORMULATIONS:
            raise ConfigurationError(
                f"formulation must be one of {FORMULATIONS}, got {self.formulation!r}")


@dataclass(frozen=True)
class EulerianState:
    """Velocity ``u`` (chart-normalized) and momentum ``omega = A u``."""

    t: float
    u: SpectralFunction
    omega: SpectralFunction

    @classmethod
    def from_u(cls, u: SpectralFunction, params: ModelParams, t: float = 0.0):
        u = tangent_vector(u)
        return cls(t, u, params.operator.apply(u))

    @classmethod
    def from_omega(cls, omega: SpectralFunction, params: ModelParams, t: float = 0.0):
        return cls(t, params.operator.solve(omega), omega)


@dataclass(frozen=True)
class LagrangianState:
    t: float
    phi: Diffeo
    v: SpectralFunction

    @classmethod
    def start(cls, u0: SpectralFunction, t: float = 0.0):
        return cls(t, identity(u0.n_modes), tangent_vector(u0))

    def velocity(self, inverse: Diffeo | None = None) -> SpectralFunction:
        """Eulerian velocity ``v o phi^{-1}``."""
        return compose(self.v, invert(self.phi) if inverse is None else inverse)


# -- right-hand sides ---------------------------------------------------------

def _mul(dealiased):
    return lambda a, b: sp.product(a, b, dealiased)


def _remove_mean(w: SpectralFunction, what: str) -> SpectralFunction:
    mean = w.coeffs[0]
    scale = max(1.0, w.max_norm())
    if abs(mean) > BRACKET_MEAN_TOL * scale:
        raise IntegrityError(
            f"{what} has mean {abs(mean):.3e}; expected zero (aliasing corruption?)")
    coeffs = w.coeffs.copy()
    coeffs[0] = 0.0
    return w.with_coeffs(coeffs)


def eulerian_rhs(u: SpectralFunction, params: ModelParams,
                 dealiased: bool = True) -> SpectralFunction:
    """``-A^{-1}[u (Au)_x + a (Au) u_x]`` normalized to vanish at ``x = 0``."""
    A, mul = params.operator, _mul(dealiased)
    m = A.apply(u)
    bracket = mul(u, sp.derivative(m)) + params.a * mul(m, sp.derivative(u))
    return -A.solve(_remove_mean(bracket, "velocity bracket"))


def omega_rhs(omega: SpectralFunction, params: ModelParams,
              dealiased: bool = True) -> SpectralFunction:
    """``-(u w_x + a u_x w)`` with ``u = A^{-1} w``, ``u(0) = 0``."""
    if abs(omega.coeffs[0]) > sp.MEAN_ZERO_TOL:
        raise DomainError(f"momentum must have mean zero, got {omega.coeffs[0]:.3e}")
    A, mul = params.operator, _mul(dealiased)
    u = A.solve(omega)
    rhs = -(mul(u, sp.derivative(omega)) + params.a * mul(sp.derivative(u), omega))
    return _remove_mean(rhs, "momentum right-hand side")


def gclm_rhs(omega: SpectralFunction, alpha: float,
             dealiased: bool = True) -> SpectralFunction:
    """``-alpha u w_x + H w * w`` with ``u_x = H w``, ``u(0) = 0``."""
    if abs(omega.coeffs[0]) > sp.MEAN_ZERO_TOL:
        raise DomainError(f"vorticity must have mean zero, got {omega.coeffs[0]:.3e}")
    mul = _mul(dealiased)
    h = sp.hilbert(omega)
    rhs = mul(h, omega)
    if alpha != 0:
        u = sp.antiderivative(h)
        rhs = rhs - alpha * mul(u, sp.derivative(omega))
    return _remove_mean(rhs, "vorticity right-hand side")


def spray_eulerian(u: SpectralFunction, params: ModelParams,
                   dealiased: bool = True) -> SpectralFunction:
    """``S(u) = A^{-1}{A(u u_x) - u A(u_x) - a (A u) u_x}``."""
    A, mul = params.operator, _mul(dealiased)
    ux = sp.derivative(u)
    bracket = (A.apply(mul(u, ux)) - mul(u, A.apply(ux))
               - params.a * mul(A.apply(u), ux))
    return A.solve(_remove_mean(bracket, "spray bracket"))


def spray(phi: Diffeo, v: SpectralFunction, params: ModelParams,
          dealiased: bool = True, inverse: Diffeo | None = None) -> SpectralFunction:
    """``S_phi(v) = S(v o phi^{-1}) o phi``."""
    psi = invert(phi) if inverse is None else inverse
    s = spray_eulerian(compose(v, psi), params, dealiased)
    return tangent_vector(compose(s, phi))


# -- stepping -----------------------------------------------------------------

def _rk4(y, rhs, dt):
    def axpy(h, k):
        return tuple(a + h * b for a, b in zip(y, k))

    k1 = rhs(y)
    k2 = rhs(axpy(dt / 2, k1))
    k3 = rhs(axpy(dt / 2, k2))
    k4 = rhs(axpy(dt, k3))
    return tuple(a + (dt / 6) * (b1 + 2 * b2 + 2 * b3 + b4)
                 for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4))


def _check_finite(*fields):
    for f in fields:
        if not np.all(np.isfinite(f.samples)):
            raise StepRejected("non-finite values after step")


def _pin_basepoint(w: SpectralFunction, what: str) -> SpectralFunction:
    w0 = w.samples[0]
    if abs(w0) > DRIFT_TOL:
        raise StepRejected(f"{what}(0) drifted to {w0:.3e}")
    return w - w0 if w0 != 0.0 else w


def _pin_mean(w: SpectralFunction, what: str) -> SpectralFunction:
    mean = w.coeffs[0]
    if abs(mean) > DRIFT_TOL:
        raise StepRejected(f"mean of {what} drifted to {abs(mean):.3e}")
    coeffs = w.coeffs.copy()
    coeffs[0] = 0.0
    return w.with_coeffs(coeffs)


def step(state, params: ModelParams, cfg: SolverConfig, dt: float | None = None):
    """Advance one RK4 step in the formulation named by ``cfg.formulation``."""
    dt = cfg.dt if dt is None else dt
    t_new = state.t + dt
    form = cfg.formulation
    if params.a is None and form != "gclm":
        raise ConfigurationError("alpha = 0 is only available in the alpha formulation")
    try:
        if isinstance(state, LagrangianState):
            def rhs(y):
                phi = make_diffeo(y[0])
                return (tangent_vector(y[1]), spray(phi, y[1], params, cfg.dealias))

            f, v = _rk4((state.phi.f, state.v), rhs, dt)
            _check_finite(f, v)
            f = _pin_basepoint(f, "phi - id")
            v = _pin_basepoint(v, "v")
            return LagrangianState(t_new, make_diffeo(f), v)
        if form == "eulerian-u":
            (u,) = _rk4((state.u,), lambda y: (eulerian_rhs(y[0], params, cfg.dealias),), dt)
            _check_finite(u)
            return EulerianState.from_u(_pin_basepoint(u, "u"), params, t_new)
        if form == "eulerian-omega":
            (w,) = _rk4((state.omega,), lambda y: (omega_rhs(y[0], params, cfg.dealias),), dt)
            _check_finite(w)
            state = EulerianState.from_omega(_pin_mean(w, "omega"), params, t_new)
            return state
        if form == "gclm":
            if params.inertia != "hd":
                raise ConfigurationError("the alpha family is defined for inertia 'hd'")
            alpha = params.alpha
            if alpha is None:
                if params.a == 0:
                    raise ConfigurationError("a = 0 has no alpha counterpart")
                alpha = -1.0 / params.a
            (w,) = _rk4((-state.omega,), lambda y: (gclm_rhs(y[0], alpha, cfg.dealias),), dt)
            _check_finite(w)
            return EulerianState.from_omega(-_pin_mean(w, "omega"), params, t_new)
        raise ConfigurationError(f"unknown formulation {form!r}")
    except StepRejected:
        raise
    except (DomainError, IntegrityError) as exc:
        raise StepRejected(str(exc)) from exc


# -- diagnostics and integration ----------------------------------------------

SERIES_COLUMNS = ("t", "h_half_sq", "h1_sq", "h2_sq", "sup_ux", "omega_mean",
                  "linf_omega", "energy_lagrangian")


def tail_ratio(w: SpectralFunction, dealiased: bool) -> float:
    """Energy in the top eighth of the resolved band over the total."""
    band = sp.dealias_cutoff(w.n_modes) if dealiased else w.n_modes // 2 - 1
    power = np.abs(w.coeffs) ** 2
    total = float(power.sum())
    if total == 0.0:
        return 0.0
    tail = np.abs(w.k) > band - band // 8
    return float(power[tail].sum()) / total


def diagnostics(state, params: ModelParams, with_omega: bool = False):
    """One series row; the Lagrangian energy is None for Eulerian states.

    With ``with_omega`` the momentum is returned alongside the row.
    """
    energy = None
    if isinstance(state, LagrangianState):
        psi = invert(state.phi)
        u = state.velocity(psi)
        omega = params.operator.apply(u)
        energy = inner_product(state.phi, state.v, state.v, LAMBDA_NORM, psi)
    else:
        u, omega = state.u, state.omega
    row = {
        "t": float(state.t),
        "h_half_sq": sp.h_half_norm_sq(u),
        "h1_sq": sp.sobolev_norm_sq(u, 1),
        "h2_sq": sp.sobolev_norm_sq(u, 2),
        "sup_ux": float(np.max(np.abs(sp.derivative(u).samples))),
        "omega_mean": float(omega.coeffs[0].real),
        "linf_omega": omega.max_norm(),
        "energy_lagrangian": energy,
    }
    return (row, omega) if with_omega else row


@dataclass
class Trajectory:
    """Diagnostic rows sampled along one run, plus how it ended."""

    rows: list = field(default_factory=list)
    cause: str = "t_end"
    message: str = ""
    final_state: object = None
    states: list = field(default_factory=list)
    blowup_time: float | None = None

    def column(self, name: str) -> np.ndarray:
        return np.array([np.nan if r[name] is None else r[name] for r in self.rows])


def initial_state(u0: SpectralFunction, params: ModelParams, cfg: SolverConfig):
    if cfg.formulation == "lagrangian":
        return LagrangianState.start(u0)
    return EulerianState.from_u(u0, params)


def _velocity(state):
    return state.velocity() if isinstance(state, LagrangianState) else state.u


def integrate(state0, params: ModelParams, cfg: SolverConfig,
              keep_states: bool = False) -> Trajectory:
    """Fixed-step RK4 from ``state0`` until ``t_end`` or a blow-up trigger.

    Blow-up is flagged when ``sup |u_x|`` exceeds ``cfg.blowup_sup_ux`` or the
    momentum spectrum's tail ratio exceeds ``cfg.blowup_tail``.
    """
    u0 = _velocity(state0)
    if cfg.amplitude_cap is not None:
        norm = math.sqrt(sp.sobolev_norm_sq(u0, 2))
        if norm > cfg.amplitude_cap:
            raise ConfigurationError(
                f"||u0||_H2 = {norm:.3g} exceeds amplitude_cap = {cfg.amplitude_cap}")
    cfl = cfg.dt * u0.max_norm() * cfg.n_modes
    if cfl > 0.5:
        log.warning("advective CFL number %.3g exceeds 0.5", cfl)

    traj = Trajectory()
    n_steps = max(0, math.ceil(cfg.t_end / cfg.dt - 1e-9))
    t0 = state0.t
    state = state0

    def record(s):
        traj.rows.append(diagnostics(s, params))
        if keep_states:
            traj.states.append(s)

    record(state)
    for i in range(1, n_steps + 1):
        t_target = t0 + min(i * cfg.dt, cfg.t_end)
        try:
            state = step(state, params, cfg, dt=t_target - state.t)
        except (StepRejected, MCLMError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            traj.cause, traj.message = "step_rejected", str(exc)
            break
        state = replace(state, t=t_target)
        row, omega = diagnostics(state, params, with_omega=True)
        blown = (row["sup_ux"] > cfg.blowup_sup_ux
                 or tail_ratio(omega, cfg.dealias) > cfg.blowup_tail)
        if blown or i % cfg.output_stride == 0 or i == n_steps:
            traj.rows.append(row)
            if keep_states:
                traj.states.append(state)
        if blown:
            traj.cause = "blowup"
            traj.blowup_time = state.t
            traj.message = (f"blow-up trigger at t = {state.t:.6g}: "
                            f"sup|u_x| = {row['sup_ux']:.4g}")
            break
    traj.final_state = state
    return traj


def cross_validate(u0: SpectralFunction, params: ModelParams, cfg: SolverConfig) -> float:
    """Max over output times of ``|u_E - v o phi^{-1}|_inf`` between the
    velocity-form run and the Lagrangian run started at ``(id, u0)``."""
    euler = integrate(EulerianState.from_u(u0, params),
                      params, replace(cfg, formulation="eulerian-u"), keep_states=True)
    lagr = integrate(LagrangianState.start(u0),
                     params, replace(cfg, formulation="lagrangian"), keep_states=True)
    if euler.cause != "t_end" or lagr.cause != "t_end":
        raise MCLMError(
            f"cross validation needs complete runs (causes: {euler.cause}, {lagr.cause})")
    deviation = 0.0
    for se, sl in zip(euler.states, lagr.states):
        if abs(se.t - sl.t) > 1e-12:
            raise IntegrityError("output times of the two runs differ")
        deviation = max(deviation, (se.u - sl.velocity()).max_norm())
    return deviation

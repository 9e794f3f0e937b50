"""Run configuration: a flat JSON object with a fixed set of keys.

Example::

    {
      "formulation": "eulerian-u",
      "a": 2.0,
      "inertia": "hd",
      "n_modes": 128,
      "dt": 0.001,
      "t_end": 1.0,
      "output_stride": 10,
      "initial_data": [[1, 0.05, 0.0]],
      "output_dir": "runs/metric"
    }

Each ``initial_data`` entry ``[k, amplitude, phase]`` contributes
``amplitude * (sin(2 pi k x + phase) - sin(phase))``, so the velocity
vanishes at the basepoint.  Unknown keys are errors.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .flows import ModelParams, SolverConfig
from .spectral import SpectralFunction, grid

FORMULATIONS = ("eulerian-u", "eulerian-omega", "lagrangian", "clm-alpha0", "gclm")


@dataclass(frozen=True)
class RunConfig:
    formulation: str = "eulerian-u"
    a: float | None = None
    alpha: float | None = None
    inertia: str = "hd"
    n_modes: int = 128
    dt: float = 1e-3
    t_end: float = 1.0
    output_stride: int = 1
    initial_data: tuple = ()
    dealias: bool = True
    blowup_sup_ux: float = 50.0
    blowup_tail: float = 1e-3
    amplitude_cap: float | None = 0.5
    seed: int = 0
    output_dir: str = "runs/default"

    def __post_init__(self):
        modes = []
        for entry in self.initial_data:
            if not isinstance(entry, (list, tuple)) or len(entry) != 3:
                raise ConfigurationError(
                    f"initial_data: entries are [k, amplitude, phase], got {entry!r}")
            k, amp, phase = entry
            if int(k) != k or k == 0:
                raise ConfigurationError(f"initial_data: mode k must be a nonzero integer, got {k!r}")
            if not (math.isfinite(amp) and math.isfinite(phase)):
                raise ConfigurationError("initial_data: amplitude and phase must be finite")
            modes.append((int(k), float(amp), float(phase)))
        object.__setattr__(self, "initial_data", tuple(modes))
        if self.formulation not in FORMULATIONS:
            raise ConfigurationError(
                f"formulation: expected one of {FORMULATIONS}, got {self.formulation!r}")
        if (self.a is None) == (self.alpha is None):
            raise ConfigurationError("a/alpha: give exactly one of the two")
        if self.formulation == "clm-alpha0" and self.alpha != 0:
            raise ConfigurationError("alpha: formulation clm-alpha0 requires alpha = 0")
        if self.formulation != "clm-alpha0" and self.alpha == 0:
            raise ConfigurationError(
                "alpha: alpha = 0 has no a-parameterization; use formulation clm-alpha0")
        if int(self.seed) != self.seed:
            raise ConfigurationError("seed: must be an integer")
        # surface parameter errors at load time
        self.params()
        self.solver()

    def params(self) -> ModelParams:
        try:
            return ModelParams(a=self.a, inertia=self.inertia, alpha=self.alpha)
        except ConfigurationError as exc:
            raise ConfigurationError(f"a/alpha/inertia: {exc}") from exc

    def solver(self, **overrides) -> SolverConfig:
        form = self.formulation
        if form == "clm-alpha0":
            form = "gclm"
        kwargs = dict(
            n_modes=self.n_modes, dt=self.dt, t_end=self.t_end, dealias=self.dealias,
            blowup_sup_ux=self.blowup_sup_ux, blowup_tail=self.blowup_tail,
            output_stride=self.output_stride, formulation=form,
            amplitude_cap=self.amplitude_cap)
        kwargs.update(overrides)
        return SolverConfig(**kwargs)

    def initial_velocity(self) -> SpectralFunction:
        x = grid(self.n_modes)
        u = np.zeros_like(x)
        for k, amp, phase in self.initial_data:
            if abs(k) >= self.n_modes // 2:
                raise ConfigurationError(f"initial_data: mode {k} not resolved on {self.n_modes} points")
            u += amp * (np.sin(2 * np.pi * k * x + phase) - np.sin(phase))
        return SpectralFunction.from_callable(lambda _: u, self.n_modes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["initial_data"] = [list(m) for m in self.initial_data]
        return d


_FIELDS = set(RunConfig.__dataclass_fields__)
_TYPES = {
    "formulation": str, "inertia": str, "output_dir": str,
    "n_modes": int, "output_stride": int, "seed": int,
    "a": float, "alpha": float, "dt": float, "t_end": float,
    "blowup_sup_ux": float, "blowup_tail": float, "amplitude_cap": float,
    "dealias": bool, "initial_data": list,
}


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a JSON object")
    for key, value in data.items():
        if key not in _FIELDS:
            raise ConfigurationError(f"{key}: unknown configuration key")
        expected = _TYPES[key]
        if value is None and key in ("a", "alpha", "amplitude_cap"):
            continue
        ok = isinstance(value, expected) and not (expected is not bool and isinstance(value, bool))
        if expected is float:
            ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        if not ok:
            raise ConfigurationError(f"{key}: expected {expected.__name__}, got {value!r}")
    data = {k: (float(v) if _TYPES[k] is float and v is not None else v)
            for k, v in data.items()}
    try:
        return RunConfig(**data)
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from exc


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigurationError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(data)

"""Experiment execution and persistent run artifacts.

A run writes two files into its output directory:

``series.csv``
    one row per output time with columns ``SERIES_COLUMNS``; floats use 17
    significant digits, a missing value is an empty field.
``manifest.json``
    config echo, code version, wall-clock times, termination cause and a
    summary recomputable from ``series.csv``.
"""
from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig
from .errors import ConfigurationError
from .flows import (SERIES_COLUMNS, EulerianState, LagrangianState, Trajectory,
                    cross_validate, initial_state, integrate)

OUTPUT_ROOT_ENV = "MCLM_OUTPUT_ROOT"
EXIT_OK, EXIT_ERROR, EXIT_BLOWUP = 0, 1, 2


def format_float(x) -> str:
    return "" if x is None else format(float(x), ".17g")


def series_text(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SERIES_COLUMNS)
    for row in rows:
        writer.writerow([format_float(row[c]) for c in SERIES_COLUMNS])
    return buf.getvalue()


def read_series(path) -> dict:
    """Columns of a series file as float arrays (NaN for empty fields)."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    return {c: np.array([float(r[c]) if r[c] else np.nan for r in rows])
            for c in SERIES_COLUMNS}


def summarize(columns: dict) -> dict:
    """Summary statistics; only depends on the (rounded-trip) series values."""
    t = columns["t"]
    e = columns["h_half_sq"]
    out = {
        "n_rows": int(t.size),
        "t_final": float(t[-1]),
        "h_half_sq_initial": float(e[0]),
        "h_half_sq_final": float(e[-1]),
        "h_half_sq_rel_range": float(np.ptp(e) / e[0]) if e[0] != 0 else 0.0,
        "sup_ux_max": float(np.max(columns["sup_ux"])),
        "linf_omega_max": float(np.max(columns["linf_omega"])),
        "omega_mean_absmax": float(np.max(np.abs(columns["omega_mean"]))),
    }
    el = columns["energy_lagrangian"]
    if np.all(np.isfinite(el)):
        out["energy_lagrangian_rel_range"] = float(np.ptp(el) / el[0]) if el[0] != 0 else 0.0
    return out


def output_directory(config: RunConfig, override=None) -> Path:
    root = Path(os.environ.get(OUTPUT_ROOT_ENV, "."))
    return root / (override if override is not None else config.output_dir)


@dataclass
class RunManifest:
    config: dict
    code_version: str
    start_time: str
    end_time: str
    termination_cause: str
    message: str
    summary: dict
    series_file: str = "series.csv"
    columns: list = field(default_factory=lambda: list(SERIES_COLUMNS))
    blowup_time: float | None = None

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2, sort_keys=True)

    @property
    def exit_code(self) -> int:
        return {"t_end": EXIT_OK, "blowup": EXIT_BLOWUP}.get(self.termination_cause, EXIT_ERROR)


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


def simulate(config: RunConfig) -> Trajectory:
    params = config.params()
    cfg = config.solver()
    return integrate(initial_state(config.initial_velocity(), params, cfg), params, cfg)


def run(config: RunConfig, output_dir=None) -> tuple[RunManifest, Path]:
    """Execute one run and write ``series.csv`` and ``manifest.json``."""
    start = _now()
    traj = simulate(config)
    end = _now()
    out = output_directory(config, output_dir)
    out.mkdir(parents=True, exist_ok=True)
    text = series_text(traj.rows)
    (out / "series.csv").write_text(text)
    columns = read_series(out / "series.csv")
    manifest = RunManifest(
        config=config.to_dict(), code_version=__version__, start_time=start,
        end_time=end, termination_cause=traj.cause, message=traj.message,
        summary=summarize(columns), blowup_time=traj.blowup_time)
    (out / "manifest.json").write_text(manifest.to_json() + "\n")
    return manifest, out


# -- convergence ----------------------------------------------------------------

@dataclass
class ConvergenceReport:
    dts: list
    errors: list
    reference_dt: float
    order: float | None
    status: str  # "ok", "exact" or "order not measurable"

    EXPECTED = (3.7, 4.3)

    @property
    def in_expected_range(self) -> bool:
        return self.order is not None and self.EXPECTED[0] <= self.order <= self.EXPECTED[1]

    def table(self) -> str:
        lines = [f"{'dt':>12} {'error':>14}"]
        for dt, err in zip(self.dts, self.errors):
            lines.append(f"{dt:12.4e} {'-' if err is None else format(err, '14.6e'):>14}")
        lines.append(f"reference dt = {self.reference_dt:.4e}")
        if self.status == "ok":
            lines.append(f"fitted order = {self.order:.4f} "
                         f"(expected {self.EXPECTED[0]}..{self.EXPECTED[1]})")
        else:
            lines.append(f"fitted order: {self.status}")
        return "\n".join(lines)


def _final_velocity(traj: Trajectory):
    s = traj.final_state
    return s.velocity() if isinstance(s, LagrangianState) else s.u


def convergence(config: RunConfig, dts) -> ConvergenceReport:
    """Errors at ``t_end`` against a run with ``min(dts) / 4`` and the fitted order."""
    dts = sorted((float(d) for d in dts), reverse=True)
    if len(dts) < 3:
        raise ConfigurationError("dts: need at least three step sizes")
    for big, small in zip(dts, dts[1:]):
        if not math.isclose(big / small, 2.0, rel_tol=1e-9):
            raise ConfigurationError("dts: consecutive step sizes must differ by a factor 2")
    ref_dt = dts[-1] / 4
    params = config.params()
    u0 = config.initial_velocity()

    def final(dt):
        cfg = config.solver(dt=dt, output_stride=10 ** 9)
        return integrate(initial_state(u0, params, cfg), params, cfg)

    ref = final(ref_dt)
    runs = [final(dt) for dt in dts]
    if ref.cause != "t_end" or any(r.cause != "t_end" for r in runs):
        return ConvergenceReport(dts, [None] * len(dts), ref_dt, None, "order not measurable")
    u_ref = _final_velocity(ref)
    errors = [(_final_velocity(r) - u_ref).max_norm() for r in runs]
    if max(errors) == 0.0:
        return ConvergenceReport(dts, errors, ref_dt, None, "exact")
    if min(errors) == 0.0:
        return ConvergenceReport(dts, errors, ref_dt, None, "order not measurable")
    order = float(np.polyfit(np.log(dts), np.log(errors), 1)[0])
    return ConvergenceReport(dts, errors, ref_dt, order, "ok")


def cross_validate_config(config: RunConfig) -> float:
    params = config.params()
    return cross_validate(config.initial_velocity(), params, config.solver())

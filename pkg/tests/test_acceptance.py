"""Acceptance criteria, one test each.

Every test emits a single ``PASS``/``FAIL`` line with the measured value,
its tolerance and the runtime, then asserts.  The lines are repeated in the
terminal summary of any pytest run that includes this module.
"""
import json
import math
import sys
import time

import numpy as np
import pytest

from mclm import harness
from mclm import spectral as sp
from mclm.config import parse_config
from mclm.flows import (EulerianState, LagrangianState, ModelParams,
                        SolverConfig, cross_validate, integrate)
from mclm.spectral import SpectralFunction
from mclm.symbols import (LAMBDA, apply_P_n, closed_form_integer_array,
                          nonzero_tuples, order_bound_ratio,
                          recurrence_integer_array)
from mclm.verify import gateaux_order, random_band_limited

PI = np.pi


#: lines collected for the terminal summary (see conftest.py)
RESULTS = []


def report(number, name, passed, detail, elapsed):
    line = f"{'PASS' if passed else 'FAIL'}  [{number:>2}] {name}: {detail} ({elapsed:.1f} s)"
    RESULTS.append((number, line))
    print(line)
    return passed


def sine_data(n, terms):
    x = sp.grid(n)
    return sp.analyze(sum(amp * np.sin(2 * PI * k * x) for k, amp in terms))


def test_01_symbol_equivalence():
    start = time.perf_counter()
    tuples = mismatches = 0
    for n in range(1, 5):
        m = nonzero_tuples(n, 8)
        tuples += len(m)
        mismatches += int(np.count_nonzero(
            recurrence_integer_array(n, m) != closed_form_integer_array(n, m)))
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 10
    assert report(1, "recurrence == closed form", ok,
                  f"{mismatches} mismatches over {tuples} tuples, limit 10 s", elapsed)


def test_02_exponential_eigenrelation():
    start = time.perf_counter()
    n_grid = 128
    modes = {k: SpectralFunction.exponential(k, n_grid) for k in range(-24, 25) if k}
    worst = 0.0
    count = 0
    for n in (1, 2):
        m = nonzero_tuples(n, 8)
        q = recurrence_integer_array(n, m)
        for row, qn in zip(m, q):
            expected = 2 * PI * (2j * PI) ** n * int(qn)
            out = apply_P_n(LAMBDA, [modes[int(k)] for k in row[1:]], modes[int(row[0])])
            target = np.zeros(n_grid, dtype=complex)
            target[int(row.sum()) % n_grid] = expected
            err = np.max(np.abs(out.coeffs - target)) / max(abs(expected), 1.0)
            worst = max(worst, err)
            count += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 30
    assert report(2, "P_n on exponentials == 2 pi p_n", ok,
                  f"max rel err {worst:.2e} over {count} tuples, tol 1e-9, limit 30 s",
                  elapsed)


def test_03_gateaux_order():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    orders = [gateaux_order(rng) for _ in range(20)]
    elapsed = time.perf_counter() - start
    ok = min(orders) >= 1.9 and elapsed < 60
    assert report(3, "Gateaux finite-difference order", ok,
                  f"min order {min(orders):.3f} over 20 instances, need >= 1.9, limit 60 s",
                  elapsed)


def test_04_euler_lagrange_equivalence():
    start = time.perf_counter()
    cfg = SolverConfig(n_modes=128, dt=1e-3, t_end=0.5, output_stride=50)
    worst = 0.0
    for a in (1.0, 2.0):
        for terms in ([(1, 0.05)], [(1, 0.05), (2, 0.02)]):
            worst = max(worst, cross_validate(sine_data(128, terms), ModelParams(a=a), cfg))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 120
    assert report(4, "Eulerian vs Lagrangian", ok,
                  f"max deviation {worst:.2e}, tol 1e-6, limit 120 s", elapsed)


def test_05_energy_conservation():
    start = time.perf_counter()
    params = ModelParams(a=2.0)
    u0 = sine_data(128, [(1, 0.05), (2, 0.02)])
    cfg = SolverConfig(n_modes=128, dt=1e-3, t_end=1.0, output_stride=10)
    euler = integrate(EulerianState.from_u(u0, params), params, cfg)
    lagr = integrate(LagrangianState.start(u0), params,
                     SolverConfig(n_modes=128, dt=1e-3, t_end=1.0, output_stride=10,
                                  formulation="lagrangian"))
    e = euler.column("h_half_sq")
    el = lagr.column("energy_lagrangian")
    drift_e = float(np.max(np.abs(e - e[0])) / e[0])
    drift_l = float(np.max(np.abs(el - el[0])) / el[0])
    elapsed = time.perf_counter() - start
    ok = (euler.cause == lagr.cause == "t_end" and max(drift_e, drift_l) <= 1e-6
          and elapsed < 60)
    assert report(5, "metric-case energy drift", ok,
                  f"Eulerian {drift_e:.2e}, Lagrangian {drift_l:.2e}, tol 1e-6, limit 60 s",
                  elapsed)


def test_06_operator_identities():
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    u = random_band_limited(128, 40, rng, mean_zero=True)
    h2 = (sp.hilbert(sp.hilbert(u)) + u).max_norm()
    v = random_band_limited(128, 40, rng, decay=2.0)
    comm = (sp.lambda_apply(sp.derivative(v)) - sp.derivative(sp.lambda_apply(v))).max_norm()
    comm /= math.sqrt(sp.sobolev_norm_sq(v, 2))
    shift = 0.0
    for j in range(128):
        for op in (sp.hilbert, sp.lambda_apply, sp.derivative):
            ref = op(v)
            shift = max(shift, (sp.shift(ref, j) - op(sp.shift(v, j))).max_norm()
                        / ref.max_norm())
    c = v - v.samples[0]
    inv = (sp.lambda_invert(sp.lambda_apply(c)) - c).max_norm()
    elapsed = time.perf_counter() - start
    ok = h2 <= 1e-12 and comm <= 1e-10 and shift <= 1e-13 and inv <= 1e-11
    assert report(6, "operator identities", ok,
                  f"H^2+I {h2:.1e} (1e-12), [Lambda,D] {comm:.1e} (1e-10), "
                  f"shift {shift:.1e} (1e-13 rel), Lambda^-1 Lambda {inv:.1e} (1e-11)",
                  elapsed)


def test_07_symbol_bound():
    start = time.perf_counter()
    worst = {}
    for n in range(1, 5):
        worst[n] = 0.0
        for m0 in range(-16, 17):
            if m0:
                worst[n] = max(worst[n], float(order_bound_ratio(
                    n, nonzero_tuples(n, 16, m0)).max()))
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) <= 1.0
    detail = ", ".join(f"n={n}: {r:.3f}" for n, r in worst.items())
    assert report(7, "|p_n| <= (2 pi)^n n! |m_0| prod |m_j|", ok,
                  f"max ratio {detail}", elapsed)


CONVERGENCE_CONFIG = {
    "a": 2.0,
    "n_modes": 128,
    "t_end": 0.5,
    "initial_data": [[1, 0.1, 0.0], [2, 0.05, 0.0], [1, 0.1 / 3, PI / 2]],
    "amplitude_cap": None,
}


def test_08_integrator_order():
    start = time.perf_counter()
    report_ = harness.convergence(parse_config(CONVERGENCE_CONFIG), [4e-3, 2e-3, 1e-3])
    elapsed = time.perf_counter() - start
    ok = report_.status == "ok" and report_.in_expected_range
    order = "n/a" if report_.order is None else f"{report_.order:.3f}"
    assert report(8, "RK4 global order", ok,
                  f"fitted order {order} ({report_.status}), need 3.7..4.3", elapsed)


def test_09_blowup_monitor():
    start = time.perf_counter()
    times = {}
    causes = {}
    for n in (128, 256):
        cfg = parse_config({"a": 2.0, "n_modes": n, "dt": 5e-4, "t_end": 1.0,
                            "output_stride": 100, "initial_data": [[1, 2.0, 0.0]],
                            "amplitude_cap": None})
        traj = harness.simulate(cfg)
        causes[n], times[n] = traj.cause, traj.blowup_time
    elapsed = time.perf_counter() - start
    both = all(c == "blowup" for c in causes.values())
    change = abs(times[256] - times[128]) / times[128] if both else float("inf")
    ok = both and change < 0.1
    assert report(9, "blow-up detection", ok,
                  f"causes {causes[128]}/{causes[256]}, trigger t = {times[128]} / "
                  f"{times[256]}, change {change:.1%} (< 10%)", elapsed)


def test_10_determinism(tmp_path, monkeypatch):
    start = time.perf_counter()
    monkeypatch.setenv(harness.OUTPUT_ROOT_ENV, str(tmp_path))
    cfg = parse_config({"a": 1.5, "n_modes": 128, "dt": 1e-3, "t_end": 0.2,
                        "output_stride": 5, "initial_data": [[1, 0.05, 0.3], [3, 0.01, 0.0]]})
    harness.run(cfg, "first")
    harness.run(cfg, "second")
    same = ((tmp_path / "first" / "series.csv").read_bytes()
            == (tmp_path / "second" / "series.csv").read_bytes())
    manifest = json.loads((tmp_path / "first" / "manifest.json").read_text())
    elapsed = time.perf_counter() - start
    assert report(10, "byte-identical series", same and manifest["termination_cause"] == "t_end",
                  "series.csv identical" if same else "series.csv differs", elapsed)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))

"""Acceptance criteria 1-11, each run at its stated tolerance.

Every test records one line in ``RESULTS``; ``conftest.py`` prints them in
the terminal summary, and each test also prints its own line (visible with
``-s``).
"""

import numpy as np
import pytest

from filamentlab.cli import bundled_configs
from filamentlab.config import load_config
from filamentlab.energetics import split_penalty
from filamentlab.experiments import run_experiment

RESULTS: dict[int, str] = {}


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail})"
    RESULTS[number] = line
    print(line)


def run(name, tmp_path):
    result = run_experiment(load_config(bundled_configs()[name]), tmp_path / name)
    assert result.error is None, result.error
    return result, {c.name: c for c in result.checks}


def describe(checks, names):
    return ", ".join(f"{n}={checks[n].value:.4g} (tol {checks[n].tol:g})" for n in names)


def finish(number, title, checks, names, extra=""):
    ok = all(checks[n].passed for n in names)
    detail = describe(checks, names) + (f"; {extra}" if extra else "")
    record(number, title, ok, detail)
    failed = [n for n in names if not checks[n].passed]
    assert not failed, f"criterion {number} failed: {failed}"


def test_criterion_01_helix_rotation(tmp_path):
    result, checks = run("helix-rotation", tmp_path)
    assert checks["max_deviation"].tol == 1e-4 and checks["angular_rate"].tol == 1e-4
    assert checks["runtime"].tol == 10.0
    finish(1, "helix returns after one period, omega = nu tau^2", checks, ["max_deviation", "angular_rate", "runtime"])


def test_criterion_02_soliton_transport(tmp_path):
    _, lia = run("soliton-lia", tmp_path)
    _, nls = run("soliton-nls", tmp_path)
    assert lia["speed"].tol == 1e-2 and nls["speed"].tol == 1e-3
    merged = {"lia_speed": lia["speed"], "nls_speed": nls["speed"]}
    finish(2, "soliton peak moves at 2 nu tau under LIA and NLS", merged, ["lia_speed", "nls_speed"])


def test_criterion_03_redundant_segment(tmp_path):
    result, checks = run("redundant-segment", tmp_path)
    assert checks["redundant_length"].tol == 1e-4
    assert result.report["n_pairs"] == 25
    finish(3, "redundant length 2a on a 5x5 (kappa_hat, tau) grid", checks, ["redundant_length"], "25 pairs")


def test_criterion_04_conservation(tmp_path):
    _, checks = run("nls-conservation", tmp_path)
    expected = {"mass": 1e-10, "momentum": 1e-6, "energy": 1e-5, "modified_energy": 1e-5}
    assert {k: checks[k].tol for k in expected} == expected
    finish(4, "mass, momentum and energy drift over t = 10, energy with a well", checks, list(expected))


def test_criterion_05_self_energy(tmp_path):
    _, checks = run("self-energy", tmp_path)
    assert checks["field_self_energy"].tol == 1e-6
    finish(5, "self-energy quadrature equals 4 zeta nu^2 kappa_hat", checks, ["field_self_energy"])


def test_criterion_06_loop_minimum(tmp_path):
    _, checks = run("energy-scan", tmp_path)
    assert checks["argmin"].tol == 1e-8 and checks["argmin_draws"].tol == 1e-8
    # equality only at one half: strictly above 4 on a fine grid excluding 0.5
    alpha = np.linspace(1e-3, 1 - 1e-3, 9999)
    alpha = alpha[alpha != 0.5]
    above = bool(np.all([split_penalty(a) > 4.0 for a in alpha]))
    ok = above and split_penalty(0.5) == 4.0
    names = ["argmin", "argmin_draws", "split_minimum"]
    good = all(checks[n].passed for n in names) and ok
    record(6, "loop argmin 2 nu sqrt(zeta/xi); split penalty >= 4", good,
           describe(checks, names) + f"; penalty > 4 away from 1/2: {above}")
    assert good


def test_criterion_07_wave_packet(tmp_path):
    _, checks = run("packet-demo", tmp_path)
    assert checks["velocity"].tol == 1e-3 and checks["quadrature_match"].tol == 1e-8
    finish(7, "packet group velocity 2 nu tau0; closed form equals superposition", checks, ["velocity", "quadrature_match"])


def test_criterion_08_linearization_gap(tmp_path):
    result, checks = run("linearization-gap", tmp_path)
    assert checks["helix_gap"].tol == 1e-4
    assert result.report["loop_tau_over_kappa"] == pytest.approx(0.23)
    finish(8, "small helix follows the linear equation, loop does not", checks, ["helix_gap"],
           f"loop gap {result.report['loop_gap']:.3g} (reported)")


def test_criterion_09_ensemble_reduction(tmp_path):
    _, checks = run("ensemble-dispersion", tmp_path)
    names = ["dispersion_m1", "dispersion_m4", "dispersion_m10"]
    assert all(checks[n].tol == 1e-3 for n in names) and checks["aggregate_phase"].tol == 1e-12
    finish(9, "dispersion coefficient nu/m for m in 1, 4, 10; aggregate phase", checks, names + ["aggregate_phase"])


def test_criterion_10_hartree(tmp_path):
    result, checks = run("hartree-check", tmp_path)
    assert checks["normalization"].tol == 1e-10
    limits = result.report["parent_limit"]
    assert set(limits) == {"3", "10", "100"}
    for m, value in limits.items():
        assert value == pytest.approx(4.0 * (int(m) - 1) / int(m), abs=1e-10)
    shown = ", ".join(f"m={m}: {v:.6g}" for m, v in limits.items())
    finish(10, "Hartree normalizations and parent limit", checks, ["normalization"], shown)


def test_criterion_11_convergence_orders(tmp_path):
    _, checks = run("convergence", tmp_path)
    assert (checks["rk4_ratio"].tol, checks["split_step_ratio"].tol, checks["frenet_ratio"].tol) == (3, 0.5, 0.5)
    finish(11, "observed orders RK4 16, split step 4, Frenet 4", checks, ["rk4_ratio", "split_step_ratio", "frenet_ratio"])

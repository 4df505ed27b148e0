"""Acceptance checks: one test per shipping criterion, each printing a
single PASS/FAIL line with its measured numbers and runtime."""

import time

import numpy as np
import pytest

from ilw_lab import (
    SobolevIndex,
    SpectralGrid,
    evolve,
    forward_transform,
    form_flow_derivative,
    make_bo,
    make_ilw,
    modes_to_xi_max,
    build_lax,
    build_weighted_rule,
    random_field,
    relative_drift,
    resolvent_form,
    resolvent_form_gradient,
    sobolev_norm,
    weighted_resolvent_form,
)
from ilw_lab.experiments import load_config, run
from ilw_lab.lax import LaxSpectrum
from ilw_lab.symbols import smoothing_operator_scan
from ilw_lab.waves import (
    periodic_profile,
    periodic_speed,
    periodic_wave_constants,
    traveling_residual,
)

TWO_PI = 2.0 * np.pi


def _verdict(number, ok, detail, started):
    line = "criterion %d: %s  %s  (%.1fs)" % (
        number, "PASS" if ok else "FAIL", detail, time.time() - started)
    print(line)
    return line


@pytest.mark.filterwarnings("ignore:advisory CFL")
def test_criterion_1_traveling_wave_exactness():
    started = time.time()
    grid = SpectralGrid(1.0, 1024)
    profile = periodic_profile(2.0, 1.0, grid).fourier
    constants = periodic_wave_constants(2.0, 1.0)
    speed = periodic_speed(2.0, 1.0)
    residual = traveling_residual(profile, speed, constants.B, 1.0)

    trajectory = evolve(make_ilw(1.0, grid), profile, 1.0, dt=5e-5,
                        store_stride=5000)
    translation = max(
        (state - profile.shifted(speed * t)).sup_norm() / profile.sup_norm()
        for t, state in zip(trajectory.times[1:], trajectory.states[1:]))
    elapsed = time.time() - started
    ok = residual < 1e-8 and translation < 1e-4 and elapsed < 60.0
    line = _verdict(1, ok, "residual %.3e (<1e-8), translation %.3e (<1e-4)"
                    % (residual, translation), started)
    assert ok, line


def test_criterion_2_poisson_summation():
    started = time.time()
    grid = SpectralGrid(1.0, 1024)
    worst = 0.0
    for adelta in (1.0, 2.0, 3.0):
        profiles = periodic_profile(adelta, 1.0, grid)
        gap = float(np.max(np.abs(profiles.fourier.samples()
                                  - profiles.lattice.samples())))
        worst = max(worst, gap)
    ok = worst < 1e-10 and time.time() - started < 60.0
    line = _verdict(2, ok, "route gap %.3e (<1e-10) over adelta in {1,2,3}"
                    % worst, started)
    assert ok, line


def test_criterion_3_smoothing_bound():
    started = time.time()
    grid = SpectralGrid(8.0 * np.pi, 2048)
    ratios = []
    for depth in (0.25, 1.0, 4.0):
        for s1, s2 in ((-0.5, 1.0), (0.0, 2.0)):
            ratios.append(smoothing_operator_scan(s1, s2, depth, grid).ratio)
    constant = max(ratios)
    spread = max(ratios) / min(ratios)
    ok = spread < 10.0 and time.time() - started < 60.0
    line = _verdict(3, ok, "bounding constant %.3f, ratio variation %.2fx (<10x)"
                    % (constant, spread), started)
    assert ok, line


def test_criterion_4_deep_water_conservation():
    started = time.time()
    grid = SpectralGrid(TWO_PI, 256)
    u0 = random_field(grid, -0.25, 0.25, 1, decay=0.25)
    trajectory = evolve(make_bo(grid), u0, 1.0, dt=1e-4, store_stride=1000)
    fine0 = trajectory.states[0].embedded(2048)
    xi_max = modes_to_xi_max(fine0.grid, 512)
    spectrum0 = LaxSpectrum(build_lax(fine0, xi_max), fine0)
    rule = build_weighted_rule(spectrum0.form_at, 32.0, -0.25)
    betas = np.array([
        weighted_resolvent_form(state.embedded(2048), 32.0, -0.25,
                                xi_max=xi_max, rule=rule).value
        for state in trajectory.states])
    drift = float(np.max(np.abs(betas - betas[0])) / betas[0])
    elapsed = time.time() - started
    ok = drift < 1e-6 and elapsed < 300.0
    line = _verdict(4, ok, "weighted-form drift %.3e (<1e-6) over t in [0,1]"
                    % drift, started)
    assert ok, line


def test_criterion_5_gradient_identity():
    started = time.time()
    grid = SpectralGrid(TWO_PI, 256)
    u = random_field(grid, -0.25, 0.3, 7, decay=0.25)
    gradient = resolvent_form_gradient(u, 32.0)
    rng = np.random.default_rng(3)
    h = 1e-5
    worst = 0.0
    for _ in range(20):
        shape = random_field(grid, -0.25, 1.0, int(rng.integers(10 ** 6)),
                             decay=0.2)
        v = shape.samples() / shape.sup_norm()
        plus = forward_transform(u.samples() + h * v, grid)
        minus = forward_transform(u.samples() - h * v, grid)
        fd = (resolvent_form(plus, 32.0)
              - resolvent_form(minus, 32.0)) / (2.0 * h)
        pairing = float(np.sum(gradient.samples() * v)) * grid.spacing
        worst = max(worst, abs(fd - pairing) / max(abs(fd), abs(pairing)))
    ok = worst < 1e-6 and time.time() - started < 60.0
    line = _verdict(5, ok, "gradient vs finite differences %.3e relative "
                    "(<1e-6), 20 directions" % worst, started)
    assert ok, line


def test_criterion_6_flow_derivative_identity():
    started = time.time()
    grid = SpectralGrid(TWO_PI, 256)
    u0 = random_field(grid, -0.25, 0.25, 9, decay=0.25)
    trajectory = evolve(make_ilw(0.5, grid), u0, 0.7501, dt=1e-4,
                        store_stride=1)
    xi_max = modes_to_xi_max(grid, 64)
    anchor = trajectory.states[2500]
    spectrum = LaxSpectrum(build_lax(anchor, xi_max), anchor)
    rule = build_weighted_rule(spectrum.form_at, 32.0, -0.25, rtol=1e-10)

    def beta(state):
        return weighted_resolvent_form(state, 32.0, -0.25, xi_max=xi_max,
                                       rule=rule).value

    worst = 0.0
    for idx in (2500, 5000, 7500):
        h = trajectory.times[idx + 1] - trajectory.times[idx]
        fd = (beta(trajectory.states[idx + 1])
              - beta(trajectory.states[idx - 1])) / (2.0 * h)
        flow = form_flow_derivative(trajectory.states[idx], 32.0, 0.5, -0.25,
                                    xi_max=xi_max, rule=rule)
        worst = max(worst, abs(fd - flow.total) / abs(flow.total))
    elapsed = time.time() - started
    ok = worst < 1e-4 and elapsed < 300.0
    line = _verdict(6, ok, "flow derivative vs finite differences %.3e "
                    "relative (<1e-4) at three times" % worst, started)
    assert ok, line


def test_criterion_7_growth_bound(tmp_path):
    started = time.time()
    cfg = load_config("gronwall", output_dir=str(tmp_path / "g"))
    result = run(cfg)
    rates = [result.report["mean_a_hat"][repr(d)] for d in (0.5, 1.0, 2.0)]
    decreasing = all(x > y for x, y in zip(rates, rates[1:]))
    elapsed = time.time() - started
    ok = (result.passed and result.report["all_bound_ok"] and decreasing
          and elapsed < 900.0)
    line = _verdict(7, ok, "30 runs bound-ok %s, mean rates by depth "
                    "%.2e > %.2e > %.2e" % (result.report["all_bound_ok"],
                                            *rates), started)
    assert ok, line


def test_criterion_8_norm_equivalence():
    started = time.time()
    grid = SpectralGrid(TWO_PI, 256)
    ratios = []
    for seed in range(200):
        amplitude = 0.1 + 0.4 * ((seed * 2654435761) % 1000) / 1000.0
        u = random_field(grid, -0.25, amplitude, seed, decay=0.15)
        beta = weighted_resolvent_form(u, 32.0, -0.25).value
        norm = sobolev_norm(u, SobolevIndex(-0.25, 32.0))
        ratios.append(beta / norm ** 2)
    ratios = np.array(ratios)
    constant = float(max(ratios.max(), 1.0 / ratios.min()))
    inside = bool(np.all((ratios >= 1.0 / constant)
                         & (ratios <= constant)))
    elapsed = time.time() - started
    ok = constant < 10.0 and inside and elapsed < 600.0
    line = _verdict(8, ok, "200 fields, fitted C %.3f (<10), ratios in "
                    "[%.3f, %.3f]" % (constant, ratios.min(), ratios.max()),
                    started)
    assert ok, line


def test_criterion_9_degeneration_observables(tmp_path, capsys):
    started = time.time()
    cfg = load_config("illposed", output_dir=str(tmp_path / "ip"))
    result = run(cfg)
    capsys.readouterr()
    report = result.report
    elapsed = time.time() - started
    ok = result.passed and elapsed < 60.0
    with capsys.disabled():
        line = _verdict(9, ok, "distances %s decreasing, rate gap %.1e "
                        "(<1e-10), mean gap %.1e (<1e-12)"
                        % (["%.3f" % d for d in report["delta_distances"]],
                           report["max_rate_gap"], report["max_mean_gap"]),
                        started)
    assert ok, line


def test_criterion_10_integrator_quality():
    started = time.time()
    grid = SpectralGrid(TWO_PI, 256)
    u0 = random_field(grid, -0.25, 0.25, 7, decay=0.25)
    problem = make_ilw(1.0, grid)
    trajectory = evolve(problem, u0, 1.0, dt=1e-3, store_stride=10)
    mass_drift = relative_drift(trajectory.diagnostics["mass"])
    energy_drift = relative_drift(trajectory.diagnostics["hamiltonian"])

    reference = evolve(problem, u0, 0.1, dt=1.25e-4,
                       store_stride=10 ** 9).final()
    errors = []
    steps = (1e-3, 5e-4, 2.5e-4)
    for dt in steps:
        final = evolve(problem, u0, 0.1, dt=dt, store_stride=10 ** 9).final()
        errors.append((final - reference).l2_norm())
    order = float(np.polyfit(np.log(steps), np.log(errors), 1)[0])
    elapsed = time.time() - started
    ok = (mass_drift < 1e-8 and energy_drift < 1e-8 and order >= 3.8
          and elapsed < 300.0)
    line = _verdict(10, ok, "mass drift %.3e, energy drift %.3e (<1e-8), "
                    "self-convergence order %.2f (>=3.8)"
                    % (mass_drift, energy_drift, order), started)
    assert ok, line

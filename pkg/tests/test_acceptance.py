"""Acceptance suite: one test per criterion, each printing a pass/fail line.

The criteria exercise the full stack end to end: exact operator identities,
closed-form integration oracles, the dissipation inequality, the absorbing
ball, tail decay, two-trajectory contraction, the unique periodic breather
under strong damping, dimension-estimator calibration, and mutation tests
that prove each verifier can actually fail.
"""

import dataclasses
import math
import sys
import time

import numpy as np
import pytest

from dnls import (ConstantLaw, DrivingField, DrivingSpec, HarmonicSumLaw,
                  IntegratorConfig, LatticeState, ModelParams,
                  NonlinearitySpec, PeriodicLaw, SpatialProfile,
                  apply_difference, apply_laplacian, check_apriori_bound,
                  check_strong_damping, contraction_rate,
                  correlation_dimension, find_breather, integrate, l2_norm,
                  monitor_dissipation, poincare_points, predict_absorbing,
                  predict_tail, verify_absorbing, verify_breather, verify_tail)
from dnls.integrator import ORACLE_CONFIG
from dnls.lattice import norm_sq, random_state


@pytest.fixture
def report(capfd):
    """One pass/fail line per criterion, emitted past pytest's capture."""

    def _report(num: int, name: str, ok: bool, detail: str = "") -> None:
        status = "PASS" if ok else "FAIL"
        line = f"[acceptance {num}] {name}: {status}"
        if detail:
            line += f" ({detail})"
        with capfd.disabled():
            sys.stdout.write("\n" + line + "\n")
            sys.stdout.flush()
        assert ok, line

    return _report


def _unit_exp_profile(rate=1.0, sup=1.0):
    """Exponential profile scaled to l^2 norm ``sup``."""
    return SpatialProfile("exponential", rate=rate,
                          amplitude=sup / math.sqrt(1.0 / math.tanh(rate)))


def _dissipative_scenario():
    """Cubic lattice with gamma=2, sup||g2||=0.25 and exponential additive
    driving of unit sup norm; effective damping 1.5."""
    g1 = DrivingField(_unit_exp_profile(), PeriodicLaw(period=2 * math.pi))
    g2 = DrivingField(SpatialProfile("single_site", amplitude=0.25),
                      ConstantLaw(1.0))
    spec = DrivingSpec(g1=g1, g2=g2)
    params = ModelParams(kappa=1.0, gamma=2.0,
                         nonlinearity=NonlinearitySpec.cubic())
    return params, spec


def _breather_scenario():
    g1 = DrivingField(SpatialProfile("exponential", amplitude=0.5, rate=1.0),
                      PeriodicLaw(period=2 * math.pi))
    spec = DrivingSpec(g1=g1)
    params = ModelParams(kappa=1.0, gamma=3.0,
                         nonlinearity=NonlinearitySpec.cubic(-1))
    return params, spec


def test_criterion_1_operator_suite(report):
    t_start = time.perf_counter()
    rng = np.random.default_rng(0)
    ok = True
    for _ in range(1000):
        v = rng.standard_normal(256) + 1j * rng.standard_normal(256)
        w = rng.standard_normal(256) + 1j * rng.standard_normal(256)
        psi = LatticeState(v, "periodic")
        theta = LatticeState(w, "periodic")
        npsi = l2_norm(psi)
        ntheta = l2_norm(theta)
        # ||A psi|| <= 4 ||psi||
        ok &= l2_norm(apply_laplacian(psi)) <= 4.0 * npsi * (1 + 1e-12)
        # (B psi, theta) = (psi, B* theta)
        lhs = np.vdot(theta.values, apply_difference(psi, "forward").values)
        rhs = np.vdot(apply_difference(theta, "backward").values, psi.values)
        ok &= abs(lhs - rhs) <= 1e-12 * npsi * ntheta
        # B*B = -A
        comp = apply_difference(apply_difference(psi, "forward"),
                                "backward").values + apply_laplacian(psi).values
        ok &= math.sqrt(norm_sq(comp)) <= 1e-12 * npsi
        if not ok:
            break
    elapsed = time.perf_counter() - t_start
    report(1, "operator suite", ok and elapsed < 1.0,
            f"1000 states, {elapsed:.2f}s")


def test_criterion_2_integration_oracles(report):
    t_start = time.perf_counter()
    # affine: decoupled site with constant drive, explicit relaxation
    g = 0.3 + 0.4j
    gamma = 1.5
    params = ModelParams(kappa=0.0, gamma=gamma)
    spec = DrivingSpec(g1=DrivingField(
        SpatialProfile("custom", values=(g,), start=0), ConstantLaw(1.0)))
    psi0 = random_state(16, 0, norm=0.5)
    traj = integrate(psi0, 0.0, 10.0, params, spec, ORACLE_CONFIG)
    fp = -1j * g / gamma
    err_affine = 0.0
    for i in range(traj.n_samples):
        t = traj.times[i]
        exact = psi0.values * math.exp(-gamma * t)
        exact = exact.copy()
        exact[8] += fp * (1 - math.exp(-gamma * t))
        err_affine = max(err_affine,
                         float(np.linalg.norm(traj.values[i] - exact)))

    # kappa-only periodic lattice, diagonalized by the DFT
    params2 = ModelParams(kappa=1.0, gamma=1.0)
    spec2 = DrivingSpec(g1=DrivingField.zero())
    psi1 = random_state(64, 1, norm=1.0, bc="periodic", localized=False)
    traj2 = integrate(psi1, 0.0, 1.0, params2, spec2, ORACLE_CONFIG)
    k = np.arange(64)
    lam = 4.0 * np.sin(np.pi * k / 64) ** 2
    exact2 = np.fft.ifft(np.fft.fft(psi1.values) * np.exp((1j * lam - 1.0)))
    err_dft = float(np.linalg.norm(traj2.values[-1] - exact2))

    elapsed = time.perf_counter() - t_start
    report(2, "integration oracles",
            err_affine <= 1e-8 and err_dft <= 1e-8 and elapsed < 5.0,
            f"affine {err_affine:.2e}, dft {err_dft:.2e}, {elapsed:.2f}s")


def test_criterion_3_dissipation_and_apriori(report):
    t_start = time.perf_counter()
    params, spec = _dissipative_scenario()
    psi0 = random_state(256, 0, norm=2.0)
    traj = integrate(psi0, 0.0, 50.0, params, spec)
    diss = monitor_dissipation(traj, params, spec)
    bound = check_apriori_bound(traj, params, spec)
    elapsed = time.perf_counter() - t_start
    report(3, "dissipation inequality and a-priori bound",
            diss.ok and bound.ok and elapsed < 30.0,
            f"{diss.checked} intervals, {len(diss.violations)} violations, "
            f"{elapsed:.1f}s")


def test_criterion_4_absorbing_ball(report):
    t_start = time.perf_counter()
    params, spec = _dissipative_scenario()
    probe = predict_absorbing(params, spec, r=1.0)
    r = 10.0 * probe.radius
    pred = predict_absorbing(params, spec, r=r)
    psi0 = random_state(256, 0, norm=r)
    traj = integrate(psi0, 0.0, 5.0 * pred.entry_time, params, spec)
    result = verify_absorbing(traj, pred)
    elapsed = time.perf_counter() - t_start
    report(4, "absorbing ball",
           result.ok and elapsed < 60.0,
           f"K={pred.radius:.4f}, entry {result.first_entry_t:.2f} <= "
           f"T={pred.entry_time:.2f}, {elapsed:.1f}s")


def test_criterion_5_tail_decay(report):
    t_start = time.perf_counter()
    params, spec = _dissipative_scenario()
    xi = 1e-4
    r = 1.0
    pred = predict_tail(xi, r, params, spec, n_sites=256)
    psi0 = random_state(256, 0, norm=r)
    traj = integrate(psi0, 0.0, 3.0 * pred.entry_time + 5.0, params, spec,
                     tail_cutoff=pred.cutoff)
    result = verify_tail(traj, pred)
    elapsed = time.perf_counter() - t_start
    report(5, "tail decay",
           result.ok and elapsed < 60.0,
           f"M={pred.cutoff}, max tail {result.max_tail_after_entry:.2e} "
           f"<= xi={xi:.0e}, {elapsed:.1f}s")


def test_criterion_6_contraction(report):
    t_start = time.perf_counter()
    # linear case: the distance must decay at exactly gamma
    g1 = DrivingField(_unit_exp_profile(), PeriodicLaw(period=2 * math.pi))
    lin_spec = DrivingSpec(g1=g1)
    lin = ModelParams(kappa=1.0, gamma=1.0)
    rep_lin = contraction_rate(lin, lin_spec, seeds=(1, 2), horizon=8.0)
    lin_ok = abs(-rep_lin.fitted_rate - 1.0) <= 0.01

    # cubic strong-damping case: decay at least gamma - a*K^b - sup||g2||
    g2 = DrivingField(SpatialProfile("single_site", amplitude=0.25),
                      ConstantLaw(1.0))
    cub_spec = DrivingSpec(g1=g1, g2=g2)
    cub = ModelParams(kappa=1.0, gamma=5.0,
                      nonlinearity=NonlinearitySpec.cubic())
    rep_cub = contraction_rate(cub, cub_spec, seeds=(3, 4), horizon=2.0)
    elapsed = time.perf_counter() - t_start
    report(6, "two-trajectory contraction",
            lin_ok and rep_cub.pass_ and elapsed < 60.0,
            f"linear {-rep_lin.fitted_rate:.4f} vs 1.0, cubic "
            f"{-rep_cub.fitted_rate:.3f} >= {rep_cub.predicted_rate:.3f}, "
            f"{elapsed:.1f}s")


def test_criterion_7_breather(report):
    t_start = time.perf_counter()
    params, spec = _breather_scenario()
    check = check_strong_damping(params, spec)
    tol = 1e-10

    sols = []
    for seed in (None, 1, 2):
        s = (None if seed is None else
             random_state(256, seed, norm=0.5 * check.ball_radius))
        sols.append(find_breather(params, spec, tol=tol, seed=s, n_sites=256))
    sol = sols[0]

    theo_ratio = math.exp(-check.contraction_exponent * sol.period)
    ratio_ok = sol.contraction_ratio <= theo_ratio + 0.05
    residual_ok = sol.periodicity_residual <= 1e-9
    spread = max(float(np.linalg.norm(a.state0.values - b.state0.values))
                 for a in sols for b in sols)
    seeds_ok = spread <= 1e-9
    verified = verify_breather(sol, params, spec, tol=tol).ok

    # analytic witness: kappa=0, F=0, constant single-site drive has the
    # unique periodic orbit psi = -i*g/gamma
    g = 0.2 - 0.3j
    lin = ModelParams(kappa=0.0, gamma=2.0)
    lin_spec = DrivingSpec(g1=DrivingField(
        SpatialProfile("custom", values=(g,), start=0), ConstantLaw(1.0)))
    lin_sol = find_breather(lin, lin_spec, tol=1e-12, period=1.0, n_sites=16)
    expect = np.zeros(16, dtype=complex)
    expect[8] = -1j * g / 2.0
    analytic_err = float(np.linalg.norm(lin_sol.state0.values - expect))

    elapsed = time.perf_counter() - t_start
    report(7, "unique periodic breather",
            ratio_ok and residual_ok and seeds_ok and verified
            and analytic_err <= 1e-10 and elapsed < 120.0,
            f"ratio {sol.contraction_ratio:.2e} <= {theo_ratio:.2e}+0.05, "
            f"residual {sol.periodicity_residual:.1e}, spread {spread:.1e}, "
            f"analytic {analytic_err:.1e}, {elapsed:.1f}s")


def test_criterion_8_dimension_estimates(report):
    t_start = time.perf_counter()
    rng = np.random.default_rng(0)
    ang = rng.uniform(0, 2 * np.pi, 2000)
    circle = np.column_stack([np.cos(ang), np.sin(ang)])
    est_circle = correlation_dimension(circle, theiler_window=0)

    rad = np.sqrt(rng.uniform(0, 1, 2000))
    ang2 = rng.uniform(0, 2 * np.pi, 2000)
    disc = np.column_stack([rad * np.cos(ang2), rad * np.sin(ang2)])
    est_disc = correlation_dimension(disc, theiler_window=0)

    # quasiperiodically driven lattice: the estimate must be finite with a
    # tight confidence interval (finite fractal dimension, empirically)
    law = HarmonicSumLaw(frequencies=(1.0, math.sqrt(2.0)),
                         amplitudes=(1.0, 0.8))
    g1 = DrivingField(SpatialProfile("exponential", amplitude=1.0, rate=1.0),
                      law)
    spec = DrivingSpec(g1=g1)
    params = ModelParams(kappa=1.0, gamma=0.5,
                         nonlinearity=NonlinearitySpec.cubic(-1))
    pts = poincare_points(params, spec, n_points=2000,
                          section_period=2 * math.pi, n_sites=64, seed=0)
    est_dnls = correlation_dimension(pts)

    circle_ok = abs(est_circle.slope - 1.0) <= 0.1
    disc_ok = abs(est_disc.slope - 2.0) <= 0.15
    dnls_ok = (not est_dnls.degenerate and math.isfinite(est_dnls.slope)
               and est_dnls.ci_width < 0.5)
    elapsed = time.perf_counter() - t_start
    report(8, "correlation dimension",
            circle_ok and disc_ok and dnls_ok and elapsed < 300.0,
            f"circle {est_circle.slope:.3f}, disc {est_disc.slope:.3f}, "
            f"lattice {est_dnls.slope:.3f} (ci {est_dnls.ci_width:.3f}), "
            f"{elapsed:.0f}s")


def test_criterion_9_mutation_tests(report):
    params, spec = _dissipative_scenario()
    pred_abs = predict_absorbing(params, spec, r=2.0)
    pred_tail = predict_tail(1e-3, 2.0, params, spec, n_sites=128)
    psi0 = random_state(128, 0, norm=2.0)
    horizon = 3.0 * max(pred_abs.entry_time, pred_tail.entry_time) + 2.0
    traj = integrate(psi0, 0.0, horizon, params, spec,
                     tail_cutoff=pred_tail.cutoff)

    # sanity: the honest trajectory passes everything
    assert verify_absorbing(traj, pred_abs).ok
    assert verify_tail(traj, pred_tail).ok
    assert monitor_dissipation(traj, params, spec).ok
    assert check_apriori_bound(traj, params, spec).ok

    # absorbing: push the late norms outside the ball
    norms = traj.norms.copy()
    norms[traj.times > pred_abs.entry_time] += 2.0 * pred_abs.radius
    abs_fails = not verify_absorbing(
        dataclasses.replace(traj, norms=norms), pred_abs).ok

    # tail: inflate the tail series past xi
    tail_fails = not verify_tail(
        dataclasses.replace(traj, tails=traj.tails + 1.0), pred_tail).ok

    # dissipation: inject an energy jump mid-trajectory
    jumped = traj.norms.copy()
    jumped[jumped.size // 2:] += 5.0
    diss_fails = not monitor_dissipation(
        dataclasses.replace(traj, norms=jumped), params, spec).ok

    # a-priori bound: same inflated norms must violate the envelope
    apriori_fails = not check_apriori_bound(
        dataclasses.replace(traj, norms=traj.norms + 10.0), params, spec).ok

    # breather periodicity: a perturbed state is not a periodic orbit
    bparams, bspec = _breather_scenario()
    fast = IntegratorConfig(rtol=1e-9, atol=1e-11, dt_init=1e-3)
    sol = find_breather(bparams, bspec, tol=1e-8, n_sites=64, config=fast)
    bump = random_state(64, 9, norm=1e-3)
    fake = dataclasses.replace(
        sol, state0=LatticeState(sol.state0.values + bump.values))
    breather_fails = not verify_breather(fake, bparams, bspec, tol=1e-8,
                                         config=fast).ok

    report(9, "mutation tests",
            abs_fails and tail_fails and diss_fails and apriori_fails
            and breather_fails,
            "all five verifiers reject corrupted inputs")

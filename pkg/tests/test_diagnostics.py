"""Absorbing ball, tail, contraction, continuity and dimension checks."""

import dataclasses
import math

import numpy as np
import pytest

from dnls import (ConstantLaw, DrivingField, DrivingSpec, IntegratorConfig,
                  LatticeState, ModelParams, NonlinearitySpec, PeriodicLaw,
                  SpatialProfile, check_apriori_bound, continuity_gap,
                  contraction_rate, correlation_dimension, integrate,
                  predict_absorbing, predict_tail, translate, verify_absorbing,
                  verify_tail)
from dnls.errors import (DampingTooWeakError, DomainError,
                         TruncationTooSmallError)
from dnls.lattice import random_state


def _unit_exp_profile(rate=1.0):
    # exponential profile scaled so its l^2 norm is exactly 1
    return SpatialProfile("exponential", rate=rate,
                          amplitude=1.0 / math.sqrt(1.0 / math.tanh(rate)))


def _scenario(gamma=2.0, g2_amp=0.25):
    g1 = DrivingField(_unit_exp_profile(), PeriodicLaw(period=2 * math.pi))
    g2 = DrivingField(SpatialProfile("single_site", amplitude=g2_amp),
                      ConstantLaw(1.0))
    spec = DrivingSpec(g1=g1, g2=g2)
    params = ModelParams(kappa=1.0, gamma=gamma,
                         nonlinearity=NonlinearitySpec.cubic())
    return params, spec


class TestAprioriBound:
    def test_holds_on_scenario(self):
        params, spec = _scenario()
        psi0 = random_state(64, 0, norm=3.0)
        traj = integrate(psi0, 0.0, 10.0, params, spec)
        assert check_apriori_bound(traj, params, spec).ok

    def test_fails_on_inflated_norms(self):
        params, spec = _scenario()
        psi0 = random_state(64, 0, norm=3.0)
        traj = integrate(psi0, 0.0, 10.0, params, spec)
        bad = dataclasses.replace(traj, norms=traj.norms + 10.0)
        report = check_apriori_bound(bad, params, spec)
        assert not report.ok and report.first_violation_t is not None


class TestAbsorbing:
    def test_prediction_formulas(self):
        params, spec = _scenario()
        pred = predict_absorbing(params, spec, r=5.0)
        assert pred.gamma_eff == pytest.approx(1.5)
        assert pred.radius == pytest.approx(math.sqrt(2.0) / 1.5)
        expect_t = math.log(1.5 ** 2 * 25.0) / 1.5
        assert pred.entry_time == pytest.approx(expect_t)

    def test_entry_time_clamped(self):
        params, spec = _scenario()
        pred = predict_absorbing(params, spec, r=1e-3)
        assert pred.entry_time == 0.0

    def test_verify_on_trajectory(self):
        params, spec = _scenario()
        pred = predict_absorbing(params, spec, r=3.0)
        psi0 = random_state(64, 0, norm=3.0)
        traj = integrate(psi0, 0.0, 3.0 * pred.entry_time + 2.0, params, spec)
        report = verify_absorbing(traj, pred)
        assert report.ok
        assert report.first_entry_t <= report.predicted_entry_t

    def test_verify_rejects_short_trajectory(self):
        params, spec = _scenario()
        pred = predict_absorbing(params, spec, r=100.0)
        psi0 = random_state(64, 0, norm=1.0)
        traj = integrate(psi0, 0.0, 0.5, params, spec)
        with pytest.raises(DomainError):
            verify_absorbing(traj, pred)

    def test_requires_positive_effective_damping(self):
        params, spec = _scenario(gamma=0.4)
        with pytest.raises(DampingTooWeakError):
            predict_absorbing(params, spec, r=1.0)


class TestTail:
    def test_cutoff_is_minimal(self):
        params, spec = _scenario()
        pred = predict_tail(1e-4, 1.0, params, spec, n_sites=256)
        target = pred.gamma_eff ** 2 * 1e-4 / 2.0
        amp = spec.g1.law.amp_bound()
        assert spec.g1.profile.tail_sq(pred.cutoff) * amp ** 2 <= target
        if pred.cutoff > 0:
            assert spec.g1.profile.tail_sq(pred.cutoff - 1) * amp ** 2 > target

    def test_entry_time_formula(self):
        params, spec = _scenario()
        pred = predict_tail(1e-4, 2.0, params, spec, n_sites=256)
        assert pred.entry_time == pytest.approx(math.log(2 * 4.0 / 1e-4) / 1.5)

    def test_truncation_too_small(self):
        params, spec = _scenario()
        with pytest.raises(TruncationTooSmallError):
            predict_tail(1e-30, 1.0, params, spec, n_sites=8)

    def test_verify_round_trip(self):
        params, spec = _scenario()
        pred = predict_tail(1e-3, 1.0, params, spec, n_sites=128)
        psi0 = random_state(128, 0, norm=1.0)
        traj = integrate(psi0, 0.0, 2.0 * pred.entry_time + 2.0, params, spec,
                         tail_cutoff=pred.cutoff)
        assert verify_tail(traj, pred).ok
        inflated = dataclasses.replace(traj, tails=traj.tails + 1.0)
        assert not verify_tail(inflated, pred).ok

    def test_verify_needs_matching_cutoff(self):
        params, spec = _scenario()
        pred = predict_tail(1e-3, 1.0, params, spec, n_sites=128)
        psi0 = random_state(128, 0, norm=1.0)
        traj = integrate(psi0, 0.0, 2.0 * pred.entry_time + 2.0, params, spec)
        with pytest.raises(DomainError):
            verify_tail(traj, pred)


class TestContraction:
    def test_linear_rate_matches_gamma(self):
        g1 = DrivingField(_unit_exp_profile(), PeriodicLaw(period=2 * math.pi))
        spec = DrivingSpec(g1=g1)
        params = ModelParams(kappa=1.0, gamma=1.0)
        report = contraction_rate(params, spec, seeds=(1, 2), horizon=6.0,
                                  n_sites=64)
        assert report.pass_
        assert report.fitted_rate == pytest.approx(-1.0, rel=2e-2)

    def test_rejects_equal_seeds(self):
        params, spec = _scenario()
        with pytest.raises(DomainError):
            contraction_rate(params, spec, seeds=(1, 1), horizon=1.0)

    def test_rejects_weak_contraction(self):
        # gamma barely above 2*sup||g2|| but below a*K^b + sup||g2||
        g1 = DrivingField(SpatialProfile("exponential", rate=0.5,
                                         amplitude=3.0), ConstantLaw(1.0))
        spec = DrivingSpec(g1=g1)
        params = ModelParams(kappa=1.0, gamma=1.0,
                             nonlinearity=NonlinearitySpec.cubic())
        with pytest.raises(DomainError):
            contraction_rate(params, spec, seeds=(1, 2), horizon=1.0)


class TestContinuity:
    def test_gap_within_gronwall_bound(self):
        params, spec = _scenario()
        theta = random_state(64, 5, norm=0.5)
        bump = random_state(64, 6, norm=1e-3)
        theta_n = LatticeState(theta.values + bump.values)
        report = continuity_gap(params, spec, translate(spec, 0.01), theta,
                                theta_n, horizon=3.0)
        assert report.ok
        assert report.gap[0] == pytest.approx(1e-3, rel=1e-10)

    def test_gap_scales_linearly_in_initial_distance(self):
        g1 = DrivingField(_unit_exp_profile(), PeriodicLaw(period=2 * math.pi))
        spec = DrivingSpec(g1=g1)
        params = ModelParams(kappa=1.0, gamma=1.0)
        theta = random_state(64, 5, norm=0.5)
        bump = random_state(64, 6, norm=1e-3)
        full = LatticeState(theta.values + bump.values)
        half = LatticeState(theta.values + 0.5 * bump.values)
        r_full = continuity_gap(params, spec, spec, theta, full, horizon=2.0)
        r_half = continuity_gap(params, spec, spec, theta, half, horizon=2.0)
        assert r_half.gap[-1] / r_full.gap[-1] == pytest.approx(0.5, rel=1e-6)


class TestCorrelationDimension:
    def test_circle(self):
        rng = np.random.default_rng(0)
        ang = rng.uniform(0, 2 * np.pi, 1500)
        pts = np.column_stack([np.cos(ang), np.sin(ang)])
        est = correlation_dimension(pts, theiler_window=0)
        assert est.slope == pytest.approx(1.0, abs=0.1)
        assert est.ci_width < 0.5

    def test_disc(self):
        rng = np.random.default_rng(1)
        r = np.sqrt(rng.uniform(0, 1, 2000))
        ang = rng.uniform(0, 2 * np.pi, 2000)
        pts = np.column_stack([r * np.cos(ang), r * np.sin(ang)])
        est = correlation_dimension(pts, theiler_window=0)
        assert est.slope == pytest.approx(2.0, abs=0.15)

    def test_degenerate_cloud(self):
        pts = np.zeros((200, 3))
        est = correlation_dimension(pts, theiler_window=0)
        assert est.degenerate and est.slope == 0.0

    def test_needs_enough_points(self):
        with pytest.raises(DomainError):
            correlation_dimension(np.zeros((10, 2)))

    def test_theiler_window_can_exhaust_pairs(self):
        pts = np.random.default_rng(2).normal(size=(120, 2))
        with pytest.raises(DomainError):
            correlation_dimension(pts, theiler_window=500)

"""Mean-field model: printed-formula checks, steady-state and integrator properties."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from lasernoise import (LaserParams, MeanFieldState, gamma_r,
                        integrate_mean_field, inversion_pump, mean_field_rhs,
                        preset, steady_state, validity_check)


def fig_params(pump, n0=5):
    return preset("five_emitter", pump=pump, n0=n0)


def random_params(rng):
    return LaserParams(
        g=rng.uniform(0.01, 0.3),
        kappa=rng.uniform(0.005, 0.5),
        gamma_a=rng.uniform(0.0, 0.3),
        gamma_d=rng.uniform(0.05, 3.0),
        n0=int(rng.integers(1, 50)),
        pump=rng.uniform(0.0, 5.0),
    )


class TestGammaR:
    def test_reference_arithmetic(self):
        p = LaserParams(g=0.1, kappa=0.04, gamma_a=0.012, gamma_d=1.0, n0=5,
                        pump=0.04)
        assert gamma_r(p) == pytest.approx(0.04 / 1.092, rel=1e-12)
        assert gamma_r(p) == pytest.approx(0.036630, abs=5e-7)

    def test_zero_coupling(self):
        p = LaserParams(g=0.0, kappa=0.04, gamma_a=0.012, gamma_d=1.0, n0=5,
                        pump=0.04)
        assert gamma_r(p) == 0.0

    def test_unit_denominator(self):
        p = LaserParams(g=0.5, kappa=0.3, gamma_a=0.1, gamma_d=0.5, n0=1,
                        pump=0.1)
        assert gamma_r(p) == pytest.approx(1.0, rel=1e-14)

    def test_zero_denominator_rejected(self):
        p = LaserParams(g=0.0, kappa=0.0, gamma_a=0.0, gamma_d=0.0, n0=1,
                        pump=0.0)
        with pytest.raises(ValueError):
            gamma_r(p)

    def test_monotone_decreasing_in_pump(self):
        p = fig_params(0.0)
        values = [gamma_r(p.with_pump(pump))
                  for pump in np.geomspace(1e-3, 100.0, 40)]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestMeanFieldRhs:
    def test_empty_system_at_rest(self):
        p = fig_params(0.0)
        assert mean_field_rhs(MeanFieldState(0.0, 0.0), p) == (0.0, 0.0)

    def test_full_inversion_symbolic(self):
        p = fig_params(0.7)
        gr = gamma_r(p)
        dn_a, dn_e = mean_field_rhs(MeanFieldState(0.0, float(p.n0)), p)
        assert dn_a == pytest.approx(gr * p.n0, rel=1e-14)
        assert dn_e == pytest.approx(-gr * p.n0 - p.gamma_a * p.n0, rel=1e-14)

    def test_term_by_term_recomputation(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            p = random_params(rng)
            n_a = rng.uniform(0.0, 40.0)
            n_e = rng.uniform(0.0, p.n0)
            gr = 4.0 * p.g ** 2 / (p.pump + p.kappa + p.gamma_d + p.gamma_a)
            expect_a = (gr * (2 * n_e - p.n0) * n_a + gr * n_e
                        - p.kappa * n_a)
            expect_e = (p.pump * (p.n0 - n_e) - gr * (2 * n_e - p.n0) * n_a
                        - gr * n_e - p.gamma_a * n_e)
            got = mean_field_rhs(MeanFieldState(n_a, n_e), p)
            assert got[0] == pytest.approx(expect_a, rel=1e-12, abs=1e-15)
            assert got[1] == pytest.approx(expect_e, rel=1e-12, abs=1e-15)


class TestIntegrate:
    def test_unpumped_stays_zero(self):
        p = fig_params(0.0)
        out = integrate_mean_field(p, MeanFieldState(0.0, 0.0), 100.0, 0.01)
        assert np.all(out.n_a == 0.0)
        assert np.all(out.n_e == 0.0)

    def test_converges_to_steady_state(self):
        p = fig_params(0.7)
        target = steady_state(p)
        out = integrate_mean_field(p, MeanFieldState(0.0, 0.0), 3000.0, 0.05)
        assert out.final.n_a == pytest.approx(target.n_a, rel=1e-6)
        assert out.final.n_e == pytest.approx(target.n_e, rel=1e-6)

    def test_step_halving_fourth_order(self):
        p = fig_params(0.7)
        coarse = integrate_mean_field(p, MeanFieldState(0.0, 0.0), 200.0, 0.1)
        fine = integrate_mean_field(p, MeanFieldState(0.0, 0.0), 200.0, 0.05)
        assert fine.final.n_a == pytest.approx(coarse.final.n_a, rel=1e-8)
        assert fine.final.n_e == pytest.approx(coarse.final.n_e, rel=1e-8)

    def test_bounds_preserved_for_random_params(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            p = random_params(rng)
            rates = [p.pump, p.kappa, p.gamma_a, p.gamma_d,
                     gamma_r(p) * p.n0]
            dt = 0.01 / max(rates + [1e-6])
            out = integrate_mean_field(
                p, MeanFieldState(0.0, rng.uniform(0, p.n0)),
                min(2000.0 * dt, 500.0), dt)
            assert np.all(out.n_a >= -1e-9)
            assert np.all(out.n_e >= -1e-9)
            assert np.all(out.n_e <= p.n0 + 1e-9)

    def test_instability_detected(self):
        p = fig_params(5.0)
        with pytest.raises(RuntimeError, match="unstable"):
            integrate_mean_field(p, MeanFieldState(30.0, 5.0), 5000.0, 30.0)


class TestSteadyState:
    def test_unpumped(self):
        s = steady_state(fig_params(0.0))
        assert s.n_a == 0.0
        assert s.n_e == 0.0

    def test_quench_asymptote(self):
        p = fig_params(1e4)
        s = steady_state(p)
        assert s.n_e == pytest.approx(p.n0, rel=1e-3)
        assert s.n_a < 0.01

    def test_residuals_over_random_params(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            p = random_params(rng)
            s = steady_state(p)  # residual < 1e-10*scale enforced internally
            assert s.n_a >= 0.0
            assert 0.0 <= s.n_e <= p.n0

    def test_photon_curve_unimodal_in_pump(self):
        p = fig_params(0.0)
        grid = np.geomspace(1e-3, 300.0, 120)
        n_a = np.array([steady_state(p.with_pump(x)).n_a for x in grid])
        peak = int(np.argmax(n_a))
        assert peak not in (0, len(grid) - 1)
        rising = np.diff(n_a[:peak + 1])
        falling = np.diff(n_a[peak:])
        assert np.all(rising >= -1e-9 * n_a.max())
        assert np.all(falling <= 1e-9 * n_a.max())

    def test_lasing_photon_number_target(self):
        # a pump exists where the mean-field photon number reaches ~25
        p = fig_params(0.0)
        pump_25 = brentq(lambda x: steady_state(p.with_pump(x)).n_a - 25.0,
                         0.1, 3.0)
        assert 0.2 < pump_25 < 3.0
        assert steady_state(p.with_pump(pump_25)).n_a == pytest.approx(25.0,
                                                                       rel=0.2)


class TestInversionPump:
    def test_trivial_zero(self):
        p = LaserParams(g=0.0, kappa=0.04, gamma_a=0.0, gamma_d=1.0, n0=5,
                        pump=0.0)
        assert inversion_pump(p) == pytest.approx(0.0, abs=1e-12)

    def test_reference_params_vs_root_finder(self):
        p = fig_params(0.0)
        expected = brentq(
            lambda x: x - gamma_r(p.with_pump(x)) - p.gamma_a, 1e-6, 1.0,
            xtol=1e-14)
        got = inversion_pump(p)
        assert got == pytest.approx(expected, rel=1e-9)
        assert got == pytest.approx(0.0484, abs=5e-4)

    def test_linear_case_doubles(self):
        base = LaserParams(g=0.0, kappa=0.04, gamma_a=0.01, gamma_d=1.0,
                           n0=5, pump=0.0)
        doubled = LaserParams(g=0.0, kappa=0.04, gamma_a=0.02, gamma_d=1.0,
                              n0=5, pump=0.0)
        assert inversion_pump(doubled) == pytest.approx(
            2.0 * inversion_pump(base), rel=1e-12)


class TestValidity:
    def test_reference_margin(self):
        report = validity_check(fig_params(0.04))
        assert report.valid
        assert report.margin == pytest.approx(1.092 / 0.1, rel=1e-12)

    def test_borderline_warns(self):
        p = LaserParams(g=2.0, kappa=1.0, gamma_a=0.5, gamma_d=0.5, n0=1,
                        pump=0.0)
        with pytest.warns(RuntimeWarning):
            report = validity_check(p)
        assert report.margin == pytest.approx(1.0)
        assert not report.valid

    def test_zero_coupling_always_valid(self):
        p = LaserParams(g=0.0, kappa=0.04, gamma_a=0.012, gamma_d=1.0, n0=5,
                        pump=0.0)
        report = validity_check(p)
        assert report.valid
        assert math.isinf(report.margin)

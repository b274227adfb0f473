"""Estimator checks against closed forms, synthetic processes and small oracles."""

import math

import numpy as np
import pytest

from lasernoise import (AutocorrelationEstimate, g1, linewidth,
                        photon_statistics, poisson_chi2_pvalue, preset,
                        simulate, spectrum, subtract_mean_drift)
from lasernoise.engine import FieldTrajectory


def synthetic_trajectory(samples, sample_dt=0.05, n_a=None, n_e=None,
                         params=None, seed=0):
    n = len(samples)
    return FieldTrajectory(
        params=params or preset("five_emitter"), seed=seed,
        sample_dt=sample_dt, burn_in=0.0, t_end=n * sample_dt,
        samples=np.asarray(samples, dtype=np.complex128),
        n_a=np.asarray(n_a if n_a is not None else np.ones(n), dtype=np.int64),
        n_e=np.asarray(n_e if n_e is not None else np.zeros(n), dtype=np.int64),
        event_counts=np.zeros(7, dtype=np.int64), n_events=0,
        dwell_hist=np.array([]), dwell_total=0.0)


def wiener_field(seed, n, dt, diffusion):
    rng = np.random.default_rng(seed)
    w = np.cumsum(rng.normal(0.0, math.sqrt(diffusion * dt), n))
    return synthetic_trajectory(np.exp(1j * w), sample_dt=dt)


class TestPhotonStatistics:
    def test_constant_record_fock_like(self):
        stats = photon_statistics(np.full(4096, 5))
        assert stats.g2_zero == pytest.approx(20.0 / 25.0, rel=1e-12)
        assert stats.mean == 5.0

    def test_poisson_record(self):
        samples = np.random.default_rng(1).poisson(7.0, 400_000)
        stats = photon_statistics(samples)
        assert stats.g2_zero == pytest.approx(1.0, abs=0.01)

    def test_thermal_record(self):
        # Bose-Einstein closed form: <n(n-1)> = 2 nbar^2, so g2 = 2
        nbar = 3.0
        pmf_n = np.arange(200)
        pmf = nbar ** pmf_n / (1.0 + nbar) ** (pmf_n + 1)
        mean = (pmf_n * pmf).sum()
        second = (pmf_n * (pmf_n - 1) * pmf).sum()
        assert second / mean ** 2 == pytest.approx(2.0, rel=1e-6)
        samples = np.random.default_rng(2).geometric(1.0 / (1.0 + nbar),
                                                     400_000) - 1
        stats = photon_statistics(samples)
        assert stats.g2_zero == pytest.approx(2.0, abs=3.0 * stats.g2_se)

    def test_dwell_and_sample_weighting_agree(self):
        p = preset("five_emitter", pump=0.7)
        traj = simulate(p, seed=6, t_end=6e4, burn_in=500.0, sample_dt=0.2)
        dwell = photon_statistics(traj, weighting="dwell")
        sampled = photon_statistics(traj, weighting="sample")
        se = math.hypot(dwell.g2_se if math.isfinite(dwell.g2_se) else 0.0,
                        sampled.g2_se if math.isfinite(sampled.g2_se) else 0.0)
        assert abs(dwell.g2_zero - sampled.g2_zero) < max(4 * se, 0.02)
        assert dwell.mean == pytest.approx(sampled.mean, rel=0.02)

    def test_zero_mean_flagged(self):
        stats = photon_statistics(np.zeros(128, dtype=np.int64))
        assert math.isnan(stats.g2_zero)
        assert "mean-zero" in stats.flags

    def test_probabilities_normalized(self):
        samples = np.random.default_rng(3).poisson(2.0, 10_000)
        stats = photon_statistics(samples)
        assert stats.p.sum() == pytest.approx(1.0, rel=1e-12)
        assert np.all(stats.p >= 0.0)


class TestG1:
    def test_constant_field(self):
        traj = synthetic_trajectory(np.ones(4000))
        acf = g1(traj, max_lag=30.0)
        np.testing.assert_allclose(acf.values, 1.0, atol=1e-12)

    def test_zero_lag_is_exactly_one(self):
        traj = wiener_field(3, 20_000, 0.05, 0.3)
        acf = g1(traj, max_lag=100.0)
        assert acf.values[0] == 1.0 + 0.0j

    def test_pure_rotation(self):
        omega = 2.0
        n, dt = 30_000, 0.05
        traj = synthetic_trajectory(np.exp(1j * omega * dt * np.arange(n)),
                                    sample_dt=dt)
        acf = g1(traj, max_lag=20.0)
        np.testing.assert_allclose(acf.values, np.exp(1j * omega * acf.lags),
                                   atol=1e-10)

    def test_matches_direct_quadratic_estimator(self):
        rng = np.random.default_rng(9)
        x = rng.normal(size=64) + 1j * rng.normal(size=64)
        traj = synthetic_trajectory(x, sample_dt=1.0)
        acf = g1(traj, max_lag=12.0)
        power = np.vdot(x, x).real / x.size
        for k in range(13):
            direct = sum(x[i + k] * np.conj(x[i])
                         for i in range(x.size - k)) / (x.size - k) / power
            assert acf.values[k] == pytest.approx(direct, abs=1e-12)

    def test_magnitude_bounded(self):
        traj = wiener_field(4, 50_000, 0.05, 0.5)
        acf = g1(traj, max_lag=300.0)
        assert np.abs(acf.values).max() <= 1.0 + 0.05

    def test_lag_precondition(self):
        traj = synthetic_trajectory(np.ones(1000), sample_dt=1.0)
        with pytest.raises(ValueError, match="span/5"):
            g1(traj, max_lag=300.0)

    def test_zero_field_rejected(self):
        traj = synthetic_trajectory(np.zeros(1000), n_a=np.zeros(1000))
        with pytest.raises(ValueError, match="zero field"):
            g1(traj, max_lag=5.0)

    def test_phase_diffusion_decay(self):
        members = [wiener_field(100 + i, 2 ** 16, 0.05, 0.4)
                   for i in range(8)]
        acf = g1(members, max_lag=40.0)
        est = linewidth(acf)
        assert est.fwhm == pytest.approx(0.4, rel=0.05)


class TestSpectrum:
    def test_lorentzian_pair(self):
        gamma = 0.25
        dt = 0.1
        lags = dt * np.arange(1200)
        acf = AutocorrelationEstimate(
            lags=lags, values=np.exp(-gamma * lags).astype(complex),
            counts=np.ones(lags.size, dtype=np.int64), mean_intensity=1.0,
            sample_dt=dt)
        spec = spectrum(acf)
        est = linewidth(spec)
        assert est.fwhm == pytest.approx(2.0 * gamma, rel=0.03)
        bin_width = spec.omega[1] - spec.omega[0]
        assert abs(spec.omega[np.argmax(spec.values)]) <= bin_width

    def test_rotation_peak_position(self):
        omega0 = 1.5
        dt = 0.1
        lags = dt * np.arange(800)
        acf = AutocorrelationEstimate(
            lags=lags, values=np.exp((1j * omega0 - 0.05) * lags),
            counts=np.ones(lags.size, dtype=np.int64), mean_intensity=1.0,
            sample_dt=dt)
        spec = spectrum(acf)
        bin_width = spec.omega[1] - spec.omega[0]
        assert abs(spec.omega[np.argmax(spec.values)] - omega0) <= bin_width

    def test_small_case_matches_explicit_dft(self):
        rng = np.random.default_rng(12)
        vals = rng.normal(size=6) + 1j * rng.normal(size=6)
        vals[0] = 1.0
        dt = 0.3
        acf = AutocorrelationEstimate(
            lags=dt * np.arange(6), values=vals,
            counts=np.ones(6, dtype=np.int64), mean_intensity=2.0,
            sample_dt=dt)
        spec = spectrum(acf, window="boxcar", pad_factor=1)
        two_sided = np.concatenate([np.conj(vals[:0:-1]), vals])
        taus = dt * np.arange(-5, 6)
        for omega, s in zip(spec.omega, spec.values):
            explicit = 2.0 * dt * np.sum(
                two_sided * np.exp(-1j * omega * taus)).real
            assert s == pytest.approx(max(explicit, 0.0), abs=1e-10)

    def test_positivity_and_parseval_on_simulated_data(self):
        p = preset("five_emitter", pump=0.7)
        traj = simulate(p, seed=13, t_end=3e4, burn_in=500.0, sample_dt=0.5)
        acf = g1(traj, max_lag=1000.0)
        spec = spectrum(acf)
        assert np.all(spec.values >= 0.0)
        integral = np.trapezoid(spec.values, spec.omega) / (2.0 * np.pi)
        assert integral == pytest.approx(acf.mean_intensity, rel=0.02)


class TestLinewidth:
    def test_unresolved_flagged(self):
        dt = 0.1
        lags = dt * np.arange(100)
        acf = AutocorrelationEstimate(
            lags=lags, values=np.exp(-0.001 * lags).astype(complex),
            counts=np.ones(100, dtype=np.int64), mean_intensity=1.0,
            sample_dt=dt)
        est = linewidth(acf)
        assert not est.resolved
        assert math.isnan(est.fwhm)

    def test_center_frequency_recovered(self):
        omega0 = 0.8
        members = []
        for i in range(4):
            traj = wiener_field(40 + i, 2 ** 15, 0.05, 0.3)
            members.append(traj.with_samples(
                traj.samples * np.exp(1j * omega0 * traj.times)))
        est = linewidth(g1(members, max_lag=60.0))
        assert est.center == pytest.approx(omega0, rel=0.05)
        assert est.fwhm == pytest.approx(0.3, rel=0.1)

    def test_g1_and_spectrum_methods_agree(self):
        members = [wiener_field(200 + i, 2 ** 17, 0.05, 0.4)
                   for i in range(8)]
        acf = g1(members, max_lag=120.0)
        both = linewidth(acf, method="both")
        assert both.alternate is not None
        assert both.alternate.fwhm == pytest.approx(both.fwhm, rel=0.10)

    def test_non_exponential_warns(self):
        dt = 0.05
        lags = dt * np.arange(2000)
        gaussian = np.exp(-(0.08 * lags) ** 2)
        acf = AutocorrelationEstimate(
            lags=lags, values=gaussian.astype(complex),
            counts=np.ones(2000, dtype=np.int64), mean_intensity=1.0,
            sample_dt=dt)
        with pytest.warns(RuntimeWarning, match="exponential"):
            est = linewidth(acf)
        assert "non-exponential" in est.flags


class TestDriftSubtraction:
    def test_alpha_zero_identity(self):
        p = preset("five_emitter", pump=0.7)  # alpha = 0
        traj = simulate(p, seed=14, t_end=2000.0, burn_in=100.0,
                        sample_dt=1.0)
        out = subtract_mean_drift(traj, n_e_bar=float(traj.n_e.mean()))
        np.testing.assert_array_equal(out.samples, traj.samples)

    def test_pure_drift_becomes_constant_phase(self):
        from lasernoise import gamma_r
        p = preset("five_emitter", pump=0.7, alpha=5.0)
        n_e_bar = 3.0
        rate = p.alpha * gamma_r(p) * n_e_bar
        traj = synthetic_trajectory(np.ones(5000), sample_dt=0.5, params=p)
        drifting = traj.with_samples(np.exp(1j * rate * traj.times))
        out = subtract_mean_drift(drifting, n_e_bar=n_e_bar)
        np.testing.assert_allclose(np.angle(out.samples), 0.0, atol=1e-9)

    def test_residual_phase_grows_diffusively(self):
        p = preset("kilo_emitter_broad", pump=2.0)  # alpha = 5
        burn = 200.0
        traj = simulate(p, seed=16, t_end=burn + 4000.0, burn_in=burn,
                        sample_dt=0.05)
        out = subtract_mean_drift(traj, n_e_bar=float(traj.n_e.mean()))
        phase = np.unwrap(np.angle(out.samples))
        t = out.times - out.times[0]
        # Wiener scaling: variance of increments grows linearly in lag
        lags = np.array([40, 80, 160, 320, 640])
        var = []
        for k in lags:
            d = phase[k:] - phase[:-k]
            var.append(d.var())
        coef = np.polyfit(np.log(lags), np.log(var), 1)[0]
        assert coef == pytest.approx(1.0, abs=0.35)


class TestPoissonGof:
    def test_accepts_poisson(self):
        samples = np.random.default_rng(21).poisson(6.0, 20_000)
        assert poisson_chi2_pvalue(samples) > 0.01

    def test_rejects_thermal(self):
        samples = np.random.default_rng(22).geometric(1.0 / 7.0, 20_000) - 1
        assert poisson_chi2_pvalue(samples) < 1e-6

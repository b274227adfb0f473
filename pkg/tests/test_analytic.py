"""Closed-form linewidth baselines."""

import numpy as np
import pytest

from lasernoise import (LaserParams, below_threshold_reference, gamma_r,
                        preset, schawlow_townes, steady_state)


def random_params(rng, alpha=0.0):
    return LaserParams(g=rng.uniform(0.02, 0.2),
                       kappa=rng.uniform(0.01, 0.4),
                       gamma_a=rng.uniform(0.0, 0.2),
                       gamma_d=rng.uniform(0.1, 2.0),
                       n0=int(rng.integers(1, 100)),
                       pump=rng.uniform(0.01, 2.0), alpha=alpha)


class TestSchawlowTownes:
    def test_alpha_ratio_identity(self):
        rng = np.random.default_rng(17)
        for _ in range(1000):
            alpha = rng.uniform(0.0, 8.0)
            base = random_params(rng)
            enhanced = LaserParams(**{**base.__dict__, "alpha": alpha})
            ratio = schawlow_townes(enhanced).fwhm / schawlow_townes(base).fwhm
            assert ratio == pytest.approx(1.0 + alpha ** 2, rel=1e-12)

    def test_henry_factor_26(self):
        p0 = preset("kilo_emitter_broad", pump=2.0, alpha=0.0)
        p5 = preset("kilo_emitter_broad", pump=2.0, alpha=5.0)
        assert schawlow_townes(p5).fwhm / schawlow_townes(p0).fwhm == \
            pytest.approx(26.0, rel=1e-12)

    def test_formula_components(self):
        rng = np.random.default_rng(18)
        for _ in range(50):
            p = random_params(rng, alpha=rng.uniform(0, 5))
            out = schawlow_townes(p)
            state = steady_state(p)
            assert out.n_a_bar == state.n_a
            assert out.r_sp == pytest.approx(gamma_r(p) * state.n_e, rel=1e-12)
            assert out.fwhm == pytest.approx(
                out.r_sp * (1 + p.alpha ** 2) / (2 * out.n_a_bar), rel=1e-12)
            # doubling the photon number at fixed R_sp halves the width
            assert out.r_sp * (1 + p.alpha ** 2) / (2 * 2 * out.n_a_bar) == \
                pytest.approx(out.fwhm / 2, rel=1e-12)

    def test_unpumped_rejected(self):
        with pytest.raises(ValueError, match="undefined"):
            schawlow_townes(preset("five_emitter", pump=0.0))


class TestBelowThresholdReference:
    def test_transparency_gives_kappa(self):
        # negligible coupling: inversion pump holds n_e at n0/2, G ~ 0
        p = LaserParams(g=1e-4, kappa=0.04, gamma_a=0.012, gamma_d=1.0,
                        n0=10, pump=0.012)
        state = steady_state(p)
        assert state.n_e == pytest.approx(p.n0 / 2, rel=1e-3)
        assert below_threshold_reference(p) == pytest.approx(p.kappa,
                                                             rel=1e-3)

    def test_unpumped_absorber(self):
        p = preset("five_emitter", pump=0.0)
        assert below_threshold_reference(p) == pytest.approx(
            p.kappa + gamma_r(p) * p.n0, rel=1e-12)

    def test_stationarity_identity(self):
        # kappa - G equals gamma_r*n_e/n_a at any pumped steady state
        rng = np.random.default_rng(19)
        for _ in range(100):
            p = random_params(rng)
            state = steady_state(p)
            if state.n_a <= 0:
                continue
            assert below_threshold_reference(p) == pytest.approx(
                gamma_r(p) * state.n_e / state.n_a, rel=1e-6)

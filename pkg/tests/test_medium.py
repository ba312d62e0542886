import numpy as np
import pytest
from scipy.constants import c, k as k_B

import modesplit as ms
from modesplit.medium import WEAK_RESPONSE_LIMIT

from conftest import CELL, DOPPLER, GAMMA, WAVELENGTH, medium_of_depth
from oracles import voigt_by_quadrature

OMEGA = 2 * np.pi * c / WAVELENGTH

# Convolution values computed with the quadrature oracle ahead of the build
# (gamma = 2pi*6 MHz, Doppler width = 2pi*343 MHz, a0 = 1/m, 780 nm line).
FROZEN_VOIGT = [
    (0.0, 1.535069250492533e-02, 0.0),
    (DOPPLER, 5.714275414586628e-03, -1.156163910219477e-09),
    (3 * DOPPLER, 1.256313147015869e-05, -3.871087237722899e-10),
]


class TestLorentzian:
    def test_line_center(self):
        r = ms.lorentzian_response(0.0, GAMMA, 240.0, OMEGA)
        assert r.alpha == pytest.approx(240.0, rel=1e-15)
        assert r.n_minus_1 == 0.0

    def test_half_width_point(self):
        a0 = 240.0
        r = ms.lorentzian_response(GAMMA / 2, GAMMA, a0, OMEGA)
        assert r.alpha == pytest.approx(a0 / 2, rel=1e-14)
        assert r.n_minus_1 == pytest.approx(-a0 * c / (2 * OMEGA), rel=1e-14)

    def test_far_wing_asymptote(self):
        a0 = 240.0
        delta = 100 * GAMMA
        r = ms.lorentzian_response(delta, GAMMA, a0, OMEGA)
        asymptote = -a0 * c * GAMMA / (2 * OMEGA * delta)
        assert r.alpha == pytest.approx(0.0, abs=a0 * 1e-3)
        assert r.n_minus_1 == pytest.approx(asymptote, rel=1e-3)
        assert r.n_minus_1 < 0

    def test_rejects_bad_gamma(self):
        with pytest.raises(ValueError):
            ms.lorentzian_response(0.0, 0.0, 1.0, OMEGA)
        with pytest.raises(ValueError):
            ms.lorentzian_response(0.0, -1.0, 1.0, OMEGA)


class TestDopplerDispatch:
    def test_homogeneous_mode_rejected(self):
        with pytest.raises(ValueError, match="Doppler mode"):
            ms.doppler_response(0.0, medium_of_depth(12.0, mode="homogeneous"))

    def test_approx_mode_needs_width(self):
        medium = ms.MediumParams(wavelength=WAVELENGTH, gamma=GAMMA, a0_La=12.0,
                                 length=CELL, doppler_width=0.0,
                                 mode="approx_doppler")
        with pytest.raises(ValueError, match="doppler_width"):
            ms.doppler_response(0.0, medium)

    def test_frozen_example_through_params(self):
        medium = medium_of_depth(1.0 * CELL, mode="voigt")
        r = ms.doppler_response(DOPPLER, medium)
        assert r.alpha == pytest.approx(5.714275414586628e-03, abs=1e-8)


class TestVoigt:
    def test_frozen_quadrature_values(self):
        for delta, alpha, nm1 in FROZEN_VOIGT:
            r = ms.voigt_response(delta, GAMMA, DOPPLER, 1.0, OMEGA)
            assert r.alpha == pytest.approx(alpha, abs=1e-8)
            assert r.n_minus_1 == pytest.approx(nm1, abs=1e-8)

    def test_matches_live_quadrature(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            gamma = 2 * np.pi * 10 ** rng.uniform(5.5, 8.0)
            dw = 2 * np.pi * 10 ** rng.uniform(7.5, 9.0)
            delta = rng.uniform(-10, 10) * dw
            r = ms.voigt_response(delta, gamma, dw, 1.0, OMEGA)
            alpha_q, nm1_q = voigt_by_quadrature(delta, gamma, dw, 1.0, OMEGA)
            z_impl = r.alpha + 1j * (OMEGA / c) * r.n_minus_1
            z_q = alpha_q + 1j * (OMEGA / c) * nm1_q
            assert abs(z_impl - z_q) <= 1e-6 * abs(z_q)

    def test_zero_doppler_width_falls_back_to_lorentzian(self):
        for delta in (0.0, GAMMA, 10 * GAMMA):
            v = ms.voigt_response(delta, GAMMA, 0.0, 3.0, OMEGA)
            l = ms.lorentzian_response(delta, GAMMA, 3.0, OMEGA)
            assert v.alpha == l.alpha
            assert v.n_minus_1 == l.n_minus_1

    def test_narrow_doppler_collapses_to_homogeneous(self):
        deltas = np.linspace(-20 * GAMMA, 20 * GAMMA, 401)
        v = ms.voigt_response(deltas, GAMMA, 1e-6 * GAMMA, 5.0, OMEGA)
        l = ms.lorentzian_response(deltas, GAMMA, 5.0, OMEGA)
        assert np.allclose(v.alpha, l.alpha, rtol=1e-6)
        nz = deltas != 0
        assert np.allclose(v.n_minus_1[nz], l.n_minus_1[nz], rtol=1e-6)

    def test_dispersion_vanishes_at_line_center(self):
        r = ms.voigt_response(0.0, GAMMA, DOPPLER, 1.0, OMEGA)
        assert r.n_minus_1 == 0.0

    def test_area_conserved_under_convolution(self):
        from scipy.integrate import trapezoid
        span = 50 * max(GAMMA, DOPPLER)
        deltas = np.linspace(-span, span, 200001)
        hom = ms.lorentzian_response(deltas, GAMMA, 1.0, OMEGA)
        voi = ms.voigt_response(deltas, GAMMA, DOPPLER, 1.0, OMEGA)
        area_h = trapezoid(hom.alpha, deltas)
        area_v = trapezoid(voi.alpha, deltas)
        assert area_v == pytest.approx(area_h, rel=5e-3)


class TestParity:
    @pytest.mark.parametrize("mode", ["homogeneous", "approx_doppler", "voigt"])
    def test_alpha_even_dispersion_odd(self, mode):
        medium = medium_of_depth(12.0, mode=mode)
        deltas = np.linspace(1e5, 10 * DOPPLER, 2001)
        plus = medium.response(deltas)
        minus = medium.response(-deltas)
        assert np.allclose(plus.alpha, minus.alpha, rtol=1e-12, atol=0.0)
        assert np.allclose(plus.n_minus_1, -minus.n_minus_1, rtol=1e-12, atol=0.0)


class TestMediumParams:
    def test_mode_dispatch_matches_free_functions(self):
        deltas = np.linspace(-2 * DOPPLER, 2 * DOPPLER, 101)
        hom = medium_of_depth(12.0, mode="homogeneous")
        assert np.allclose(hom.response(deltas).alpha,
                           ms.lorentzian_response(deltas, GAMMA, hom.alpha0, OMEGA).alpha)
        app = medium_of_depth(12.0, mode="approx_doppler")
        assert np.allclose(app.response(deltas).alpha,
                           ms.lorentzian_response(deltas, DOPPLER, app.alpha0, OMEGA).alpha)
        voi = medium_of_depth(12.0, mode="voigt")
        assert np.allclose(voi.response(deltas).alpha,
                           ms.voigt_response(deltas, GAMMA, DOPPLER, voi.alpha0, OMEGA).alpha)

    def test_validation(self):
        with pytest.raises(ValueError):
            medium_of_depth(-1.0)
        with pytest.raises(ValueError):
            ms.MediumParams(wavelength=0.0, gamma=GAMMA, a0_La=1, length=CELL)
        with pytest.raises(ValueError):
            ms.MediumParams(wavelength=WAVELENGTH, gamma=GAMMA, a0_La=1,
                            length=CELL, mode="nonsense")

    def test_weak_response_flag(self):
        assert medium_of_depth(170.0).weak_response_valid
        strong = ms.MediumParams(wavelength=WAVELENGTH, gamma=GAMMA, a0_La=2e4,
                                 length=1e-4, doppler_width=DOPPLER)
        assert strong.alpha0 * strong.wavelength > WEAK_RESPONSE_LIMIT
        assert not strong.weak_response_valid

    def test_from_temperature(self):
        m = ms.MediumParams.from_temperature(WAVELENGTH, GAMMA, 12.0, CELL,
                                             temperature=378.15)
        assert m.doppler_width == pytest.approx(
            ms.doppler_width(378.15, ms.RB87_MASS, WAVELENGTH))


class TestDopplerWidth:
    def test_zero_temperature(self):
        assert ms.doppler_width(0.0, ms.RB87_MASS, WAVELENGTH) == 0.0

    def test_rb87_at_105C(self):
        dw = ms.doppler_width(378.15, ms.RB87_MASS, WAVELENGTH)
        assert dw / (2 * np.pi) == pytest.approx(345e6, rel=3e-3)
        assert dw == pytest.approx(DOPPLER, rel=0.01)

    def test_sqrt_scaling(self):
        d1 = ms.doppler_width(300.0, ms.RB87_MASS, WAVELENGTH)
        d4 = ms.doppler_width(1200.0, ms.RB87_MASS, WAVELENGTH)
        assert d4 == pytest.approx(2 * d1, rel=1e-12)

    def test_formula(self):
        T, m = 400.0, ms.RB87_MASS
        expect = (2 * np.pi * c / WAVELENGTH) / c * np.sqrt(2 * k_B * T / m)
        assert ms.doppler_width(T, m, WAVELENGTH) == pytest.approx(expect, rel=1e-12)


class TestDensityModel:
    def test_density_at_105C(self):
        assert ms.rb_number_density(378.15) == pytest.approx(6.64e18, rel=0.01)

    def test_column_density_within_factor_three(self):
        nd = ms.column_density_from_temperature(378.15, CELL, abundance=1.0)
        assert 2.5e17 / 3 < nd < 2.5e17 * 3

    def test_monotone_in_temperature(self):
        assert (ms.column_density_from_temperature(383.0, CELL)
                > ms.column_density_from_temperature(378.0, CELL))

    def test_correlation_window(self):
        with pytest.raises(ValueError):
            ms.rb_number_density(249.0)
        with pytest.raises(ValueError):
            ms.rb_number_density(601.0)


class TestDepthCalibration:
    def test_default_sigma_reproduces_pairs(self):
        for nd, depth in ms.CALIBRATION_PAIRS:
            assert ms.a0La_from_column_density(nd) == pytest.approx(depth, rel=0.03)

    def test_fitted_sigma_reproduces_pairs(self):
        sigma = ms.fit_sigma_eff()
        assert sigma == pytest.approx(1.289e-15, rel=1e-3)
        for nd, depth in ms.CALIBRATION_PAIRS:
            assert ms.a0La_from_column_density(nd, sigma) == pytest.approx(depth, rel=0.03)

    def test_zero_column_density(self):
        assert ms.a0La_from_column_density(0.0) == 0.0

    def test_analytic_sigma_is_about_twice_calibrated(self):
        sigma = ms.sigma_eff_analytic(GAMMA, DOPPLER, WAVELENGTH)
        assert 1.8 < sigma / ms.SIGMA_EFF_DEFAULT < 2.2

    def test_rejects_negative_density(self):
        with pytest.raises(ValueError):
            ms.a0La_from_column_density(-1.0)


class TestCouplingEstimate:
    def test_zero_depth(self):
        assert ms.collective_coupling_estimate(0.0, GAMMA, 0.177) == 0.0

    def test_narrow_line_value(self):
        g = ms.collective_coupling_estimate(10.0, GAMMA, 0.177)
        assert g / (2 * np.pi) == pytest.approx(90e6, rel=5e-3)

    def test_doppler_rescaled_value_is_superstrong(self):
        g = ms.collective_coupling_estimate(70.0, DOPPLER, 0.177)
        assert g / (2 * np.pi) == pytest.approx(1.8e9, rel=0.01)
        assert g / (2 * np.pi) > c / (2 * 0.177)

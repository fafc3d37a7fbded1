"""Bath special functions: spectral density, occupation, trigamma, correlation."""

from __future__ import annotations

import math

import numpy as np
import pytest

import lzbath as lz
from lzbath.bath import correlation, correlation_quadrature, trigamma

# Frozen oracle values.  bose_occupation at beta*omega = 0.01 evaluated with
# 40-digit extended precision; trigamma at 1+0.5i from the brute-force series
# oracle below (cross-checked against 30-digit Hurwitz-zeta evaluation).
BOSE_AT_0p01 = 99.50083333194445
TRIGAMMA_1_HALF_I = 1.0681978909500616 - 0.825041972433791j


def trigamma_series_oracle(z: complex, n_terms: int = 10**6) -> complex:
    """Independent brute force: sum 1/(z+k)^2 with an Euler-Maclaurin tail."""
    k = np.arange(n_terms, dtype=np.float64)
    s = np.sum((1.0 / (z + k) ** 2)[::-1])
    zn = z + n_terms
    return s + 1.0 / zn + 1.0 / (2.0 * zn**2) + 1.0 / (6.0 * zn**3)


class TestBathParams:
    def test_beta_is_exact_inverse(self):
        bp = lz.BathParams(gamma=0.001, omega_c=10.0, temperature=7.3)
        assert abs(bp.beta * bp.temperature - 1.0) <= 2.3e-16

    @pytest.mark.parametrize("kwargs", [
        dict(gamma=-0.1, omega_c=10.0, temperature=1.0),
        dict(gamma=0.1, omega_c=0.0, temperature=1.0),
        dict(gamma=0.1, omega_c=10.0, temperature=0.0),
        dict(gamma=0.1, omega_c=10.0, temperature=-2.0),
    ])
    def test_invalid_parameters_rejected(self, kwargs):
        with pytest.raises(ValueError):
            lz.BathParams(**kwargs)


class TestSpectralDensity:
    def test_zero_frequency(self, bath25):
        assert lz.spectral_density(0.0, bath25) == 0.0

    def test_value_at_cutoff(self, bath25):
        expected = math.pi * 0.001 * 10.0 * math.exp(-1.0)
        assert lz.spectral_density(10.0, bath25) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(0.011557, rel=1e-4)

    def test_peak_at_cutoff(self, bath25):
        w = np.linspace(0.0, 80.0, 8001)
        j = lz.spectral_density(w, bath25)
        assert w[np.argmax(j)] == pytest.approx(10.0, abs=0.02)

    def test_negative_frequency_rejected(self, bath25):
        with pytest.raises(ValueError):
            lz.spectral_density(-1.0, bath25)


class TestBoseOccupation:
    def test_log2_point(self, bath25):
        omega = math.log(2.0) * bath25.temperature
        assert lz.bose_occupation(omega, bath25) == pytest.approx(1.0, rel=1e-12)

    def test_zero_temperature_limit_underflow_safe(self, bath25):
        assert lz.bose_occupation(1e6, bath25) == 0.0

    def test_high_temperature_expansion_point(self, bath25):
        omega = 0.01 * bath25.temperature
        n = lz.bose_occupation(omega, bath25)
        assert n == pytest.approx(BOSE_AT_0p01, rel=1e-12)
        # leading expansion 1/x - 1/2 is only ~1e-5 away
        assert n == pytest.approx(1.0 / 0.01 - 0.5, rel=1e-4)

    def test_nonpositive_rejected(self, bath25):
        with pytest.raises(ValueError):
            lz.bose_occupation(0.0, bath25)


class TestTrigamma:
    def test_basel(self):
        assert trigamma(1.0) == pytest.approx(math.pi**2 / 6.0, rel=1e-13)

    def test_half(self):
        assert trigamma(0.5) == pytest.approx(math.pi**2 / 2.0, rel=1e-13)

    def test_complex_point_against_series_oracle(self):
        z = 1.0 + 0.5j
        assert trigamma(z) == pytest.approx(TRIGAMMA_1_HALF_I, rel=1e-13)
        oracle = trigamma_series_oracle(z)
        assert abs(trigamma(z) - oracle) <= 1e-10

    @pytest.mark.parametrize("z", [0.0, -1.0, -7.0])
    def test_poles_rejected(self, z):
        with pytest.raises(ValueError):
            trigamma(z)

    def test_recurrence_identity_on_complex_grid(self):
        re = np.linspace(0.1, 10.0, 12)
        im = np.linspace(-20.0, 20.0, 11)
        z = (re[:, None] + 1j * im[None, :]).ravel()
        lhs = trigamma(z) - trigamma(z + 1.0)
        rhs = 1.0 / (z * z)
        assert np.abs(lhs - rhs).max() <= 1e-12


class TestCorrelation:
    def test_imaginary_part_temperature_independent(self):
        hot = lz.BathParams(gamma=0.001, omega_c=10.0, temperature=25.0)
        cold = lz.BathParams(gamma=0.001, omega_c=10.0, temperature=0.3)
        s = np.linspace(0.0, 8.0, 41)
        assert np.abs(correlation(s, hot).imag - correlation(s, cold).imag).max() <= 1e-12

    @pytest.mark.parametrize("temperature", [1.0, 25.0])
    @pytest.mark.parametrize("s_wc", [0.1, 1.0, 5.0, 20.0])
    def test_closed_form_matches_spectral_quadrature(self, temperature, s_wc):
        bp = lz.BathParams(gamma=0.001, omega_c=10.0, temperature=temperature)
        s = s_wc / bp.omega_c
        exact = correlation(s, bp)
        quad = correlation_quadrature(s, bp)
        assert abs(exact - quad) <= 1e-6 * abs(quad)

    def test_conjugate_symmetry_via_quadrature(self, bath25):
        for s in (0.05, 0.4, 1.3):
            plus = correlation_quadrature(s, bath25)
            minus = correlation_quadrature(-s, bath25)
            assert minus == pytest.approx(plus.conjugate(), rel=1e-10)

    def test_long_lag_decay_cold_bath(self):
        bp = lz.BathParams(gamma=0.001, omega_c=10.0, temperature=1e-3)
        s = np.geomspace(1.1, 20.0, 24)  # s*omega_c from 11 to 200
        mags = np.abs(correlation(s, bp))
        assert np.all(np.diff(mags) < 0.0)
        # 1/s^2 envelope: |C| * s^2 roughly constant
        ratio = mags * (s * bp.omega_c) ** 2 / (bp.gamma * bp.omega_c**2)
        assert np.all((ratio > 0.5) & (ratio < 2.0))

    def test_classical_limit_linear_in_temperature(self):
        temps = np.linspace(50.0, 200.0, 7)
        c0 = np.array([
            correlation(0.0, lz.BathParams(gamma=0.001, omega_c=10.0, temperature=t)).real
            for t in temps
        ])
        slopes = np.diff(c0) / np.diff(temps)
        assert np.abs(slopes / slopes.mean() - 1.0).max() <= 0.05

    def test_negative_lag_rejected(self, bath25):
        with pytest.raises(ValueError):
            correlation(-0.1, bath25)

"""Oscillation spectra: closed forms vs quadrature, ratio inversions."""

import numpy as np
import pytest

from cuq.analytic import cuq_clock, cuq_projections
from cuq.fourier import (SeriesKind, anharmonicity, closed_form_cn,
                         closed_form_d0, closed_form_spectrum,
                         correct_effective_r, quadrature_spectrum,
                         r_from_anharmonicity)

R_GRID = (0.1, 0.3, 0.5, 0.7, 0.85, 0.95, 0.99)


class TestClosedForms:
    def test_frozen_values(self):
        # [DERIVED] c_n = 2 sqrt(1-r^2)/r q^n, q = (1-sqrt(1-r^2))/r, r=0.85
        assert closed_form_cn(1, 0.85) == pytest.approx(0.690055882747784,
                                                        rel=1e-13)
        assert closed_form_cn(2, 0.85) == pytest.approx(0.3841722237768164,
                                                        rel=1e-13)
        assert closed_form_d0(0.85) == pytest.approx(-0.5567262498321918,
                                                     rel=1e-13)

    def test_small_r_finite(self):
        # the sqrt(1-r^2)/r prefactor and q^n must not underflow/overflow
        for n in (1, 2, 5):
            v = closed_form_cn(n, 1e-8)
            assert np.isfinite(v)
        assert closed_form_cn(1, 1e-8) == pytest.approx(1.0, abs=1e-7)

    def test_geometric_decay(self):
        r = 0.7
        q = (1 - np.sqrt(1 - r * r)) / r
        cs = [closed_form_cn(n, r) for n in range(1, 8)]
        ratios = np.diff(np.log(cs))
        assert np.allclose(np.exp(ratios), q, rtol=1e-12)

    def test_spectrum_container(self):
        spec = closed_form_spectrum(0.85, 4)
        assert spec.kind is SeriesKind.EVEN
        assert spec.order == 4
        assert spec.d0 == pytest.approx(-0.5567262498321918)
        assert spec.coefficient(3) == pytest.approx(closed_form_cn(3, 0.85))


class TestQuadrature:
    @pytest.mark.parametrize("r", R_GRID)
    def test_matches_closed_forms(self, r):
        # [DERIVED] oracle: adaptive quadrature of the analytic projections
        P = cuq_clock(r).P_hat
        odd = quadrature_spectrum(lambda t: cuq_projections(t, r)[0], P, 10,
                                  SeriesKind.ODD)
        even = quadrature_spectrum(lambda t: cuq_projections(t, r)[1], P, 10,
                                   SeriesKind.EVEN)
        for n in range(1, 11):
            ref = closed_form_cn(n, r)
            assert odd.coefficient(n) == pytest.approx(ref, abs=1e-8)
            assert even.coefficient(n) == pytest.approx(ref, abs=1e-8)
        assert even.d0 == pytest.approx(closed_form_d0(r), abs=1e-8)

    def test_rejects_aperiodic_signal(self):
        with pytest.raises(ValueError):
            quadrature_spectrum(lambda t: t, 2.0, 3, SeriesKind.EVEN)

    def test_rejects_excessive_order(self):
        with pytest.raises(ValueError):
            quadrature_spectrum(np.cos, 2 * np.pi, 65, SeriesKind.EVEN)


class TestAnharmonicity:
    def test_frozen_d0_ratio(self):
        # D_0 = d_1/d_0 = -2 sqrt(1-r^2)/r exactly
        spec = closed_form_spectrum(0.85, 3)
        est = anharmonicity(spec, 0)
        assert est.ratio == pytest.approx(-1.2394886768062048, rel=1e-13)

    @pytest.mark.parametrize("r", R_GRID)
    def test_roundtrip_higher_ratios(self, r):
        # C_n = c_{n+1}/c_n = q inverts through r = 2 rho/(rho^2+1)
        spec = closed_form_spectrum(r, 5)
        for n in (1, 2, 3):
            est = anharmonicity(spec, n)
            r_hat, r_err = r_from_anharmonicity(est)
            assert r_hat == pytest.approx(r, abs=1e-12)
            assert r_err == 0.0

    @pytest.mark.parametrize("r", R_GRID)
    def test_roundtrip_d0(self, r):
        est = anharmonicity(closed_form_spectrum(r, 2), 0)
        r_hat, _ = r_from_anharmonicity(est)
        assert r_hat == pytest.approx(r, abs=1e-12)

    def test_error_propagation(self):
        # delta-method: d r / d rho at rho = q through 2 rho/(rho^2+1)
        r = 0.85
        q = (1 - np.sqrt(1 - r * r)) / r
        spec = closed_form_spectrum(r, 3)
        num, den = spec.coefficient(2), spec.coefficient(1)
        err = 0.01
        noisy = type(spec)(d0=spec.d0, coeffs=spec.coeffs, kind=spec.kind,
                           d0_err=0.0,
                           coeff_errs=np.array([err, err, err]))
        est = anharmonicity(noisy, 1)
        expect_ratio_err = np.hypot(err / den, num * err / den ** 2)
        assert est.ratio_err == pytest.approx(expect_ratio_err, rel=1e-12)
        _, r_err = r_from_anharmonicity(est)
        drdq = 2 * (1 - q * q) / (q * q + 1) ** 2
        assert r_err == pytest.approx(abs(drdq) * expect_ratio_err, rel=1e-12)

    def test_unreliable_when_denominator_drowns(self):
        spec = closed_form_spectrum(0.85, 3)
        noisy = type(spec)(d0=spec.d0, coeffs=spec.coeffs, kind=spec.kind,
                           d0_err=0.0,
                           coeff_errs=np.array([10.0, 0.1, 0.1]))
        assert not anharmonicity(noisy, 1).reliable


class TestEffectiveR:
    def test_pure_amplitude_is_identity(self):
        assert correct_effective_r(0.6, 1.0) == pytest.approx(0.6, rel=1e-14)

    def test_mixed_start_square_law(self):
        # from the fully mixed state the measured ratio is r^2 and the
        # projection amplitude is r/sqrt(1+r^2)
        r = 0.85
        R = r / np.sqrt(1 + r * r)
        assert correct_effective_r(r * r, R) == pytest.approx(r, rel=1e-12)

    def test_formula(self):
        r_t, R = 0.3, 0.6
        expect = r_t / np.sqrt(R * R + r_t * r_t * (1 - R * R))
        assert correct_effective_r(r_t, R) == pytest.approx(expect, rel=1e-14)

    def test_rejects_bad_amplitude(self):
        with pytest.raises(ValueError):
            correct_effective_r(0.5, 0.0)

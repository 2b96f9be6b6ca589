import math

import numpy as np
import pytest
import scipy.integrate

from oracles import residual_pn_closed_form

from gearphy.errors import InvalidParameterError
from gearphy.oscillator import (
    LOParams,
    TrackingContext,
    effective_snr,
    k2_from_sigma,
    lo_power,
    phase_noise_psd,
    residual_pn_variance,
    vco_power,
)

LO = LOParams()


class TestWienerLevel:
    def test_inversion_identity(self):
        assert k2_from_sigma(math.pi, 1.0) == pytest.approx(1.0, rel=1e-12)

    def test_zero_maps_to_zero(self):
        assert k2_from_sigma(0.0, 1e6) == 0.0

    def test_quadrature_round_trip(self):
        # integrating the Lorentzian over all offsets recovers the total
        # power; substitute u = f / f_pll so the peak has unit width
        sigma_sq = 0.37
        k2 = k2_from_sigma(sigma_sq, LO.f_pll)
        val, _ = scipy.integrate.quad(
            lambda u: k2 / (LO.f_pll * (1.0 + u ** 2)), -np.inf, np.inf
        )
        assert val == pytest.approx(sigma_sq, rel=1e-6)


class TestPsd:
    def test_floor_at_large_offset(self):
        assert phase_noise_psd(1e15, 0.1, LO) == pytest.approx(2 * LO.k_0, rel=1e-3)

    def test_dc_value(self):
        expected = 2 * 0.1 / (math.pi * LO.f_pll) + 2 * LO.k_0
        assert phase_noise_psd(0.0, 0.1, LO) == pytest.approx(expected, rel=1e-12)

    def test_half_power_at_loop_bandwidth(self):
        lorentzian_dc = phase_noise_psd(0.0, 0.1, LO) - 2 * LO.k_0
        at_fpll = phase_noise_psd(LO.f_pll, 0.1, LO) - 2 * LO.k_0
        assert at_fpll == pytest.approx(lorentzian_dc / 2, rel=1e-12)

    def test_lorentzian_integrates_to_two_sigma_sq(self):
        # the two-oscillator Lorentzian carries twice the single-LO power
        sigma_sq = 0.21
        quiet = LOParams(k_0=1e-300)
        val, _ = scipy.integrate.quad(
            lambda u: phase_noise_psd(abs(u) * quiet.f_pll, sigma_sq, quiet) * quiet.f_pll,
            -np.inf,
            np.inf,
        )
        assert val == pytest.approx(2 * sigma_sq, rel=1e-6)


class TestVcoPower:
    def test_hand_evaluated_reference(self):
        from scipy.constants import k as kb

        expected = (
            kb * 300.0 * 2.0 / (math.pi ** 2 * 100.0 * (54e6) ** 2)
            * 2e-16
            * (2 * math.pi * 28e9 / 0.01) ** 4
        )
        assert vco_power(0.01, 28e9, LO) == pytest.approx(expected, rel=1e-9)

    def test_fourth_power_in_sigma(self):
        assert vco_power(0.005, 28e9, LO) == pytest.approx(
            16 * vco_power(0.01, 28e9, LO), rel=1e-12
        )

    def test_fourth_power_in_carrier(self):
        assert vco_power(0.01, 56e9, LO) == pytest.approx(
            16 * vco_power(0.01, 28e9, LO), rel=1e-12
        )

    def test_power_law_is_exact(self):
        values = [vco_power(s, 28e9, LO) * s ** 4 for s in (0.003, 0.03, 0.3)]
        assert values[0] == pytest.approx(values[1], rel=1e-12)
        assert values[1] == pytest.approx(values[2], rel=1e-12)

    def test_zero_sigma_is_infeasible(self):
        with pytest.raises(InvalidParameterError):
            vco_power(0.0, 28e9, LO)


class TestLoPower:
    def test_reference_floor(self):
        assert lo_power(10.0, 2.4e9, LO) == pytest.approx(198e-6, rel=1e-3)

    def test_additivity(self):
        total = lo_power(0.02, 28e9, LO)
        assert total - vco_power(0.02, 28e9, LO) == pytest.approx(LO.p_ref, rel=1e-12)

    def test_divergence_toward_zero_sigma(self):
        assert lo_power(0.001, 28e9, LO) > lo_power(0.01, 28e9, LO) > lo_power(0.1, 28e9, LO)


class TestEffectiveSnr:
    def test_infinite_resolution_recovers_input(self):
        assert effective_snr(5.0, 400.0) == pytest.approx(5.0, rel=1e-12)

    def test_one_bit_high_snr_limit(self):
        # quantization alone caps the SNR at 2^b / kappa
        assert effective_snr(1e12, 1.0, kappa=2.0) == pytest.approx(1.0, rel=1e-6)

    def test_always_degrades(self):
        for xi in (0.1, 1.0, 10.0, 1e4):
            for bits in (1.0, 2.0, 5.0, 10.0):
                assert effective_snr(xi, bits) < xi


class TestResidualVariance:
    def test_zero_noise_gives_zero(self):
        quiet = LOParams(k_0=0.0)
        ctx = TrackingContext(0.0, 1e8, 10.0, 100.0, quiet)
        assert residual_pn_variance(ctx) == 0.0

    def test_perfect_tracking_leaves_untracked_band(self):
        ctx = TrackingContext(0.05, 4e8, 10.0, 1e30, LO)
        remainder = residual_pn_variance(ctx)
        expected, _ = scipy.integrate.quad(
            lambda f: phase_noise_psd(f, 0.05, LO), 4e8 / 20, 4e8 / 2, points=[LO.f_pll]
        )
        assert remainder == pytest.approx(2 * expected, rel=1e-6)

    def test_untracked_lorentzian_mass(self):
        # wideband untracked capture approaches twice the Wiener power
        quiet = LOParams(k_0=0.0)
        ctx = TrackingContext(0.2, 1e12, None, 1.0, quiet)
        assert residual_pn_variance(ctx) == pytest.approx(2 * 0.2, rel=1e-3)

    def test_unit_pilot_spacing_tracks_whole_band(self):
        ctx = TrackingContext(0.05, 4e8, 1.0, 50.0, LO)
        direct, _ = scipy.integrate.quad(
            lambda f: phase_noise_psd(f, 0.05, LO)
            / (50.0 * 4e8 * phase_noise_psd(f, 0.05, LO) + 1.0),
            0.0,
            2e8,
            points=[LO.f_pll],
        )
        assert residual_pn_variance(ctx) == pytest.approx(2 * direct, rel=1e-6)

    @pytest.mark.parametrize("pilot", [None, 5.0, 100.0, 1e4])
    def test_closed_form_oracle(self, pilot):
        ctx = TrackingContext(0.08, 4e8, pilot, 37.0, LO)
        expected = residual_pn_closed_form(0.08, 4e8, pilot, 37.0, LO.f_pll, LO.k_0)
        assert residual_pn_variance(ctx) == pytest.approx(expected, rel=1e-7)

    def test_monotone_in_tracking_quality(self):
        base = residual_pn_variance(TrackingContext(0.05, 4e8, 10.0, 10.0, LO))
        better_snr = residual_pn_variance(TrackingContext(0.05, 4e8, 10.0, 100.0, LO))
        denser_pilots = residual_pn_variance(TrackingContext(0.05, 4e8, 5.0, 10.0, LO))
        more_noise = residual_pn_variance(TrackingContext(0.10, 4e8, 10.0, 10.0, LO))
        assert better_snr <= base
        assert denser_pilots <= base
        assert more_noise >= base

    def test_untracked_exceeds_tracked(self):
        tracked = residual_pn_variance(TrackingContext(0.05, 4e8, 10.0, 100.0, LO))
        untracked = residual_pn_variance(TrackingContext(0.05, 4e8, None, 100.0, LO))
        assert untracked >= tracked

import math

import numpy as np
import pytest

from gearphy.errors import InvalidParameterError
from gearphy.modem.sources import (
    ir_entropy_per_symbol,
    ir_symbols,
    rll_entropy_rate,
    rll_growth_rate,
    sample_rll_signs,
    zxm_entropy_per_symbol,
    zxm_symbols,
)


class TestRllCapacity:
    def test_known_growth_rates(self):
        assert rll_growth_rate(0) == pytest.approx(2.0, rel=1e-12)
        assert rll_growth_rate(1) == pytest.approx((1 + math.sqrt(5)) / 2, rel=1e-12)
        assert rll_growth_rate(2) == pytest.approx(1.465571231876768, rel=1e-9)

    def test_entropy_rates(self):
        assert rll_entropy_rate(0) == pytest.approx(1.0, rel=1e-12)
        assert rll_entropy_rate(1) == pytest.approx(0.6942419136306174, rel=1e-9)

    def test_zxm_entropy_counts_both_axes(self):
        assert zxm_entropy_per_symbol(1) == pytest.approx(2.0, rel=1e-12)
        assert zxm_entropy_per_symbol(2) == pytest.approx(2 * 0.6942419136306174, rel=1e-9)


class TestRllSampling:
    @pytest.mark.parametrize("d", [0, 1, 2])
    def test_run_length_constraint_holds(self, d):
        rng = np.random.default_rng(42)
        signs = sample_rll_signs(50_000, d, rng)
        flips = np.flatnonzero(np.diff(signs.astype(int)) != 0)
        runs = np.diff(flips)
        if len(runs):
            assert runs.min() >= d + 1

    @pytest.mark.parametrize("d", [0, 1, 2])
    def test_run_length_law_is_maxentropic(self, d):
        # the capacity-achieving source has P(run = l) = lambda^-l, l >= d+1
        rng = np.random.default_rng(1)
        signs = sample_rll_signs(400_000, d, rng)
        flips = np.flatnonzero(np.diff(signs.astype(int)) != 0)
        runs = np.diff(flips).astype(float)
        lam = rll_growth_rate(d)
        assert np.mean(runs) == pytest.approx(d + 1 + 1 / (lam - 1), rel=0.02)
        for length in range(d + 1, d + 4):
            freq = np.mean(runs == length)
            assert freq == pytest.approx(lam ** -length, abs=0.01)

    def test_unit_average_energy(self):
        rng = np.random.default_rng(3)
        u, si, sq = zxm_symbols(100_000, 2, rng)
        assert np.mean(np.abs(u) ** 2) == pytest.approx(1.0, rel=1e-12)
        assert set(np.unique(si)) <= {-1, 1}


class TestIrSource:
    def test_unit_average_energy(self):
        rng = np.random.default_rng(5)
        for variant in ("unipolar", "variable-sign"):
            u = ir_symbols(300_000, 0.3, variant, rng)
            assert np.mean(u ** 2) == pytest.approx(1.0, rel=0.02)

    def test_unipolar_is_nonnegative(self):
        rng = np.random.default_rng(6)
        assert (ir_symbols(10_000, 0.2, "unipolar", rng) >= 0).all()

    def test_variable_sign_is_balanced(self):
        rng = np.random.default_rng(7)
        u = ir_symbols(300_000, 0.4, "variable-sign", rng)
        on = u[u != 0]
        assert abs(np.mean(on > 0) - 0.5) < 0.01

    def test_entropy_values(self):
        assert ir_entropy_per_symbol(0.5, "unipolar") == pytest.approx(1.0, rel=1e-12)
        assert ir_entropy_per_symbol(0.5, "variable-sign") == pytest.approx(1.5, rel=1e-12)
        h_03 = ir_entropy_per_symbol(0.3, "unipolar")
        assert h_03 == pytest.approx(
            -(0.3 * math.log2(0.3) + 0.7 * math.log2(0.7)), rel=1e-12
        )

    def test_on_probability_validated(self):
        rng = np.random.default_rng(8)
        with pytest.raises(InvalidParameterError):
            ir_symbols(100, 0.7, "unipolar", rng)

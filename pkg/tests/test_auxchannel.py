import math

import numpy as np
import pytest

from gearphy.gears import Family, Gear
from gearphy.modem.auxchannel import (
    auxchannel_mi_lb,
    build_ir_trellis,
    build_zxm_axis_trellis,
    pn_cov_entry,
    pn_covariance,
)
from gearphy.modem.qam import qam_mi_hard


class TestPnCovariance:
    def test_vanishes_exactly_without_phase_noise(self):
        for kind in ("rotation", "real-projection"):
            assert pn_cov_entry(kind, 0.0, True) == 0.0
            assert pn_cov_entry(kind, 0.0, False) == 0.0

    def test_rotation_diag_matches_phasor_deviation(self):
        # E|e^{j theta} - 1|^2 = 2 - 2 exp(-s/2) for theta ~ N(0, s)
        s = 0.05
        rng = np.random.default_rng(0)
        theta = rng.normal(0, math.sqrt(s), 2_000_000)
        emp = np.mean(np.abs(np.exp(1j * theta) - 1.0) ** 2)
        assert pn_cov_entry("rotation", s, True) == pytest.approx(emp, rel=5e-3)

    def test_real_projection_diag_matches_cosine_deviation(self):
        # a real symbol observed through Re{.} shrinks by cos(theta), so the
        # deviation power is E[(cos(theta) - 1)^2]
        s = 0.05
        rng = np.random.default_rng(1)
        theta = rng.normal(0, math.sqrt(s), 2_000_000)
        emp = np.mean((np.cos(theta) - 1.0) ** 2)
        assert pn_cov_entry("real-projection", s, True) == pytest.approx(emp, rel=5e-3)

    def test_full_matrix_structure(self):
        phi = np.array([1.0, 0.4, 0.1])
        mat = pn_covariance(phi, "rotation", 0.02)
        assert mat.shape == (3, 3)
        assert mat[0, 0] == pytest.approx(pn_cov_entry("rotation", 0.02, True), rel=1e-12)
        assert mat[0, 1] == pytest.approx(0.4 * pn_cov_entry("rotation", 0.02, False), rel=1e-12)
        assert np.allclose(mat, mat.T)
        assert np.allclose(pn_covariance(phi, "rotation", 0.0), 0.0)


class TestTrellis:
    def test_zxm1_is_iid_binary(self):
        tr = build_zxm_axis_trellis(1, 3)
        assert tr.n_states == 8
        assert len(tr.edge_from) == 16
        assert np.allclose(np.exp(tr.edge_logp), 0.5)

    def test_zxm2_respects_run_length(self):
        tr = build_zxm_axis_trellis(2, 5)
        # no valid window may contain an interior run shorter than 2
        for win in tr.edge_windows:
            flips = [i for i in range(1, len(win)) if win[i] != win[i - 1]]
            for a, b in zip(flips[:-1], flips[1:]):
                assert b - a >= 2

    def test_stationary_distribution_is_normalized(self):
        for m in (1, 2, 3):
            tr = build_zxm_axis_trellis(m, 2 * m + 1)
            assert np.exp(tr.log_alpha0).sum() == pytest.approx(1.0, rel=1e-9)

    def test_ir_trellis_sizes(self):
        assert build_ir_trellis("unipolar", 0.3, 3).n_states == 8
        assert build_ir_trellis("variable-sign", 0.3, 3).n_states == 27


class TestBoundProperties:
    def test_never_exceeds_source_entropy(self):
        for gear, kwargs in [
            (Gear(Family.ZXM, ftn_factor=2), {}),
            (Gear(Family.IR, ir_variant="unipolar"), {"p_on": 0.3}),
            (Gear(Family.IR, ir_variant="variable-sign"), {"p_on": 0.3}),
        ]:
            res = auxchannel_mi_lb(gear, 100.0, 0.0, n=20_000, seed=3, **kwargs)
            assert res.mi_per_symbol <= res.source_entropy + 0.01

    def test_clamped_at_zero(self):
        gear = Gear(Family.ZXM, ftn_factor=2)
        res = auxchannel_mi_lb(gear, 1e-4, 0.3, n=10_000, seed=4)
        assert res.mi_per_symbol >= 0.0

    def test_seeded_reproducibility(self):
        gear = Gear(Family.ZXM, ftn_factor=2)
        a = auxchannel_mi_lb(gear, 10.0, 0.01, n=15_000, seed=5)
        b = auxchannel_mi_lb(gear, 10.0, 0.01, n=15_000, seed=5)
        assert a.mi_per_symbol == b.mi_per_symbol

    def test_more_memory_never_hurts_much(self):
        gear = Gear(Family.ZXM, ftn_factor=2)
        short = auxchannel_mi_lb(gear, 12.0, 0.0, n=60_000, memory=3, seed=6)
        long = auxchannel_mi_lb(gear, 12.0, 0.0, n=60_000, memory=5, seed=6)
        assert long.mi_per_symbol >= short.mi_per_symbol - 0.03

    def test_increases_with_snr(self):
        gear = Gear(Family.ZXM, ftn_factor=2)
        vals = [
            auxchannel_mi_lb(gear, 10 ** (s / 10), 0.0, n=40_000, seed=7).mi_per_symbol
            for s in (0.0, 10.0, 20.0)
        ]
        assert vals[0] < vals[1] < vals[2]


class TestZxmQamEquivalence:
    @pytest.mark.parametrize("snr_db", [0.0, 10.0, 20.0])
    def test_zxm1_matches_hard_4qam(self, snr_db):
        xi = 10 ** (snr_db / 10)
        gear = Gear(Family.ZXM, ftn_factor=1)
        seq = auxchannel_mi_lb(gear, xi, 0.0, n=100_000, seed=8)
        analytic = qam_mi_hard(4, xi, 0.0)
        assert abs(seq.mi_per_symbol - analytic) <= 0.03


class TestUnipolarRobustness:
    def test_mi_invariant_to_phase_noise(self):
        gear = Gear(Family.IR, ir_variant="unipolar")
        clean = auxchannel_mi_lb(gear, 8.0, 0.0, n=30_000, seed=9, p_on=0.3)
        noisy = auxchannel_mi_lb(gear, 8.0, 0.25, n=30_000, seed=9, p_on=0.3)
        assert clean.mi_per_symbol == noisy.mi_per_symbol

    def test_variable_sign_degrades_with_phase_noise(self):
        gear = Gear(Family.IR, ir_variant="variable-sign")
        clean = auxchannel_mi_lb(gear, 50.0, 0.0, n=60_000, seed=10, p_on=0.3)
        noisy = auxchannel_mi_lb(gear, 50.0, 0.3, n=60_000, seed=10, p_on=0.3)
        assert noisy.mi_per_symbol < clean.mi_per_symbol

import numpy as np
import pytest

from gearphy.errors import InfeasibleRateError
from gearphy.gears import Family, Gear
from gearphy.modem.securve import (
    SECurve,
    SimParams,
    _isotonic_increasing,
    build_se_curve,
    curve_cache_key,
)

SMALL_SIM = SimParams(n_symbols=15_000, n_phase_draws=30, b99_symbols=40_000, seed=5)


def make_synthetic_curve() -> SECurve:
    snr = np.array([-10.0, 0.0, 10.0, 20.0, 30.0])
    sigma = np.array([0.0, 0.01, 0.1])
    values = np.array(
        [
            [0.10, 0.08, 0.05],
            [0.80, 0.70, 0.50],
            [2.00, 1.80, 1.20],
            [3.20, 2.90, 1.90],
            [3.90, 3.40, 2.10],
        ]
    )
    return SECurve("qam16", snr, sigma, values, b99_tnyq=1.268)


class TestIsotonic:
    def test_sorted_input_unchanged(self):
        y = np.array([0.0, 1.0, 2.0, 3.0])
        assert np.allclose(_isotonic_increasing(y), y)

    def test_violations_are_pooled(self):
        y = np.array([1.0, 3.0, 2.0, 4.0])
        fit = _isotonic_increasing(y)
        assert np.all(np.diff(fit) >= -1e-12)
        assert fit[1] == pytest.approx(2.5)
        assert fit[2] == pytest.approx(2.5)

    def test_preserves_mean(self):
        rng = np.random.default_rng(2)
        y = rng.normal(size=50).cumsum() + rng.normal(scale=0.2, size=50)
        fit = _isotonic_increasing(y)
        assert np.mean(fit) == pytest.approx(np.mean(y), rel=1e-9)
        assert np.all(np.diff(fit) >= -1e-12)


class TestLookupInvert:
    def test_round_trip_through_lookup(self):
        curve = make_synthetic_curve()
        for snr_db in (-5.0, 3.0, 12.0, 25.0):
            xi = 10 ** (snr_db / 10)
            se = curve.lookup(xi, 0.01)
            back = curve.invert(se, 0.01)
            assert 10 * np.log10(back) == pytest.approx(snr_db, abs=0.1)

    def test_invert_exact_on_grid_nodes(self):
        curve = make_synthetic_curve()
        assert curve.invert(2.0, 0.0) == pytest.approx(10.0, rel=1e-9)

    def test_above_plateau_is_infeasible(self):
        curve = make_synthetic_curve()
        with pytest.raises(InfeasibleRateError):
            curve.invert(4.5, 0.0)
        with pytest.raises(InfeasibleRateError):
            curve.invert(3.0, 0.1)  # plateau at sigma=0.1 is 2.1

    def test_below_grid_returns_floor(self):
        curve = make_synthetic_curve()
        assert curve.invert(0.01, 0.0) == pytest.approx(0.1, rel=1e-9)

    def test_phase_noise_ordering(self):
        curve = make_synthetic_curve()
        for snr_db in (-5.0, 5.0, 15.0, 25.0):
            xi = 10 ** (snr_db / 10)
            assert curve.lookup(xi, 0.1) <= curve.lookup(xi, 0.0)

    def test_sigma_interpolation_between_columns(self):
        curve = make_synthetic_curve()
        mid = curve.lookup(10.0, 0.005)
        assert curve.lookup(10.0, 0.01) <= mid <= curve.lookup(10.0, 0.0)


class TestBuildCurve:
    def test_qam_curve_shape_and_monotonicity(self):
        gear = Gear(Family.QAM, qam_order=16)
        curve = build_se_curve(gear, [-5, 5, 15, 25], [0.0, 0.02], SMALL_SIM)
        assert curve.values.shape == (4, 2)
        assert np.all(np.diff(curve.values, axis=0) >= -1e-12)  # SNR axis
        assert np.all(np.diff(curve.values, axis=1) <= 1e-12)   # phase-noise axis
        assert curve.values.max() <= 4.0 / curve.b99_tnyq + 1e-9

    def test_unipolar_curve_is_flat_in_phase_noise(self):
        gear = Gear(Family.IR, ir_variant="unipolar")
        curve = build_se_curve(gear, [0, 10], [0.0, 0.05, 0.2], SMALL_SIM)
        assert np.allclose(curve.values[:, 0], curve.values[:, 1])
        assert np.allclose(curve.values[:, 0], curve.values[:, 2])

    def test_zxm_plateau_bounded_by_source_entropy(self):
        gear = Gear(Family.ZXM, ftn_factor=2)
        curve = build_se_curve(gear, [0, 10, 20], [0.0], SMALL_SIM)
        limit = 2 * 0.6942419 * 2 / curve.b99_tnyq
        assert curve.plateau(0.0) <= limit + 1e-6

    def test_deterministic_rebuild(self):
        gear = Gear(Family.QAM, qam_order=16)
        a = build_se_curve(gear, [0, 10], [0.0, 0.01], SMALL_SIM)
        b = build_se_curve(gear, [0, 10], [0.0, 0.01], SMALL_SIM)
        assert np.array_equal(a.values, b.values)


class TestPersistence:
    def test_save_load_round_trip(self, tmp_path):
        curve = make_synthetic_curve()
        path = tmp_path / "curve.npz"
        curve.save(path)
        loaded = SECurve.load(path)
        assert loaded.gear_key == curve.gear_key
        assert np.array_equal(loaded.values, curve.values)
        assert loaded.b99_tnyq == curve.b99_tnyq

    def test_cache_key_tracks_inputs(self):
        gear = Gear(Family.QAM, qam_order=16)
        k1 = curve_cache_key(gear, [0, 10], [0.0], SMALL_SIM)
        k2 = curve_cache_key(gear, [0, 10, 20], [0.0], SMALL_SIM)
        k3 = curve_cache_key(gear, [0, 10], [0.0], SimParams(seed=99))
        assert k1 != k2 and k1 != k3

import math

import pytest

from gearphy.errors import InvalidConfigurationError, InvalidParameterError
from gearphy.gears import Family, FrontEnd, Gear, default_gear_set, parse_gear


def test_default_set_has_nine_gears():
    gears = default_gear_set()
    assert len(gears) == 9
    assert len({g.key for g in gears}) == 9


def test_key_round_trip():
    for gear in default_gear_set():
        assert parse_gear(gear.key) == gear


def test_exactly_one_family_parameter():
    with pytest.raises(InvalidConfigurationError):
        Gear(Family.QAM, qam_order=16, ftn_factor=2)
    with pytest.raises(InvalidParameterError):
        Gear(Family.QAM, qam_order=32)
    with pytest.raises(InvalidParameterError):
        Gear(Family.ZXM, ftn_factor=4)
    with pytest.raises(InvalidParameterError):
        Gear(Family.IR, ir_variant="bipolar")


def test_qam_resolutions_follow_order():
    assert Gear(Family.QAM, qam_order=16).dac_bits == 2.0
    assert Gear(Family.QAM, qam_order=1024).adc_bits == 5.0


def test_zxm_is_one_bit_oversampled():
    g = Gear(Family.ZXM, ftn_factor=3)
    assert g.dac_bits == 1.0 and g.adc_bits == 1.0
    assert g.m_tx == g.m_rx == 3


def test_ir_converter_resolutions():
    uni = Gear(Family.IR, ir_variant="unipolar")
    var = Gear(Family.IR, ir_variant="variable-sign")
    assert uni.adc_bits == 1.0
    assert var.adc_bits == pytest.approx(math.log2(3.0), rel=1e-12)
    assert uni.n_dac == var.n_dac == 1


def test_phase_noise_roles():
    assert not Gear(Family.IR, ir_variant="unipolar").phase_noise_sensitive
    assert Gear(Family.IR, ir_variant="variable-sign").phase_noise_sensitive
    assert not Gear(Family.IR, ir_variant="variable-sign").phase_noise_tracked
    assert Gear(Family.ZXM, ftn_factor=1).phase_noise_tracked


def test_pulse_assignment():
    assert Gear(Family.QAM, qam_order=64).pulse.kind == "rrc"
    assert Gear(Family.QAM, qam_order=64).pulse.alpha == 0.5
    ir = Gear(Family.IR, ir_variant="unipolar").pulse
    assert ir.kind == "rc" and ir.alpha == 0.25


def test_front_end_validation():
    FrontEnd(sigma_j=0.01, b_max=1e9)
    with pytest.raises(InvalidParameterError):
        FrontEnd(sigma_j=0.0, b_max=1e9)
    with pytest.raises(InvalidParameterError):
        FrontEnd(sigma_j=0.1, b_max=0.0)

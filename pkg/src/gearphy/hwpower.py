"""Closed-form power models for the active analog front-end components.

Every model is a published lower bound or measurement fit adopted here as
an equality; passive components (filters, switches) are treated as ideal
and contribute nothing.  All functions are pure and operate on immutable
parameter records, so they are safe to evaluate from parallel workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.constants import k as BOLTZMANN

from .errors import (
    InvalidConfigurationError,
    InvalidParameterError,
    UnsupportedCarrierError,
)
from .gears import Family, Gear

#: Measured mixer power consumption per carrier; strict lookup, no
#: interpolation (surveys show no consistent scaling trend).
MIXER_TABLE_W: dict[float, float] = {
    2.4e9: 1.57e-3,
    8.0e9: 6.9e-3,
    28.0e9: 8.4e-3,
    60.0e9: 17.0e-3,
}

PAE_FIT_COEFF = 0.732          # max power-added efficiency at 1 GHz
PA_MODEL_COEFF = 4.32e-5       # W per (W * sqrt(Hz) * PAPR), = 1/(0.732*sqrt(1e9))
ADC_FOM_FLOOR = 0.67e-15       # J per conversion step
ADC_KNEE_HZ = 560e6            # corner where converter energy starts rising

# Final peak-to-average power ratios (linear) for the constant-PAPR schemes.
PAPR_ZXM_DB = 3.63 + 3.0
PAPR_IR_UNIPOLAR_DB = 6.48
PAPR_IR_VARSIGN_DB = 7.72
QAM_FILTER_PMEPR_OFFSET_DB = 3.17   # RRC roll-off 0.5 filtering overshoot
PMEPR_TO_PAPR_DB = 3.0              # complex baseband -> passband conversion


@dataclass(frozen=True)
class ComponentParams:
    """Technology parameters shared by the converter/amplifier models."""

    v_dd: float = 1.0           # DAC supply voltage [V]
    i_0: float = 10e-6          # DAC unit current source [A]
    c_p: float = 1e-12          # DAC parasitic capacitance [F]
    fom_lna: float = 1e-7       # bandwidth-referred LNA figure of merit
    g_lna: float = 10 ** 1.5    # LNA gain, linear (15 dB)
    n_lna: float = 10 ** 0.5    # LNA noise figure, linear (5 dB)
    p_pd: float = 2.4e-3        # power detector consumption [W]
    gamma: float = 300.0        # operating temperature [K]

    def __post_init__(self):
        for name in ("v_dd", "i_0", "c_p", "fom_lna", "g_lna", "p_pd", "gamma"):
            if getattr(self, name) <= 0.0:
                raise InvalidParameterError(f"{name} must be strictly positive")
        if self.n_lna <= 1.0:
            raise InvalidParameterError("LNA noise figure must exceed 1 (linear)")

    @property
    def noise_psd(self) -> float:
        """Thermal noise PSD k*Gamma [W/Hz]."""
        return BOLTZMANN * self.gamma


@dataclass(frozen=True)
class ComponentEntry:
    """One component class within a breakdown: count * per-unit power."""

    count: int
    each_w: float

    @property
    def total_w(self) -> float:
        return self.count * self.each_w


@dataclass(frozen=True)
class PowerBreakdown:
    """Per-component powers for one side (tx or rx) of the link."""

    side: str
    parts: dict[str, ComponentEntry] = field(default_factory=dict)

    @property
    def total_w(self) -> float:
        return sum(e.total_w for e in self.parts.values())

    def component_w(self, name: str) -> float:
        entry = self.parts.get(name)
        return entry.total_w if entry is not None else 0.0

    def component_names(self) -> tuple[str, ...]:
        return tuple(sorted(self.parts))


def dac_power(b_dac: float, bandwidth: float, m_tx: int, params: ComponentParams) -> float:
    """Time-interleaved current-steering DAC power.

    Static term scales exponentially with resolution, dynamic term
    linearly with bandwidth; oversampling multiplies the whole converter
    bank.  ``bandwidth == 0`` is allowed and returns the static floor.
    """
    if b_dac < 1.0:
        raise InvalidParameterError(f"DAC resolution must be >= 1 bit, got {b_dac}")
    if bandwidth < 0.0:
        raise InvalidParameterError("bandwidth must be non-negative")
    if m_tx < 1:
        raise InvalidParameterError("oversampling factor must be >= 1")
    static = 0.5 * params.v_dd * params.i_0 * (2.0 ** b_dac - 1.0)
    dynamic = params.c_p * params.v_dd ** 2 * b_dac * bandwidth
    return m_tx * (static + dynamic)


def adc_power(b_adc: float, bandwidth: float, m_rx: int) -> float:
    """Walden-envelope ADC power; resolution may be fractional (3-level)."""
    if b_adc <= 0.0:
        raise InvalidParameterError("ADC resolution must be positive")
    if bandwidth < 0.0:
        raise InvalidParameterError("bandwidth must be non-negative")
    if m_rx < 1:
        raise InvalidParameterError("oversampling factor must be >= 1")
    envelope = math.sqrt(1.0 + (bandwidth / ADC_KNEE_HZ) ** 2)
    return m_rx * ADC_FOM_FLOOR * 2.0 ** b_adc * bandwidth * envelope


def mixer_power(f_c: float) -> float:
    """Measured mixer power for the four supported carriers."""
    for freq, power in MIXER_TABLE_W.items():
        if math.isclose(f_c, freq, rel_tol=1e-9):
            return power
    raise UnsupportedCarrierError(
        f"no mixer measurement for f_c={f_c:g} Hz; "
        f"supported: {sorted(MIXER_TABLE_W)}"
    )


def pae_max(f_c: float) -> float:
    """Survey-fit maximum power-added efficiency, clamped to 1."""
    if f_c <= 0.0:
        raise InvalidParameterError("carrier frequency must be positive")
    return min(1.0, PAE_FIT_COEFF * (f_c / 1e9) ** -0.5)


def papr(gear: Gear) -> float:
    """Peak-to-average power ratio of the gear's transmit signal (linear)."""
    if gear.family == Family.QAM:
        m = gear.qam_order
        symbol_pmepr = 3.0 * (math.sqrt(m) - 1.0) / (math.sqrt(m) + 1.0)
        db = (
            10.0 * math.log10(symbol_pmepr)
            + QAM_FILTER_PMEPR_OFFSET_DB
            + PMEPR_TO_PAPR_DB
        )
    elif gear.family == Family.ZXM:
        db = PAPR_ZXM_DB
    elif gear.ir_variant == "unipolar":
        db = PAPR_IR_UNIPOLAR_DB
    else:
        db = PAPR_IR_VARSIGN_DB
    return 10.0 ** (db / 10.0)


def pa_power(p_t: float, f_c: float, psi: float) -> float:
    """PA consumption from transmit power, carrier and PAPR back-off."""
    if p_t < 0.0:
        raise InvalidParameterError("transmit power must be non-negative")
    if psi < 1.0:
        raise InvalidParameterError("PAPR must be >= 1 (linear)")
    if f_c <= 0.0:
        raise InvalidParameterError("carrier frequency must be positive")
    return PA_MODEL_COEFF * p_t * math.sqrt(f_c) * psi


def lna_power(bandwidth: float, params: ComponentParams, noise_psd: float | None = None) -> float:
    """LNA power via the bandwidth-referred figure of merit."""
    if bandwidth < 0.0:
        raise InvalidParameterError("bandwidth must be non-negative")
    n0 = params.noise_psd if noise_psd is None else noise_psd
    return params.g_lna * bandwidth * n0 / ((params.n_lna - 1.0) * params.fom_lna)


def tx_power(
    gear: Gear,
    f_c: float,
    p_t: float,
    bandwidth: float,
    p_lo: float,
    params: ComponentParams,
) -> PowerBreakdown:
    """Transmitter power breakdown: converters, LO, mixer and PA.

    QAM/ZXM drive one DAC per I/Q branch; real-valued IR needs only one.
    """
    if p_lo < 0.0:
        raise InvalidParameterError("LO power must be non-negative")
    parts = {
        "dac": ComponentEntry(gear.n_dac, dac_power(gear.dac_bits, bandwidth, gear.m_tx, params)),
        "lo": ComponentEntry(1, p_lo),
        "mixer": ComponentEntry(1, mixer_power(f_c)),
        "pa": ComponentEntry(1, pa_power(p_t, f_c, papr(gear))),
    }
    return PowerBreakdown(side="tx", parts=parts)


def rx_power(
    gear: Gear,
    f_c: float,
    bandwidth: float,
    p_lo: float,
    params: ComponentParams,
) -> PowerBreakdown:
    """Receiver power breakdown.

    Complex schemes carry an LO, a mixer and one ADC per I/Q branch;
    variable-sign IR downconverts into a single real ADC; unipolar IR
    replaces the whole downconversion stage with a power detector.
    """
    if p_lo < 0.0:
        raise InvalidParameterError("LO power must be non-negative")
    parts: dict[str, ComponentEntry] = {
        "lna": ComponentEntry(1, lna_power(bandwidth, params)),
        "adc": ComponentEntry(gear.n_adc, adc_power(gear.adc_bits, bandwidth, gear.m_rx)),
    }
    if gear.rx_has_downconversion:
        parts["lo"] = ComponentEntry(1, p_lo)
        parts["mixer"] = ComponentEntry(1, mixer_power(f_c))
    if gear.rx_has_power_detector:
        if gear.rx_has_downconversion:  # pragma: no cover - gear properties forbid this
            raise InvalidConfigurationError("power detector excludes a receive LO")
        parts["pd"] = ComponentEntry(1, params.p_pd)
    return PowerBreakdown(side="rx", parts=parts)

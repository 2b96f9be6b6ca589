"""Gear definitions: modulation family plus the analog front end it rides on.

A *gear* couples a modulation scheme (QAM, zero-crossing modulation, or
impulse radio) with the converter resolutions, oversampling factors and
pulse shaping of its dedicated front end.  All downstream modules (power
models, spectral-efficiency estimation, the energy optimizer) branch on
the gear's family and its discrete parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidConfigurationError, InvalidParameterError

QAM_ORDERS = (4, 16, 64, 256, 1024)  # 4-QAM kept for ZXM equivalence diagnostics
ZXM_FTN_FACTORS = (1, 2, 3)
IR_VARIANTS = ("unipolar", "variable-sign")

LEVELS_3 = math.log2(3.0)  # resolution of a 3-level converter in bits


class Family(str, Enum):
    QAM = "qam"
    ZXM = "zxm"
    IR = "ir"


@dataclass(frozen=True)
class PulseShape:
    """Baseband pulse used for both transmit and receive filtering.

    ``kind`` is "rrc" (root raised cosine, QAM and ZXM) or "rc" (raised
    cosine, impulse radio).  ``span`` is the one-sided truncation length
    in Nyquist intervals.
    """

    kind: str
    alpha: float
    span: int = 16

    def __post_init__(self):
        if self.kind not in ("rrc", "rc"):
            raise InvalidParameterError(f"unknown pulse kind {self.kind!r}")
        if not 0.0 < self.alpha <= 1.0:
            raise InvalidParameterError(f"roll-off must be in (0, 1], got {self.alpha}")
        if self.span < 4:
            raise InvalidParameterError("pulse truncation span too short")


@dataclass(frozen=True)
class Gear:
    """One switchable operating mode of the transceiver.

    Exactly one family's discrete parameter is meaningful:
    ``qam_order`` for QAM, ``ftn_factor`` for ZXM, ``ir_variant`` for IR.
    ZXM with ``ftn_factor == 1`` behaves identically to 4-QAM with hard
    demapping; both representations are kept because their front ends
    are enumerated separately.
    """

    family: Family
    qam_order: int = 0
    ftn_factor: int = 0
    ir_variant: str = ""

    def __post_init__(self):
        if self.family == Family.QAM:
            if self.qam_order not in QAM_ORDERS:
                raise InvalidParameterError(f"unsupported QAM order {self.qam_order}")
            if self.ftn_factor or self.ir_variant:
                raise InvalidConfigurationError("QAM gear carries only qam_order")
        elif self.family == Family.ZXM:
            if self.ftn_factor not in ZXM_FTN_FACTORS:
                raise InvalidParameterError(f"unsupported FTN factor {self.ftn_factor}")
            if self.qam_order or self.ir_variant:
                raise InvalidConfigurationError("ZXM gear carries only ftn_factor")
        elif self.family == Family.IR:
            if self.ir_variant not in IR_VARIANTS:
                raise InvalidParameterError(f"unsupported IR variant {self.ir_variant!r}")
            if self.qam_order or self.ftn_factor:
                raise InvalidConfigurationError("IR gear carries only ir_variant")
        else:  # pragma: no cover - Enum guards this
            raise InvalidConfigurationError(f"unknown family {self.family}")

    @property
    def key(self) -> str:
        """Stable string identifier used in configs, caches and CSV output."""
        if self.family == Family.QAM:
            return f"qam{self.qam_order}"
        if self.family == Family.ZXM:
            return f"zxm{self.ftn_factor}"
        return "ir_unipolar" if self.ir_variant == "unipolar" else "ir_varsign"

    # --- front-end structure -------------------------------------------------

    @property
    def m_tx(self) -> int:
        """Symbols transmitted per Nyquist interval (FTN factor)."""
        return self.ftn_factor if self.family == Family.ZXM else 1

    @property
    def m_rx(self) -> int:
        """Receiver oversampling factor; equals m_tx to avoid equalization."""
        return self.m_tx

    @property
    def dac_bits(self) -> float:
        if self.family == Family.QAM:
            return 0.5 * math.log2(self.qam_order)
        if self.family == Family.ZXM:
            return 1.0
        return 1.0 if self.ir_variant == "unipolar" else LEVELS_3

    @property
    def adc_bits(self) -> float:
        if self.family == Family.QAM:
            return 0.5 * math.log2(self.qam_order)
        if self.family == Family.ZXM:
            return 1.0
        return 1.0 if self.ir_variant == "unipolar" else LEVELS_3

    @property
    def n_dac(self) -> int:
        """Converter count at the transmitter (2 for I/Q, 1 for real IR)."""
        return 1 if self.family == Family.IR else 2

    @property
    def n_adc(self) -> int:
        return 1 if self.family == Family.IR else 2

    @property
    def rx_has_downconversion(self) -> bool:
        """Unipolar IR detects power directly and needs no receive LO/mixer."""
        return not (self.family == Family.IR and self.ir_variant == "unipolar")

    @property
    def rx_has_power_detector(self) -> bool:
        return self.family == Family.IR and self.ir_variant == "unipolar"

    @property
    def phase_noise_tracked(self) -> bool:
        """Pilot-based tracking applies to complex-valued schemes only."""
        return self.family != Family.IR

    @property
    def phase_noise_sensitive(self) -> bool:
        """Unipolar IR is immune to phase rotations (power detection)."""
        return not (self.family == Family.IR and self.ir_variant == "unipolar")

    @property
    def pulse(self) -> PulseShape:
        if self.family == Family.IR:
            return PulseShape("rc", 0.25)
        return PulseShape("rrc", 0.5)


def parse_gear(key: str) -> Gear:
    """Inverse of :attr:`Gear.key`."""
    key = key.strip().lower()
    if key.startswith("qam"):
        return Gear(Family.QAM, qam_order=int(key[3:]))
    if key.startswith("zxm"):
        return Gear(Family.ZXM, ftn_factor=int(key[3:]))
    if key in ("ir_unipolar", "ir_uni"):
        return Gear(Family.IR, ir_variant="unipolar")
    if key in ("ir_varsign", "ir_variable", "ir_variable-sign"):
        return Gear(Family.IR, ir_variant="variable-sign")
    raise InvalidParameterError(f"cannot parse gear key {key!r}")


def default_gear_set() -> tuple[Gear, ...]:
    """The nine production gears (4-QAM is diagnostic-only)."""
    gears = [Gear(Family.QAM, qam_order=m) for m in (16, 64, 256, 1024)]
    gears += [Gear(Family.ZXM, ftn_factor=m) for m in ZXM_FTN_FACTORS]
    gears += [Gear(Family.IR, ir_variant=v) for v in IR_VARIANTS]
    return tuple(gears)


@dataclass(frozen=True)
class FrontEnd:
    """Fixed analog hardware: what survives fabrication unchanged.

    ``sigma_j`` is the oscillator's Wiener phase-noise standard deviation
    in rad, ``b_max`` the LNA bandwidth in Hz that caps the usable system
    bandwidth.  Converter resolutions live on the gear itself.
    """

    sigma_j: float
    b_max: float

    def __post_init__(self):
        if self.sigma_j <= 0.0:
            raise InvalidParameterError("fixed oscillator needs sigma_j > 0")
        if self.b_max <= 0.0:
            raise InvalidParameterError("front-end bandwidth must be positive")

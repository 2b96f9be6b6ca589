"""gearphy: energy-per-bit modeling and optimization for an adaptive
multi-gear radio physical layer.

The library models per-component front-end power, the oscillator
phase-noise/power trade-off, impairment-aware spectral efficiency for
QAM / zero-crossing modulation / impulse radio, and minimizes transceiver
energy per delivered bit under bandwidth, power and duty-cycle limits,
up to cell-level area-weighted evaluation.
"""

__version__ = "0.1.0"

from . import errors, gears, hwpower, link, oscillator

__all__ = ["errors", "gears", "hwpower", "link", "oscillator", "__version__"]

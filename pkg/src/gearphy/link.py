"""Deterministic link budget: path loss, thermal noise and SNR inversion."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import k as BOLTZMANN

from .errors import InvalidParameterError


@dataclass(frozen=True)
class LinkParams:
    f_c: float = 28e9       # carrier frequency [Hz]
    distance: float = 50.0  # link distance [m]
    beta: float = 2.5       # path-loss exponent
    d_tx: float = 10 ** 0.6  # transmit antenna gain, linear (6 dB)
    d_rx: float = 10 ** 0.6  # receive antenna gain, linear (6 dB)
    gamma: float = 300.0    # temperature [K]

    def __post_init__(self):
        if self.distance <= 0.0:
            raise InvalidParameterError("distance must be positive")
        if self.beta < 2.0:
            raise InvalidParameterError("path-loss exponent must be >= 2")
        if self.d_tx < 1.0 or self.d_rx < 1.0:
            raise InvalidParameterError("antenna gains must be >= 1 (linear)")
        if self.f_c <= 0.0:
            raise InvalidParameterError("carrier frequency must be positive")

    def at_distance(self, distance: float) -> "LinkParams":
        return replace(self, distance=distance)


def path_loss(lp: LinkParams) -> float:
    """Distance/frequency power-law path loss L, with P_rx = P_tx / L."""
    free_space = SPEED_OF_LIGHT / (4.0 * math.pi * lp.f_c * lp.distance)
    return 1.0 / (lp.d_rx * lp.d_tx * free_space ** lp.beta)


def noise_power(bandwidth: float, gamma: float) -> float:
    """Thermal noise power k*Gamma*B in watts."""
    if bandwidth < 0.0 or gamma < 0.0:
        raise InvalidParameterError("bandwidth and temperature must be non-negative")
    return BOLTZMANN * gamma * bandwidth


def snr(p_t: float, bandwidth: float, lp: LinkParams) -> float:
    """Receive SNR for a given transmit power."""
    if p_t < 0.0:
        raise InvalidParameterError("transmit power must be non-negative")
    return p_t / (path_loss(lp) * noise_power(bandwidth, lp.gamma))


def required_pt(target_xi: float, bandwidth: float, lp: LinkParams) -> float:
    """Transmit power needed to hit ``target_xi``; exact inverse of :func:`snr`."""
    if target_xi < 0.0:
        raise InvalidParameterError("target SNR must be non-negative")
    return target_xi * noise_power(bandwidth, lp.gamma) * path_loss(lp)

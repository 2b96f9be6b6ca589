"""Modulation-side machinery: pulses, sources, simulation, mutual
information estimation, containment bandwidth and SE curve tabulation."""

from .auxchannel import AuxChannelResult, auxchannel_mi_lb, pn_cov_entry, pn_covariance
from .bandwidth import b99_bandwidth, b99_from_psd
from .qam import qam_mi_hard
from .securve import SECurve, SimParams, build_se_curve
from .simulate import SimOutput, simulate_rx_sequence

__all__ = [
    "AuxChannelResult",
    "auxchannel_mi_lb",
    "pn_cov_entry",
    "pn_covariance",
    "b99_bandwidth",
    "b99_from_psd",
    "qam_mi_hard",
    "SECurve",
    "SimParams",
    "build_se_curve",
    "SimOutput",
    "simulate_rx_sequence",
]

"""Classical BPSK and Gaussian-modulated CV-QKD on the same coherent pulses."""

__version__ = "0.1.0"

from .phase_space import N0, ParameterError, PhasePoint, SeedSpec, SystemParams, sample_gaussian, transmittance

__all__ = [
    "N0",
    "ParameterError",
    "PhasePoint",
    "SeedSpec",
    "SystemParams",
    "sample_gaussian",
    "transmittance",
]

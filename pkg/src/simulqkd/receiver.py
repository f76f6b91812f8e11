"""Bob's homodyne receiver: noise, finite linear range, ADC, bit and key recovery.

Signal chain per pulse: chosen quadrature, plus vacuum and electronic noise
``Normal(0, (1 + nu_el) N0)``, then hard clipping to ``[-x_m, x_m]``, then a
mid-rise uniform quantizer with ``2**M`` levels.  Electronic noise is added
before clipping because amplifier noise precedes the ADC.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .phase_space import N0, ParameterError, PhasePoint, SeedSpec, SystemParams

BASIS, DETECTOR = 6, 7


class Basis(enum.IntEnum):
    X = 0
    P = 1


@dataclass(frozen=True)
class DetectorModel:
    nu_el: float = 0.1
    x_m: float = 10.0
    M: int = 10
    quantizer_enabled: bool = True
    clipping_enabled: bool = True
    noise_enabled: bool = True

    def __post_init__(self) -> None:
        if self.x_m <= 0 or self.M < 1 or self.nu_el < 0:
            raise ParameterError("detector needs x_m > 0, M >= 1, nu_el >= 0")
        if self.quantizer_enabled and not self.clipping_enabled:
            raise ParameterError("the quantizer needs clipped input; enable clipping")

    @classmethod
    def from_params(cls, params: SystemParams, **flags) -> DetectorModel:
        return cls(params.nu_el, params.x_m, int(params.M), **flags)


@dataclass(frozen=True)
class DetectionRecord:
    basis: Basis
    raw: float
    m_B: int
    key_value: float


@dataclass(frozen=True)
class DetectionFrame:
    """Column-wise block of detection outcomes."""

    basis: np.ndarray  # uint8, Basis values
    raw: np.ndarray
    m_B: np.ndarray  # uint8
    key_value: np.ndarray

    def __len__(self) -> int:
        return len(self.raw)

    def __getitem__(self, i: int) -> DetectionRecord:
        return DetectionRecord(
            Basis(int(self.basis[i])), float(self.raw[i]), int(self.m_B[i]), float(self.key_value[i])
        )


def quantize(value, x_m: float, M: int):
    """Mid-rise quantizer with step ``2 x_m / 2**M``; no zero code.

    Input must already lie in ``[-x_m, x_m]``.
    """
    v = np.asarray(value, dtype=float)
    if np.any(np.abs(v) > x_m):
        raise ParameterError("quantizer input outside [-x_m, x_m]; clip first")
    step = 2.0 * x_m / 2**M
    top = x_m - 0.5 * step
    out = np.clip(step * (np.floor(v / step) + 0.5), -top, top)
    return float(out) if out.ndim == 0 else out


def _condition(reading, model: DetectorModel):
    if model.clipping_enabled:
        reading = np.clip(reading, -model.x_m, model.x_m)
    if model.quantizer_enabled:
        reading = quantize(reading, model.x_m, model.M)
    return reading


def measure_arrays(x, p, basis, model: DetectorModel, seed: SeedSpec) -> np.ndarray:
    """Homodyne readings for arrays of amplitudes and per-pulse bases."""
    basis = np.asarray(basis)
    quad = np.where(basis == Basis.X, x, p)
    if model.noise_enabled:
        sd = math.sqrt((1.0 + model.nu_el) * N0)
        quad = quad + sd * seed.child(DETECTOR).generator().standard_normal(quad.shape)
    return np.asarray(_condition(quad, model), dtype=float)


def measure(amplitude: PhasePoint, basis: Basis, model: DetectorModel, seed: SeedSpec) -> float:
    raw = measure_arrays(np.array([amplitude.x]), np.array([amplitude.p]), np.array([basis]), model, seed)
    return float(raw[0])


def choose_bases(seed: SeedSpec, n: int) -> np.ndarray:
    """Fair coin per pulse: 0 for X, 1 for P."""
    return seed.child(BASIS).generator().integers(0, 2, n, dtype=np.uint8)


def decode(raw, alpha: float, t_eta: float):
    """Bit decision by sign, then rescale and undo the bit displacement.

    A reading of exactly zero decodes as bit 1.  Works on scalars or arrays;
    the basis does not enter because both quadratures carry the same bit.
    """
    if t_eta <= 0:
        raise ParameterError("T_ch*eta must be > 0 to rescale readings")
    if alpha < 0:
        raise ParameterError("alpha must be >= 0")
    raw = np.asarray(raw, dtype=float)
    m_B = np.where(raw > 0, 0, 1).astype(np.uint8)
    key = raw / math.sqrt(t_eta) + (2.0 * m_B - 1.0) * alpha
    if raw.ndim == 0:
        return int(m_B), float(key)
    return m_B, key


def detect(x, p, params: SystemParams, alpha: float, seed: SeedSpec, model: DetectorModel | None = None) -> DetectionFrame:
    """Measure a block of channel outputs in random bases and decode them."""
    model = model or DetectorModel.from_params(params)
    x = np.asarray(x, dtype=float)
    basis = choose_bases(seed, len(x))
    raw = measure_arrays(x, p, basis, model, seed)
    m_B, key = decode(raw, alpha, params.T_eta)
    return DetectionFrame(basis, raw, np.atleast_1d(m_B), np.atleast_1d(key))

"""Alice's encoder: one classical bit and one Gaussian pair per coherent pulse.

Bit ``m`` displaces *both* quadratures by ``s * alpha`` with ``s = (-1)**m``,
so the bit survives whichever quadrature Bob happens to measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .noise_budget import resolve_alpha
from .phase_space import N0, ParameterError, PhasePoint, SeedSpec, SystemParams, sample_gaussian

# sub-stream tags under a frame's SeedSpec
BITS, MOD_X, MOD_P = 0, 1, 2


@dataclass(frozen=True)
class PulseRecord:
    m_A: int
    x_A: float
    p_A: float
    amplitude: PhasePoint


def bit_sign(m):
    """``(-1)**m`` for bits, vectorized."""
    s = 1.0 - 2.0 * np.asarray(m, dtype=float)
    return float(s) if s.ndim == 0 else s


def encode_pulse(m_A: int, x_A: float, p_A: float, alpha: float) -> PulseRecord:
    if m_A not in (0, 1):
        raise ParameterError(f"m_A must be 0 or 1, got {m_A}")
    if alpha < 0:
        raise ParameterError(f"alpha must be >= 0, got {alpha}")
    s = bit_sign(m_A)
    return PulseRecord(m_A, x_A, p_A, PhasePoint(x_A + s * alpha, p_A + s * alpha))


@dataclass(frozen=True)
class PulseFrame:
    """A block of transmitted pulses stored column-wise.

    Indexing yields a :class:`PulseRecord`, so small frames can be handled as
    a sequence of records while large ones stay vectorized.
    """

    m_A: np.ndarray  # uint8
    x_A: np.ndarray
    p_A: np.ndarray
    alpha: float

    @property
    def amp_x(self) -> np.ndarray:
        return self.x_A + bit_sign(self.m_A) * self.alpha

    @property
    def amp_p(self) -> np.ndarray:
        return self.p_A + bit_sign(self.m_A) * self.alpha

    def __len__(self) -> int:
        return len(self.m_A)

    def __getitem__(self, i: int) -> PulseRecord:
        return encode_pulse(int(self.m_A[i]), float(self.x_A[i]), float(self.p_A[i]), self.alpha)


def generate_frame(
    params: SystemParams,
    n_pulses: int,
    seed: SeedSpec,
    bits=None,
) -> PulseFrame:
    """Draw a frame of ``n_pulses`` encoded pulses.

    ``bits`` may be a sequence of at least ``n_pulses`` bits; when omitted the
    bits are drawn uniformly from the seed's bit sub-stream.  ``x_A`` and
    ``p_A`` are i.i.d. ``Normal(0, V_A * N0)``.
    """
    if n_pulses < 0:
        raise ParameterError(f"n_pulses must be >= 0, got {n_pulses}")
    if bits is None:
        m_A = seed.child(BITS).generator().integers(0, 2, n_pulses, dtype=np.uint8)
    else:
        m_A = np.asarray(bits, dtype=np.uint8)
        if len(m_A) < n_pulses:
            raise ParameterError(f"bit source has {len(m_A)} bits, need {n_pulses}")
        if np.any(m_A > 1):
            raise ParameterError("bit source must contain only 0 and 1")
        m_A = m_A[:n_pulses]
    var = params.V_A * N0
    x_A = sample_gaussian(0.0, var, seed.child(MOD_X), n_pulses)
    p_A = sample_gaussian(0.0, var, seed.child(MOD_P), n_pulses)
    alpha = resolve_alpha(params)
    if not math.isfinite(alpha):
        raise ParameterError("displacement is not finite")
    return PulseFrame(m_A, x_A, p_A, alpha)

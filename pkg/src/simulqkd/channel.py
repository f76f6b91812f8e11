"""Passive fiber channel: loss, per-pulse phase rotation and additive excess noise.

Loss and detector efficiency act together as an amplitude scale
``sqrt(T_ch * eta)``.  A lossy channel maps coherent states to coherent
states, so the surviving vacuum noise stays at exactly ``N0`` and is added
by the receiver; this module only moves mean amplitudes.

Excess noise ``eps0`` is injected at the receiver reference plane with
variance ``T_ch * eta * eps0 * N0`` per quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .phase_space import N0, PhasePoint, SeedSpec, SystemParams, sample_gaussian

THETA, EXCESS_X, EXCESS_P = 3, 4, 5


@dataclass(frozen=True)
class ChannelDraw:
    """Per-pulse channel realization; fields are floats or equal-length arrays."""

    theta: float | np.ndarray = 0.0
    excess_x: float | np.ndarray = 0.0
    excess_p: float | np.ndarray = 0.0


def draw_channel(params: SystemParams, seed: SeedSpec, n: int | None = None) -> ChannelDraw:
    """Sample phase error ``theta ~ Normal(0, sigma_phi)`` and excess noise.

    With ``n=None`` a single scalar draw is returned.
    """
    k = 1 if n is None else n
    excess_var = params.T_eta * params.eps0 * N0
    theta = sample_gaussian(0.0, params.sigma_phi, seed.child(THETA), k)
    ex = sample_gaussian(0.0, excess_var, seed.child(EXCESS_X), k)
    ep = sample_gaussian(0.0, excess_var, seed.child(EXCESS_P), k)
    if n is None:
        return ChannelDraw(float(theta[0]), float(ex[0]), float(ep[0]))
    return ChannelDraw(theta, ex, ep)


def propagate_arrays(x, p, t_eta: float, draw: ChannelDraw):
    """Vectorized form of :func:`propagate` on quadrature arrays."""
    scale = math.sqrt(t_eta)
    c, s = np.cos(draw.theta), np.sin(draw.theta)
    x_out = scale * (x * c - p * s) + draw.excess_x
    p_out = scale * (x * s + p * c) + draw.excess_p
    return x_out, p_out


def propagate(amplitude: PhasePoint, params: SystemParams, draw: ChannelDraw) -> PhasePoint:
    x, p = propagate_arrays(amplitude.x, amplitude.p, params.T_eta, draw)
    return PhasePoint(float(x), float(p))

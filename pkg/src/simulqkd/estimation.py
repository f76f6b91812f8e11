"""Estimators that turn simulated pulse/detection records back into link parameters.

Estimation uses Alice's full record, a luxury only a simulation has.  Bob
trusts his detector: all unexplained reading variance beyond vacuum and
``nu_el`` is charged to the channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .phase_space import N0, ParameterError, SystemParams
from .receiver import Basis, DetectionFrame
from .security import KeyRateReport, SecurityInputs, key_rate
from .transmitter import PulseFrame

MIN_CHANNEL_PULSES = 10_000
Z95 = float(stats.norm.ppf(0.975))


@dataclass(frozen=True)
class CoMoments:
    """Running means and centered (co)moment sums of a pair ``(u, v)``.

    ``merge`` is the pairwise update of Chan et al., so partial results from
    chunks combine associatively (up to rounding) in any grouping.
    """

    n: int = 0
    mean_u: float = 0.0
    mean_v: float = 0.0
    m2_u: float = 0.0
    m2_v: float = 0.0
    c_uv: float = 0.0

    @classmethod
    def from_arrays(cls, u, v) -> CoMoments:
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        n = len(u)
        if n == 0:
            return cls()
        mu, mv = float(u.mean()), float(v.mean())
        du, dv = u - mu, v - mv
        return cls(n, mu, mv, float(du @ du), float(dv @ dv), float(du @ dv))

    def merge(self, other: CoMoments) -> CoMoments:
        if self.n == 0:
            return other
        if other.n == 0:
            return self
        n = self.n + other.n
        du = other.mean_u - self.mean_u
        dv = other.mean_v - self.mean_v
        w = self.n * other.n / n
        return CoMoments(
            n,
            self.mean_u + du * other.n / n,
            self.mean_v + dv * other.n / n,
            self.m2_u + other.m2_u + du * du * w,
            self.m2_v + other.m2_v + dv * dv * w,
            self.c_uv + other.c_uv + du * dv * w,
        )

    @property
    def var_u(self) -> float:
        return self.m2_u / (self.n - 1)

    @property
    def var_v(self) -> float:
        return self.m2_v / (self.n - 1)

    @property
    def cov(self) -> float:
        return self.c_uv / (self.n - 1)

    @property
    def slope(self) -> float:
        """Least-squares slope of ``v`` on ``u``."""
        return self.c_uv / self.m2_u

    @property
    def residual_var(self) -> float:
        """Variance of ``v`` left after regressing on ``u`` (n - 2 dof)."""
        return (self.m2_v - self.c_uv**2 / self.m2_u) / (self.n - 2)


@dataclass(frozen=True)
class FrameTally:
    """Sufficient statistics of a frame; what a simulation worker returns per chunk."""

    n_pulses: int = 0
    n_bit_errors: int = 0
    channel: CoMoments = CoMoments()  # (encoded quadrature, raw reading)
    keys: CoMoments = CoMoments()  # (Alice key value, Bob key value)

    @classmethod
    def from_frames(cls, pulses: PulseFrame, detections: DetectionFrame) -> FrameTally:
        if len(pulses) != len(detections):
            raise ParameterError("pulse and detection records differ in length")
        is_x = detections.basis == Basis.X
        encoded = np.where(is_x, pulses.amp_x, pulses.amp_p)
        alice_key = np.where(is_x, pulses.x_A, pulses.p_A)
        return cls(
            len(pulses),
            int(np.count_nonzero(pulses.m_A != detections.m_B)),
            CoMoments.from_arrays(encoded, detections.raw),
            CoMoments.from_arrays(alice_key, detections.key_value),
        )

    def merge(self, other: FrameTally) -> FrameTally:
        return FrameTally(
            self.n_pulses + other.n_pulses,
            self.n_bit_errors + other.n_bit_errors,
            self.channel.merge(other.channel),
            self.keys.merge(other.keys),
        )


@dataclass(frozen=True)
class FrameStats:
    n_pulses: int
    n_bit_errors: int
    ber_hat: float
    ber_ci_95: tuple[float, float]
    t_eta_hat: float
    eps_hat: float
    corr_ab: float


def wilson_interval(k: int, n: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ParameterError("need at least one trial")
    p = k / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    # the closed form only reaches the 0 and 1 endpoints up to rounding
    lo = 0.0 if k == 0 else min(p, centre - half)
    hi = 1.0 if k == n else max(p, centre + half)
    return lo, hi


def estimate_ber(pulses: PulseFrame, detections: DetectionFrame) -> tuple[float, tuple[float, float]]:
    if len(pulses) != len(detections):
        raise ParameterError("pulse and detection records differ in length")
    n = len(pulses)
    if n == 0:
        raise ParameterError("cannot estimate BER from an empty frame")
    k = int(np.count_nonzero(pulses.m_A != detections.m_B))
    return k / n, wilson_interval(k, n)


def channel_from_moments(moments: CoMoments, nu_el: float) -> tuple[float, float]:
    """``(t_eta_hat, eps_hat)`` from regression moments of reading on encoded quadrature."""
    if moments.n < MIN_CHANNEL_PULSES:
        raise ParameterError(f"channel estimation needs >= {MIN_CHANNEL_PULSES} pulses, got {moments.n}")
    t_eta_hat = moments.slope**2
    eps_hat = (moments.residual_var / N0 - 1.0 - nu_el) / t_eta_hat
    return t_eta_hat, eps_hat


def estimate_channel(pulses: PulseFrame, detections: DetectionFrame, params: SystemParams) -> tuple[float, float]:
    return channel_from_moments(FrameTally.from_frames(pulses, detections).channel, params.nu_el)


def frame_stats(tally: FrameTally, params: SystemParams) -> FrameStats:
    if tally.n_pulses == 0:
        raise ParameterError("empty frame")
    t_eta_hat, eps_hat = channel_from_moments(tally.channel, params.nu_el)
    return FrameStats(
        n_pulses=tally.n_pulses,
        n_bit_errors=tally.n_bit_errors,
        ber_hat=tally.n_bit_errors / tally.n_pulses,
        ber_ci_95=wilson_interval(tally.n_bit_errors, tally.n_pulses),
        t_eta_hat=t_eta_hat,
        eps_hat=eps_hat,
        corr_ab=tally.keys.cov,
    )


def end_to_end_key_rate(stats: FrameStats, params: SystemParams) -> KeyRateReport:
    """Key rate with the estimated transmittance and excess noise in place of the configured ones.

    ``eta`` and ``nu_el`` stay at their configured (trusted) values; a slightly
    negative ``eps_hat`` from sampling noise is floored at zero.
    """
    if stats.n_pulses == 0:
        raise ParameterError("empty frame")
    T_ch = min(stats.t_eta_hat / params.eta, 1.0)
    inputs = SecurityInputs(params.V_A + 1.0, T_ch, max(stats.eps_hat, 0.0), params.eta, params.nu_el, params.f)
    return key_rate(inputs)

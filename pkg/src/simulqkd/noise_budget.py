"""Closed-form noise budget of the combined BPSK + Gaussian-modulated link.

All excess-noise terms are returned in shot-noise units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .phase_space import N0, ParameterError, SystemParams

TARGET_BER = 1e-9
# Printed rounding of erfcinv(2e-9) = 4.2399...; kept for faithfulness.
DISPLACEMENT_CONSTANT = 4.24


@dataclass(frozen=True)
class NoiseBudget:
    ber: float
    alpha: float
    alpha_required: float
    alpha_prime: float
    V_B: float
    eps_c: float
    eps_d: float
    eps_p: float
    eps_total: float


def ber_bpsk(alpha, params: SystemParams):
    """Analytic BER of sign decoding with the Gaussian modulation treated as noise.

    ``alpha`` may be an array.  With ``V_A = nu_el = 0`` this reduces to the
    shot-noise-limited BPSK error rate.
    """
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < 0):
        raise ParameterError("alpha must be >= 0")
    t_eta = params.T_eta
    noise = (t_eta * params.V_A + 1.0 + params.nu_el) * N0
    ber = 0.5 * special.erfc(math.sqrt(t_eta) * alpha / np.sqrt(2.0 * noise))
    return float(ber) if ber.ndim == 0 else ber


def displacement_constant(target_ber: float) -> float:
    """Exact ``erfcinv(2*target_ber)``; equals 4.2399 at the default target."""
    if not 0 < target_ber < 0.5:
        raise ParameterError(f"target_ber must lie in (0, 0.5), got {target_ber}")
    return float(special.erfcinv(2.0 * target_ber))


def required_displacement(params: SystemParams, target_ber: float | None = None) -> float:
    """Displacement alpha giving the target BER.

    With ``target_ber=None`` the printed constant 4.24 (BER 1e-9) is used;
    passing any target switches to the exact inverse.
    """
    t_eta = params.T_eta
    if t_eta <= 0:
        raise ParameterError("overall transmittance T_ch*eta must be > 0")
    c = DISPLACEMENT_CONSTANT if target_ber is None else displacement_constant(target_ber)
    return c * math.sqrt(t_eta * params.V_A + 1.0 + params.nu_el) / math.sqrt(2.0 * t_eta)


def resolve_alpha(params: SystemParams) -> float:
    return required_displacement(params) if params.alpha is None else params.alpha


def _upper_tail_second_moment(d, s):
    """``E[Y**2 ; Y > 0]`` for ``Y ~ Normal(d, s**2)``.

    Uses ``(d**2 + s**2) Phi(z) + d s phi(z)`` with ``z = d/s``; for ``z < 0``
    the Gaussian factor is pulled out through the scaled complementary error
    function so deep tails do not underflow before the subtraction.
    """
    z = d / s
    out = np.empty_like(z)
    pos = z >= 0
    zp = z[pos]
    out[pos] = (zp**2 + 1.0) * special.ndtr(zp) + zp * np.exp(-0.5 * zp**2) / math.sqrt(2 * math.pi)
    zn = z[~pos]
    mills = math.sqrt(math.pi / 2.0) * special.erfcx(-zn / math.sqrt(2.0))  # Phi(z)/phi(z)
    pdf = np.exp(-0.5 * zn**2) / math.sqrt(2 * math.pi)
    out[~pos] = pdf * ((zn**2 + 1.0) * mills + zn)
    return np.maximum(out, 0.0) * s**2


def clipping_noise(alpha_prime, V_B, x_m):
    """Excess noise from saturating readings outside ``[-x_m, x_m]``.

    The receiver reading is modelled as ``Normal(alpha_prime, V_B)``; the
    squared distance to the nearer rail is integrated over both tails.
    """
    a, v, xm = np.broadcast_arrays(*(np.asarray(q, dtype=float) for q in (alpha_prime, V_B, x_m)))
    if np.any(v <= 0) or np.any(xm < 0):
        raise ParameterError("V_B must be > 0 and x_m >= 0")
    s = np.sqrt(v)
    upper = _upper_tail_second_moment(np.atleast_1d(a - xm), np.atleast_1d(s))
    lower = _upper_tail_second_moment(np.atleast_1d(-a - xm), np.atleast_1d(s))
    eps = (upper + lower).reshape(a.shape) / N0
    return float(eps) if eps.ndim == 0 else eps


def quantization_noise(x_m: float, M: int) -> float:
    """Worst-case ADC error variance ``(step/2)**2`` in shot-noise units."""
    if x_m <= 0 or M < 1:
        raise ParameterError("x_m must be > 0 and M >= 1")
    step = 2.0 * x_m / 2**M
    return (0.5 * step) ** 2 / N0


def phase_excess_noise(alpha, sigma_phi: float):
    """First-order excess noise ``alpha**2 * sigma_phi / N0`` from phase jitter.

    Valid when ``alpha**2 >= (V_A + 1) N0``, i.e. the displacement dominates
    the modulation.
    """
    if sigma_phi < 0:
        raise ParameterError("sigma_phi must be >= 0")
    eps = np.square(alpha) * sigma_phi / N0
    return float(eps) if np.ndim(eps) == 0 else eps


def total_excess_noise(params: SystemParams, alpha: float | None = None, strict: bool = False) -> float:
    """Excess noise outside Bob's station, ``eps_p + eps0``.

    ``strict`` also folds in the clipping and quantization terms, which are
    otherwise reported but treated as negligible.
    """
    if alpha is None:
        alpha = resolve_alpha(params)
    eps = phase_excess_noise(alpha, params.sigma_phi) + params.eps0
    if strict:
        t_eta = params.T_eta
        V_B = (t_eta * params.V_A + 1.0) * N0
        eps += clipping_noise(math.sqrt(t_eta) * alpha, V_B, params.x_m)
        eps += quantization_noise(params.x_m, params.M)
    return float(eps)


def compute_budget(params: SystemParams, strict: bool = False) -> NoiseBudget:
    alpha_required = required_displacement(params)
    alpha = resolve_alpha(params)
    t_eta = params.T_eta
    alpha_prime = math.sqrt(t_eta) * alpha
    V_B = (t_eta * params.V_A + 1.0) * N0
    return NoiseBudget(
        ber=ber_bpsk(alpha, params),
        alpha=alpha,
        alpha_required=alpha_required,
        alpha_prime=alpha_prime,
        V_B=V_B,
        eps_c=clipping_noise(alpha_prime, V_B, params.x_m),
        eps_d=quantization_noise(params.x_m, params.M),
        eps_p=phase_excess_noise(alpha, params.sigma_phi),
        eps_total=total_excess_noise(params, alpha, strict),
    )

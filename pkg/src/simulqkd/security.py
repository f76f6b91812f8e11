"""Asymptotic key rate for reverse reconciliation under collective attacks.

Realistic model: detector loss ``eta`` and electronic noise ``nu_el`` are
trusted, so they enter only through ``chi_hom``.  All noises are in
shot-noise units, rates in bits per (sifted) pulse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .noise_budget import required_displacement, total_excess_noise
from .phase_space import ParameterError, SystemParams

DOMAIN_TOL = 1e-9


class NumericalDomainError(ArithmeticError):
    """Covariance quantities left their physical domain by more than rounding."""


@dataclass(frozen=True)
class SecurityInputs:
    V: float  # V_A + 1
    T_ch: float
    eps: float
    eta: float
    nu_el: float
    f: float = 0.95

    def __post_init__(self) -> None:
        if not self.V >= 1:
            raise ParameterError(f"V must be >= 1, got {self.V}")
        if not 0 < self.T_ch <= 1:
            raise ParameterError(f"T_ch must lie in (0, 1], got {self.T_ch}")
        if not 0 < self.eta <= 1:
            raise ParameterError(f"eta must lie in (0, 1], got {self.eta}")
        if self.eps < 0 or self.nu_el < 0:
            raise ParameterError("eps and nu_el must be >= 0")

    @classmethod
    def from_params(cls, params: SystemParams, eps: float) -> SecurityInputs:
        return cls(params.V_A + 1.0, params.T_ch, eps, params.eta, params.nu_el, params.f)


@dataclass(frozen=True)
class KeyRateReport:
    I_AB: float
    chi_BE: float
    R: float
    lambdas: tuple[float, float, float, float, float]
    chi_line: float
    chi_hom: float
    chi_tot: float
    A: float
    B: float
    C: float
    D: float

    @property
    def positive(self) -> bool:
        return self.R > 0


def g_entropy(x: float) -> float:
    """Von Neumann entropy of a thermal mode with mean photon number ``x``."""
    if x < 0:
        raise NumericalDomainError(f"G argument {x} < 0")
    if x == 0:
        return 0.0
    return (x + 1.0) * math.log2(x + 1.0) - x * math.log2(x)


def chi_terms(inputs: SecurityInputs) -> tuple[float, float, float]:
    """``(chi_line, chi_hom, chi_tot)``: channel, detector and total added noise."""
    T = inputs.T_ch
    chi_line = 1.0 / T - 1.0 + inputs.eps
    chi_hom = (1.0 - inputs.eta + inputs.nu_el) / inputs.eta
    return chi_line, chi_hom, chi_line + chi_hom / T


def mutual_information(inputs: SecurityInputs) -> float:
    chi_tot = chi_terms(inputs)[2]
    return 0.5 * math.log2((inputs.V + chi_tot) / (1.0 + chi_tot))


def _eigen_pair(s: Fraction, prod: Fraction, what: str) -> tuple[float, float]:
    """Roots ``l1 >= l2`` (as ``l``, not ``l**2``) of ``l**4 - s l**2 + prod = 0``.

    The discriminant is formed exactly; the smaller root comes from the
    product, so a near-double root at 1 is resolved to full precision.
    """
    disc2 = s * s - 4 * prod
    if disc2 < 0:
        if disc2 < -DOMAIN_TOL:
            raise NumericalDomainError(f"{what} discriminant = {float(disc2)} is negative")
        disc2 = Fraction(0)
    big = 0.5 * (float(s) + math.sqrt(disc2))
    if big <= 0:
        raise NumericalDomainError(f"{what}: non-positive root {big}")
    small = float(prod) / big
    for sq in (big, small):
        if sq < 1.0 - DOMAIN_TOL:
            raise NumericalDomainError(f"{what}: symplectic eigenvalue squared {sq} < 1")
    return math.sqrt(max(big, 1.0)), math.sqrt(max(small, 1.0))


def symplectic_terms(inputs: SecurityInputs):
    """``(A, B, C, D, lambdas)`` with ``lambdas = (l1, ..., l5)``.

    ``sqrt(B) = T (V chi_line + 1)`` keeps every intermediate rational in the
    inputs, so the invariants are evaluated in exact arithmetic before
    rounding.
    """
    V, T, eps, eta, nu = (Fraction(v) for v in (inputs.V, inputs.T_ch, inputs.eps, inputs.eta, inputs.nu_el))
    chi_line = 1 / T - 1 + eps
    chi_hom = (1 - eta + nu) / eta
    chi_tot = chi_line + chi_hom / T
    A = V * V * (1 - 2 * T) + 2 * T + T * T * (V + chi_line) ** 2
    sqrt_B = T * (V * chi_line + 1)
    B = sqrt_B * sqrt_B
    denom = T * (V + chi_tot)
    if denom <= 0:
        raise NumericalDomainError("V + chi_tot must be positive")
    C = (A * chi_hom + V * sqrt_B + T * (V + chi_line)) / denom
    D = sqrt_B * (V + sqrt_B * chi_hom) / denom
    l1, l2 = _eigen_pair(A, B, "lambda_1,2")
    l3, l4 = _eigen_pair(C, D, "lambda_3,4")
    return float(A), float(B), float(C), float(D), (l1, l2, l3, l4, 1.0)


def holevo_bound(inputs: SecurityInputs) -> tuple[float, tuple[float, ...]]:
    """Eve's Holevo information on Bob's data and the five symplectic eigenvalues."""
    lambdas = symplectic_terms(inputs)[4]
    g = [g_entropy((lam - 1.0) / 2.0) for lam in lambdas]
    return g[0] + g[1] - g[2] - g[3] - g[4], lambdas


def key_rate(inputs: SecurityInputs) -> KeyRateReport:
    chi_line, chi_hom, chi_tot = chi_terms(inputs)
    A, B, C, D, lambdas = symplectic_terms(inputs)
    chi_BE = holevo_bound(inputs)[0]
    I_AB = mutual_information(inputs)
    return KeyRateReport(
        I_AB=I_AB,
        chi_BE=chi_BE,
        R=inputs.f * I_AB - chi_BE,
        lambdas=lambdas,
        chi_line=chi_line,
        chi_hom=chi_hom,
        chi_tot=chi_tot,
        A=A,
        B=B,
        C=C,
        D=D,
    )


def link_key_rate(params: SystemParams, strict: bool = False) -> KeyRateReport:
    """Key rate of the combined link at ``params.L``.

    The displacement is always re-derived for BER 1e-9 at this distance, so
    phase-noise excess grows with fiber length.
    """
    alpha = required_displacement(params)
    eps = total_excess_noise(params, alpha, strict)
    return key_rate(SecurityInputs.from_params(params, eps))


def rate_curve(params: SystemParams, lengths, strict: bool = False) -> np.ndarray:
    return np.array([link_key_rate(params.replace(L=float(L)), strict).R for L in lengths])


def zero_crossing(params: SystemParams, L_max: float = 300.0, strict: bool = False, step: float = 1.0) -> float | None:
    """First fiber length at which the key rate reaches zero, or None.

    Brackets on a grid of ``step`` km then refines with Brent's method.
    Returns 0.0 when the rate is already non-positive at zero length.
    """

    def rate(L: float) -> float:
        return link_key_rate(params.replace(L=L), strict).R

    lo, r_lo = 0.0, rate(0.0)
    if r_lo <= 0:
        return 0.0
    while lo < L_max:
        hi = min(lo + step, L_max)
        r_hi = rate(hi)
        if r_hi <= 0:
            return float(brentq(rate, lo, hi, xtol=1e-10))
        lo = hi
    return None

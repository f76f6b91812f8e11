"""Units, value types and seeded random streams shared by the simulator.

Quadratures are kept in absolute units in which the vacuum (shot-noise)
variance is ``N0 = 1/4``.  A coherent state ``|x0 + i p0>`` measured on the X
quadrature gives outcomes distributed as ``Normal(x0, N0)``.  Any variance
quoted "in shot-noise units" is the absolute variance divided by ``N0``.

Randomness is drawn only through :class:`SeedSpec`.  Each spec maps to a
Philox (counter-based) bit generator keyed by ``(master_seed, stream_index,
*purpose)``, so streams with different indices are independent and every
stream is reproducible.  Gaussian variates come from numpy's
``Generator.standard_normal`` (ziggurat method).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

N0 = 0.25  # shot-noise variance, absolute units


class ParameterError(ValueError):
    """Raised when an input violates a documented precondition."""


@dataclass(frozen=True)
class PhasePoint:
    """A point ``(x, p)`` in phase space, absolute units."""

    x: float
    p: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.p)):
            raise ParameterError(f"non-finite phase point ({self.x}, {self.p})")

    def __iter__(self):
        yield self.x
        yield self.p


@dataclass(frozen=True)
class SystemParams:
    """Full configuration of one link.

    Defaults are the operating point used for the displacement and key-rate
    figures.  ``alpha=None`` means "use the displacement required for a BER of
    1e-9", see :func:`simulqkd.noise_budget.resolve_alpha`.
    """

    V_A: float = 4.0  # modulation variance, SNU
    gamma: float = 0.2  # dB/km
    L: float = 0.0  # km
    eta: float = 0.5
    nu_el: float = 0.1  # SNU
    eps0: float = 0.01  # SNU, alpha-independent excess noise
    sigma_phi: float = 1e-4  # rad^2
    alpha: float | None = None  # absolute units
    x_m: float = 10.0  # absolute units
    M: int = 10
    f: float = 0.95

    def __post_init__(self) -> None:
        for name in dataclasses.fields(self):
            value = getattr(self, name.name)
            if value is not None and not math.isfinite(value):
                raise ParameterError(f"{name.name} must be finite, got {value}")
        if self.V_A < 0:
            raise ParameterError(f"V_A must be >= 0, got {self.V_A}")
        if not 0 < self.eta <= 1:
            raise ParameterError(f"eta must lie in (0, 1], got {self.eta}")
        for name in ("gamma", "L", "nu_el", "eps0", "sigma_phi"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.alpha is not None and self.alpha < 0:
            raise ParameterError(f"alpha must be >= 0, got {self.alpha}")
        if self.x_m <= 0:
            raise ParameterError(f"x_m must be > 0, got {self.x_m}")
        if int(self.M) != self.M or self.M < 1:
            raise ParameterError(f"M must be a positive integer, got {self.M}")
        if not 0 < self.f <= 1:
            raise ParameterError(f"f must lie in (0, 1], got {self.f}")

    @property
    def T_ch(self) -> float:
        return transmittance(self.gamma, self.L)

    @property
    def T_eta(self) -> float:
        """Overall transmittance, channel times detector efficiency."""
        return self.T_ch * self.eta

    def replace(self, **changes) -> SystemParams:
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class SeedSpec:
    """Identifies one reproducible random stream.

    ``purpose`` lets a single logical stream fan out into independent
    sub-streams (bits, modulation, phase noise, ...) without index bookkeeping.
    """

    master_seed: int
    stream_index: int = 0
    purpose: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed < 2**64:
            raise ParameterError("master_seed must be a 64-bit unsigned integer")
        if self.stream_index < 0:
            raise ParameterError("stream_index must be non-negative")

    def child(self, purpose: int) -> SeedSpec:
        return SeedSpec(self.master_seed, self.stream_index, self.purpose + (purpose,))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(
            self.master_seed, spawn_key=(self.stream_index, *self.purpose)
        )
        return np.random.Generator(np.random.Philox(seq))


def sample_gaussian(mean: float, variance: float, seed: SeedSpec, n: int) -> np.ndarray:
    """Draw ``n`` i.i.d. ``Normal(mean, variance)`` samples from ``seed``."""
    if variance < 0:
        raise ParameterError(f"variance must be >= 0, got {variance}")
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    if variance == 0:
        return np.full(n, float(mean))
    return mean + math.sqrt(variance) * seed.generator().standard_normal(n)


def transmittance(gamma: float, L: float) -> float:
    """Fiber transmittance ``10**(-gamma*L/10)`` for attenuation in dB/km."""
    if gamma < 0 or L < 0:
        raise ParameterError(f"gamma and L must be >= 0, got gamma={gamma}, L={L}")
    return 10.0 ** (-gamma * L / 10.0)

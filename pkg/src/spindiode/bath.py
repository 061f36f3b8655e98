"""Ohmic bosonic baths: occupations and jump rates.

Sign convention: ``omega`` passed to :func:`rate` is the energy the system
*loses* in the jump, so ``omega > 0`` is emission into the bath and
``omega < 0`` absorption from it. Units have k_B = ħ = 1.
"""

from __future__ import annotations

import dataclasses
import enum
import math

from ._logmath import NEG_INF, log1mexp, log_expm1

__all__ = [
    "Side",
    "BathSpec",
    "occupation",
    "rate",
    "log_rate",
    "a_coefficient",
    "log_a_coefficient",
]


class Side(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def site_label(self) -> str:
        return "L" if self is Side.LEFT else "R"


@dataclasses.dataclass(frozen=True)
class BathSpec:
    """One reservoir. ``temperature == 0`` is treated exactly."""

    side: Side
    temperature: float
    lam: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "side", Side(self.side))
        t = float(self.temperature)
        lam = float(self.lam)
        if not t >= 0.0 or math.isinf(t):
            raise ValueError(f"temperature must be finite and >= 0, got {self.temperature!r}")
        if not lam > 0.0 or math.isinf(lam):
            raise ValueError(f"lambda must be finite and > 0, got {self.lam!r}")
        object.__setattr__(self, "temperature", t)
        object.__setattr__(self, "lam", lam)

    @property
    def beta(self) -> float:
        return math.inf if self.temperature == 0.0 else 1.0 / self.temperature

    def with_temperature(self, temperature: float) -> "BathSpec":
        return dataclasses.replace(self, temperature=temperature)


def occupation(omega: float, T: float) -> float:
    """Bose-Einstein occupation 1/(e^{ω/T} - 1); exactly 0 at T = 0."""
    if not omega > 0.0:
        raise ValueError(f"occupation needs omega > 0, got {omega!r}")
    if T < 0.0:
        raise ValueError(f"temperature must be >= 0, got {T!r}")
    if T == 0.0:
        return 0.0
    x = omega / T
    if x <= 1.0:
        return 1.0 / math.expm1(x)
    e = math.exp(-x)
    return e / (-math.expm1(-x))


def rate(omega: float, bath: BathSpec) -> float:
    """Transition rate for a jump releasing ``omega`` into ``bath``.

    λω(1+n) for emission, λ|ω|n for absorption and λT at ω = 0.
    """
    lam, T = bath.lam, bath.temperature
    if omega == 0.0:
        return lam * T
    if T == 0.0:
        return lam * omega if omega > 0.0 else 0.0
    x = abs(float(omega)) / T
    if omega > 0.0:
        # λω(1 + n) = λω / (1 - e^{-x})
        return lam * omega / (-math.expm1(-x))
    if x > 745.0:
        return 0.0
    return lam * (-omega) * occupation(-omega, T)


def log_rate(omega: float, bath: BathSpec) -> float:
    """Natural log of :func:`rate`; ``-inf`` for forbidden jumps."""
    lam, T = bath.lam, bath.temperature
    if omega == 0.0:
        return math.log(lam * T) if T > 0.0 else NEG_INF
    if T == 0.0:
        return math.log(lam * omega) if omega > 0.0 else NEG_INF
    x = abs(float(omega)) / T
    if omega > 0.0:
        return math.log(lam * omega) - log1mexp(x)
    return math.log(lam * -omega) - log_expm1(x)


def a_coefficient(omega_signed: float, bath: BathSpec) -> float:
    """ω·n(ω) continued to ω < 0 through n(-ω) = -(1 + n(ω)).

    Equal to rate(-ω)/λ: positive arguments give absorption weights and
    negative arguments emission weights. Returns T at ω = 0.
    """
    return rate(-omega_signed, bath) / bath.lam


def log_a_coefficient(omega_signed: float, bath: BathSpec) -> float:
    return log_rate(-omega_signed, bath) - math.log(bath.lam)

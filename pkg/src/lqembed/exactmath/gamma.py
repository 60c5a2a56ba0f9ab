"""Symbolic constants of the form ``scalar * Gamma(a) / Gamma(b) * pi**c``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .poly import Number, as_fraction
from .serialize import rational_from_json, rational_to_json


class UnreducibleGammaRatio(ValueError):
    """Raised when Gamma(a)/Gamma(b) is not a finite product of rationals."""


def gamma_float(x: Number) -> float:
    """Gamma at a positive rational, as a double.

    Backed by the C library's ``tgamma``; accurate to a few ulps on the
    quarter- and half-integer arguments used here.
    """
    x = as_fraction(x)
    if x <= 0:
        raise ValueError(f"gamma_float requires x > 0, got {x}")
    return math.gamma(float(x))


def log_gamma_float(x: Number) -> float:
    x = as_fraction(x)
    if x <= 0:
        raise ValueError(f"log_gamma_float requires x > 0, got {x}")
    return math.lgamma(float(x))


@dataclass(frozen=True)
class GammaRatioConstant:
    """``scalar * Gamma(gamma_num) / Gamma(gamma_den) * pi**pi_power``."""

    gamma_num: Fraction
    gamma_den: Fraction
    pi_power: Fraction
    scalar: Fraction

    def __post_init__(self):
        for name in ("gamma_num", "gamma_den", "pi_power", "scalar"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.gamma_num <= 0 or self.gamma_den <= 0:
            raise ValueError("Gamma arguments must be positive")
        if self.pi_power.denominator not in (1, 2):
            raise ValueError("pi exponent must be a half-integer")

    @property
    def reducible(self) -> bool:
        d = self.gamma_num - self.gamma_den
        return d.denominator == 1 and d >= 0

    def value(self) -> float:
        if self.scalar == 0:
            return 0.0
        logv = (
            log_gamma_float(self.gamma_num)
            - log_gamma_float(self.gamma_den)
            + float(self.pi_power) * math.log(math.pi)
            + math.log(abs(float(self.scalar)))
        )
        return math.copysign(math.exp(logv), self.scalar)

    def __mul__(self, other) -> GammaRatioConstant:
        other = as_fraction(other)
        return GammaRatioConstant(self.gamma_num, self.gamma_den, self.pi_power, self.scalar * other)

    __rmul__ = __mul__

    def ratio_to(self, other: GammaRatioConstant) -> Fraction:
        """Exact rational ``self / other`` when both share the pi power and the
        Gamma arguments differ by non-negative integers."""
        if self.pi_power != other.pi_power:
            raise UnreducibleGammaRatio("pi powers differ")
        return (
            self.scalar
            / other.scalar
            * gamma_quotient(self.gamma_num, other.gamma_num)
            / gamma_quotient(self.gamma_den, other.gamma_den)
        )

    def pretty(self) -> str:
        s = f"{self.scalar}"
        if self.gamma_num != self.gamma_den:
            s += f" * Gamma({self.gamma_num})/Gamma({self.gamma_den})"
        if self.pi_power:
            s += f" * pi^({self.pi_power})"
        return s

    def to_json(self) -> dict:
        return {
            "gamma_num": rational_to_json(self.gamma_num),
            "gamma_den": rational_to_json(self.gamma_den),
            "pi_power": rational_to_json(self.pi_power),
            "scalar": rational_to_json(self.scalar),
        }

    @classmethod
    def from_json(cls, obj: dict) -> GammaRatioConstant:
        return cls(*(rational_from_json(obj[k]) for k in ("gamma_num", "gamma_den", "pi_power", "scalar")))


def gamma_ratio_reduce(c: GammaRatioConstant) -> GammaRatioConstant:
    """Collapse Gamma(a)/Gamma(b) with a - b = m >= 0 into b(b+1)...(b+m-1)."""
    diff = c.gamma_num - c.gamma_den
    if diff.denominator != 1 or diff < 0:
        raise UnreducibleGammaRatio(
            f"Gamma({c.gamma_num})/Gamma({c.gamma_den}) does not reduce: argument gap {diff}"
        )
    factor = Fraction(1)
    for i in range(int(diff)):
        factor *= c.gamma_den + i
    return GammaRatioConstant(c.gamma_den, c.gamma_den, c.pi_power, c.scalar * factor)


def gamma_quotient(a: Number, b: Number) -> Fraction:
    """Exact Gamma(a)/Gamma(b) for positive a, b an integer apart (either order)."""
    a, b = as_fraction(a), as_fraction(b)
    if a >= b:
        return gamma_ratio_reduce(GammaRatioConstant(a, b, 0, 1)).scalar
    return 1 / gamma_ratio_reduce(GammaRatioConstant(b, a, 0, 1)).scalar

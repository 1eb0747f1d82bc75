"""Exact U(1) phases: rationals modulo 1, i.e. roots of unity exp(2*pi*i*num/den)."""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from math import gcd


@dataclass(frozen=True, slots=True)
class Phase:
    """exp(2*pi*i * num/den), stored reduced with 0 <= num < den."""

    num: int
    den: int

    def __post_init__(self) -> None:
        if self.den <= 0:
            raise ValueError("denominator must be positive")
        n = self.num % self.den
        g = gcd(n, self.den)
        object.__setattr__(self, "num", n // g)
        object.__setattr__(self, "den", self.den // g)

    @staticmethod
    def one() -> "Phase":
        return Phase(0, 1)

    @staticmethod
    def from_fraction(f: Fraction) -> "Phase":
        return Phase(f.numerator, f.denominator)

    @property
    def is_one(self) -> bool:
        return self.num == 0

    def __mul__(self, other: "Phase") -> "Phase":
        return Phase(self.num * other.den + other.num * self.den,
                     self.den * other.den)

    def inverse(self) -> "Phase":
        return Phase(-self.num, self.den)

    def __truediv__(self, other: "Phase") -> "Phase":
        return self * other.inverse()

    def __pow__(self, k: int) -> "Phase":
        return Phase(self.num * k, self.den)

    def turns(self) -> Fraction:
        """The phase as a fraction of a full turn in [0, 1)."""
        return Fraction(self.num, self.den)

    def to_complex(self) -> complex:
        if self.num == 0:
            return 1.0 + 0.0j
        if 2 * self.num == self.den:
            return -1.0 + 0.0j
        return cmath.exp(2j * cmath.pi * self.num / self.den)

    def __str__(self) -> str:
        if self.num == 0:
            return "1"
        if 2 * self.num == self.den:
            return "-1"
        return f"exp(2*pi*i*{self.num}/{self.den})"


ONE = Phase(0, 1)
MINUS_ONE = Phase(1, 2)

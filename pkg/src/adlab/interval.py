"""Reals carried as exact rational brackets [lo, hi]."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Context, Decimal
from fractions import Fraction

_CTX = Context(prec=24)


def decimal_string(x, digits: int = 20) -> str:
    """Deterministic decimal rendering of a Fraction/int/float."""
    if isinstance(x, float):
        return repr(x)
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    ctx = Context(prec=digits)
    return str(ctx.divide(Decimal(x.numerator), Decimal(x.denominator)))


@dataclass(frozen=True)
class Approx:
    """A real number known to lie in [lo, hi]."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if lo > hi:
            raise ValueError("empty bracket")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def exact(cls, v) -> "Approx":
        return cls(Fraction(v), Fraction(v))

    @classmethod
    def from_bracket(cls, lo, hi) -> "Approx":
        return cls(Fraction(lo), Fraction(hi))

    @classmethod
    def around(cls, value, radius=0) -> "Approx":
        value = Fraction(value)
        radius = abs(Fraction(radius))
        return cls(value - radius, value + radius)

    @classmethod
    def coerce(cls, x) -> "Approx":
        if isinstance(x, Approx):
            return x
        if isinstance(x, tuple):
            return cls.around(*x)
        return cls.exact(x)

    @property
    def value(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def radius(self) -> Fraction:
        return (self.hi - self.lo) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def __float__(self) -> float:
        return float(self.value)

    def certainly_gt(self, other) -> bool:
        return self.lo > Approx.coerce(other).hi

    def certainly_lt(self, other) -> bool:
        return self.hi < Approx.coerce(other).lo

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def __mul__(self, other) -> "Approx":
        o = Approx.coerce(other)
        prods = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        return Approx(min(prods), max(prods))

    def __truediv__(self, other) -> "Approx":
        o = Approx.coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor bracket contains zero")
        return self * Approx(1 / o.hi, 1 / o.lo)

    def __pow__(self, k: int) -> "Approx":
        if self.lo < 0:
            raise ValueError("powers implemented for nonnegative brackets")
        return Approx(self.lo**k, self.hi**k)

    def to_json(self) -> dict:
        return {"value": decimal_string(self.value), "radius": decimal_string(self.radius)}

    def __str__(self) -> str:
        if self.is_exact:
            return decimal_string(self.value)
        return f"{decimal_string(self.value, 14)} ± {float(self.radius):.1e}"

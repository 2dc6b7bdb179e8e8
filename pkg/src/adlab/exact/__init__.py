"""Exact arithmetic substrate: rationals, sparse polynomials, gcd, parsing."""

from fractions import Fraction as BigRat

from .gcd import poly_gcd, poly_gcd_many
from .parse import ParseError, UnknownIdentifier, poly_parse
from .poly import NEG_INF, ExponentOverflow, MultiPoly, NotDivisible, poly_eval, poly_mul

__all__ = [
    "BigRat", "MultiPoly", "NEG_INF", "ExponentOverflow", "NotDivisible", "ParseError",
    "UnknownIdentifier", "poly_eval", "poly_gcd", "poly_gcd_many", "poly_mul", "poly_parse",
]

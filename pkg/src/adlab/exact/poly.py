"""Sparse multivariate polynomials with exact rational coefficients.

A :class:`MultiPoly` is an immutable map from exponent tuples to nonzero
:class:`fractions.Fraction` coefficients.  Terms are ordered graded
lexicographically (total degree first, then lex on the exponent tuple); that
order fixes canonical printing and the sign of "leading coefficient" used by
gcd normalization.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

NEG_INF = float("-inf")
MAX_EXPONENT = 2**31 - 1

Monomial = tuple[int, ...]


class ExponentOverflow(OverflowError):
    pass


class NotDivisible(ArithmeticError):
    pass


def _check_exponents(exps: Monomial) -> None:
    for e in exps:
        if e > MAX_EXPONENT:
            raise ExponentOverflow(f"exponent {e} exceeds {MAX_EXPONENT}")


def grlex_key(m: Monomial) -> tuple[int, Monomial]:
    return (sum(m), m)


class MultiPoly:
    """Immutable sparse polynomial in ``nvars`` variables over Q."""

    __slots__ = ("_nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Monomial, Fraction | int] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if len(m) != nvars:
                    raise ValueError(f"exponent vector {m} does not have length {nvars}")
                if any(e < 0 for e in m):
                    raise ValueError(f"negative exponent in {m}")
                c = Fraction(c)
                if c:
                    clean[tuple(m)] = c
        self._nvars = nvars
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Monomial, Fraction]) -> "MultiPoly":
        # trusted constructor: caller guarantees no zero coefficients
        obj = cls.__new__(cls)
        obj._nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c: Fraction | int) -> "MultiPoly":
        c = Fraction(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def one(cls, nvars: int) -> "MultiPoly":
        return cls.const(nvars, 1)

    @classmethod
    def var(cls, nvars: int, i: int) -> "MultiPoly":
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        m = [0] * nvars
        m[i] = 1
        return cls._raw(nvars, {tuple(m): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff: Fraction | int = 1) -> "MultiPoly":
        exps = tuple(exps)
        _check_exponents(exps)
        return cls(len(exps), {exps: coeff})

    # -- basic accessors --------------------------------------------------
    @property
    def nvars(self) -> int:
        return self._nvars

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self._nvars, Fraction(0))

    def degree(self) -> int | float:
        """Total degree; ``NEG_INF`` for the zero polynomial."""
        if not self._terms:
            return NEG_INF
        return max(sum(m) for m in self._terms)

    def degree_in(self, i: int) -> int | float:
        if not self._terms:
            return NEG_INF
        return max(m[i] for m in self._terms)

    def min_degree_in(self, i: int) -> int:
        return min(m[i] for m in self._terms) if self._terms else 0

    def is_homogeneous(self) -> bool:
        if not self._terms:
            return True
        degs = {sum(m) for m in self._terms}
        return len(degs) == 1

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in descending graded-lex order."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading_monomial(self) -> Monomial:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self._terms, key=grlex_key)

    def leading_coefficient(self) -> Fraction:
        return self._terms[self.leading_monomial()] if self._terms else Fraction(0)

    def variables_used(self) -> set[int]:
        used = set()
        for m in self._terms:
            used.update(i for i, e in enumerate(m) if e)
        return used

    # -- comparisons ------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, MultiPoly):
            return self._nvars == other._nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.const(self._nvars, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._nvars, frozenset(self._terms.items())))
        return self._hash

    # -- ring operations --------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other._nvars != self._nvars:
                raise ValueError(f"variable-count mismatch: {self._nvars} vs {other._nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(self._nvars, other)
        raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")

    def __add__(self, other) -> "MultiPoly":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return MultiPoly._raw(self._nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self._nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def scale(self, c: Fraction | int) -> "MultiPoly":
        c = Fraction(c)
        if not c:
            return MultiPoly.zero(self._nvars)
        return MultiPoly._raw(self._nvars, {m: v * c for m, v in self._terms.items()})

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        out: dict[Monomial, Fraction] = {}
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = tuple(x + y for x, y in zip(ma, mb))
                out[m] = get(m, 0) + ca * cb
        return MultiPoly._raw(self._nvars, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MultiPoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        if k > MAX_EXPONENT:
            raise ExponentOverflow(f"power {k} exceeds {MAX_EXPONENT}")
        result = MultiPoly.one(self._nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- division ---------------------------------------------------------
    def divmod(self, divisor: "MultiPoly") -> tuple["MultiPoly", "MultiPoly"]:
        """Multivariate division by a single divisor in graded-lex order.

        The remainder is zero exactly when ``divisor`` divides ``self``.
        """
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lm = divisor.leading_monomial()
        lc = divisor._terms[lm]
        dterms = list(divisor._terms.items())
        rem = dict(self._terms)
        quot: dict[Monomial, Fraction] = {}
        out_rem: dict[Monomial, Fraction] = {}
        while rem:
            m = max(rem, key=grlex_key)
            c = rem[m]
            if all(x >= y for x, y in zip(m, lm)):
                qm = tuple(x - y for x, y in zip(m, lm))
                qc = c / lc
                quot[qm] = quot.get(qm, 0) + qc
                for dm, dc in dterms:
                    tm = tuple(x + y for x, y in zip(qm, dm))
                    v = rem.get(tm, 0) - qc * dc
                    if v:
                        rem[tm] = v
                    else:
                        rem.pop(tm, None)
            else:
                out_rem[m] = c
                del rem[m]
        return (MultiPoly._raw(self._nvars, {m: c for m, c in quot.items() if c}),
                MultiPoly._raw(self._nvars, out_rem))

    def exact_div(self, divisor: "MultiPoly") -> "MultiPoly":
        if isinstance(divisor, (int, Fraction)):
            if not divisor:
                raise ZeroDivisionError("division by zero")
            return self.scale(Fraction(1) / Fraction(divisor))
        if divisor.is_constant():
            return self.exact_div(divisor.constant_term())
        q, r = self.divmod(divisor)
        if r:
            raise NotDivisible("divisor does not divide the polynomial exactly")
        return q

    def divides(self, other: "MultiPoly") -> bool:
        """True iff ``self`` divides ``other``."""
        if self.is_zero():
            return other.is_zero()
        return other.divmod(self)[1].is_zero()

    # -- content / normalization ------------------------------------------
    def content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer coefficients."""
        if not self._terms:
            return Fraction(0)
        nums = reduce(gcd, (c.numerator for c in self._terms.values()))
        dens = reduce(lcm, (c.denominator for c in self._terms.values()))
        return Fraction(abs(nums), dens)

    def primitive(self) -> "MultiPoly":
        """Integer content 1 and positive graded-lex leading coefficient."""
        if not self._terms:
            return self
        c = self.content()
        if self.leading_coefficient() < 0:
            c = -c
        return self.exact_div(c)

    def monic(self) -> "MultiPoly":
        if not self._terms:
            return self
        return self.exact_div(self.leading_coefficient())

    def integer_terms(self) -> dict[Monomial, int]:
        """Coefficients as ints; raises if any coefficient is not integral."""
        out = {}
        for m, c in self._terms.items():
            if c.denominator != 1:
                raise ValueError("polynomial has non-integer coefficients")
            out[m] = c.numerator
        return out

    def monomial_content(self) -> Monomial:
        """Exponentwise minimum over all terms (largest monomial factor)."""
        if not self._terms:
            return (0,) * self._nvars
        it = iter(self._terms)
        lo = list(next(it))
        for m in it:
            for i, e in enumerate(m):
                if e < lo[i]:
                    lo[i] = e
        return tuple(lo)

    def shift(self, exps: Sequence[int], sign: int = 1) -> "MultiPoly":
        """Multiply (sign=1) or divide (sign=-1) by the monomial ``exps``."""
        out = {}
        for m, c in self._terms.items():
            nm = tuple(x + sign * y for x, y in zip(m, exps))
            if any(e < 0 for e in nm):
                raise NotDivisible("monomial does not divide the polynomial")
            out[nm] = c
        return MultiPoly._raw(self._nvars, out)

    # -- evaluation and substitution --------------------------------------
    def __call__(self, *point):
        return self.eval(point)

    def eval(self, point: Sequence) -> Fraction:
        """Exact value at ``point`` (ints, Fractions, or anything closed under * and +)."""
        if len(point) != self._nvars:
            raise ValueError(f"point has length {len(point)}, expected {self._nvars}")
        pts = [Fraction(v) if isinstance(v, (int, Fraction)) else v for v in point]
        total = Fraction(0)
        powcache: dict[tuple[int, int], Fraction] = {}
        for m, c in self._terms.items():
            v = c
            for i, e in enumerate(m):
                if e:
                    key = (i, e)
                    p = powcache.get(key)
                    if p is None:
                        p = powcache[key] = pts[i] ** e
                    v = v * p
            total += v
        return total

    def substitute(self, values: Sequence["MultiPoly"]) -> "MultiPoly":
        """Composition p(q_0, ..., q_{n-1}); the result lives in the q's ring."""
        if len(values) != self._nvars:
            raise ValueError(f"need {self._nvars} substitution values, got {len(values)}")
        if not values:
            return self
        target = values[0].nvars
        if any(v.nvars != target for v in values):
            raise ValueError("substitution values must share a variable count")
        powers: list[dict[int, MultiPoly]] = [{0: MultiPoly.one(target), 1: v} for v in values]

        def power(i: int, e: int) -> MultiPoly:
            cache = powers[i]
            if e not in cache:
                half = power(i, e // 2)
                p = half * half
                if e % 2:
                    p = p * values[i]
                cache[e] = p
            return cache[e]

        acc: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            term = MultiPoly.const(target, c)
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            for tm, tc in term._terms.items():
                acc[tm] = acc.get(tm, 0) + tc
        return MultiPoly._raw(target, {m: c for m, c in acc.items() if c})

    def homogenize(self, degree: int | None = None, position: int = 0) -> "MultiPoly":
        """Insert a homogenizing variable at index ``position``."""
        d = self.degree() if degree is None else degree
        if self.is_zero():
            return MultiPoly.zero(self._nvars + 1)
        if d < self.degree():
            raise ValueError("target degree below the polynomial degree")
        out = {}
        for m, c in self._terms.items():
            nm = m[:position] + (d - sum(m),) + m[position:]
            out[nm] = c
        return MultiPoly._raw(self._nvars + 1, out)

    def dehomogenize(self, position: int = 0) -> "MultiPoly":
        out: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            nm = m[:position] + m[position + 1:]
            out[nm] = out.get(nm, 0) + c
        return MultiPoly._raw(self._nvars - 1, {m: c for m, c in out.items() if c})

    def extend(self, nvars: int, positions: Sequence[int] | None = None) -> "MultiPoly":
        """Embed into a ring with more variables (variable i goes to positions[i])."""
        positions = list(range(self._nvars)) if positions is None else list(positions)
        out = {}
        for m, c in self._terms.items():
            nm = [0] * nvars
            for i, e in enumerate(m):
                nm[positions[i]] = e
            out[tuple(nm)] = c
        return MultiPoly._raw(nvars, out)

    # -- printing -----------------------------------------------------------
    def to_str(self, names: Sequence[str] | None = None) -> str:
        names = list(names) if names is not None else [f"x{i}" for i in range(self._nvars)]
        if len(names) != self._nvars:
            raise ValueError("name list does not match nvars")
        if not self._terms:
            return "0"
        parts = []
        for idx, (m, c) in enumerate(self.sorted_terms()):
            factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e]
            a = abs(c)
            if not factors:
                body = str(a)
            elif a == 1:
                body = "*".join(factors)
            else:
                body = f"{a}*" + "*".join(factors)
            if idx == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"MultiPoly({self._nvars}, {self.to_str()!r})"


def poly_mul(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    if p.nvars != q.nvars:
        raise ValueError(f"variable-count mismatch: {p.nvars} vs {q.nvars}")
    return p * q


def poly_eval(p: MultiPoly, point: Sequence) -> Fraction:
    return p.eval(point)


def poly_sum(polys: Iterable[MultiPoly], nvars: int) -> MultiPoly:
    acc: dict[Monomial, Fraction] = {}
    for p in polys:
        for m, c in p.terms.items():
            acc[m] = acc.get(m, 0) + c
    return MultiPoly._raw(nvars, {m: c for m, c in acc.items() if c})

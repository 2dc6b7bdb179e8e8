"""Univariate polynomials over Q as coefficient tuples (constant term first).

Everything here is exact: root locations are bracketed by bisection on
rational points, with sign decisions made by Sturm sequences (real roots) or
the Schur-Cohn reduction (roots inside a disk).
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import comb, gcd, isqrt, lcm
from typing import Sequence

Coeffs = tuple[Fraction, ...]


class NoRealRoot(ValueError):
    pass


class Uncertifiable(ArithmeticError):
    """A root lies too close to a decision boundary to certify."""


def normalize(p: Sequence) -> Coeffs:
    out = [Fraction(c) for c in p]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def degree(p: Sequence) -> int:
    return len(normalize(p)) - 1


def to_integer(p: Sequence) -> tuple[int, ...]:
    """Primitive integer multiple with positive leading coefficient."""
    p = normalize(p)
    if not p:
        return ()
    den = reduce(lcm, (c.denominator for c in p))
    ints = [int(c * den) for c in p]
    g = reduce(gcd, ints)
    if ints[-1] < 0:
        g = -g
    return tuple(c // g for c in ints)


def evaluate(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p: Sequence) -> Coeffs:
    return normalize([i * c for i, c in enumerate(p)][1:])


def divmod_poly(a: Sequence, b: Sequence) -> tuple[Coeffs, Coeffs]:
    a, b = list(normalize(a)), normalize(b)
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lb = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] / lb
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return normalize(q), normalize(a)


def poly_gcd(a: Sequence, b: Sequence) -> Coeffs:
    a, b = normalize(a), normalize(b)
    while b:
        a, b = b, divmod_poly(a, b)[1]
    if not a:
        return a
    return tuple(c / a[-1] for c in a)


def squarefree(p: Sequence) -> Coeffs:
    p = normalize(p)
    g = poly_gcd(p, derivative(p))
    if len(g) <= 1:
        return p
    return divmod_poly(p, g)[0]


def multiply(a: Sequence, b: Sequence) -> Coeffs:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return normalize(out)


def cauchy_bound(p: Sequence) -> Fraction:
    """Every complex root has modulus strictly below this bound."""
    p = normalize(p)
    lc = abs(p[-1])
    return 1 + max((abs(c) / lc for c in p[:-1]), default=Fraction(0))


# -- real roots -------------------------------------------------------------

def sturm_sequence(p: Sequence) -> list[Coeffs]:
    p = squarefree(p)
    seq = [p, derivative(p)]
    while seq[-1] and len(seq[-1]) > 1:
        r = divmod_poly(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append(tuple(-c for c in r))
    return [s for s in seq if s]


def _sign_changes(seq: list[Coeffs], x) -> int:
    signs = []
    for s in seq:
        v = evaluate(s, x)
        if v:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(p: Sequence, lo, hi, seq: list[Coeffs] | None = None) -> int:
    """Number of distinct real roots in the half-open interval (lo, hi]."""
    seq = seq or sturm_sequence(p)
    return _sign_changes(seq, Fraction(lo)) - _sign_changes(seq, Fraction(hi))


def largest_real_root_bracket(p: Sequence, tol) -> tuple[Fraction, Fraction]:
    """Rational (lo, hi] containing the largest real root, with hi - lo <= tol."""
    p = normalize(p)
    if len(p) < 2:
        raise NoRealRoot("constant polynomial has no roots")
    seq = sturm_sequence(p)
    b = cauchy_bound(p)
    if count_real_roots(p, -b, b, seq) == 0:
        raise NoRealRoot("polynomial has no real root")
    lo, hi = -b, b
    tol = Fraction(tol)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if _sign_changes(seq, mid) - _sign_changes(seq, hi) > 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


# -- roots inside a disk ----------------------------------------------------

def _scaled_integer(p: Sequence, r: Fraction) -> list[int]:
    """Integer multiple of p(r z)."""
    ip = to_integer(p)
    n = len(ip) - 1
    u, v = r.numerator, r.denominator
    return [c * u**k * v ** (n - k) for k, c in enumerate(ip)]


def _count_unit_disk(q: list[int]) -> int | None:
    """Zeros of q strictly inside |z| < 1, or None if the reduction degenerates.

    Schur-Cohn step: T q = (a_n q - a_0 q*) / z has degree n - 1 whenever
    a_n^2 != a_0^2.  If a_n^2 > a_0^2, q has one more zero inside than T q;
    otherwise q has one more zero outside than T q has inside.  A zero on the
    circle forces a degenerate step somewhere along the chain.
    """
    count = 0
    while True:
        n = len(q) - 1
        if n <= 0:
            return count
        if q[0] == 0:
            q = q[1:]
            count += 1
            continue
        a0, an = q[0], q[-1]
        gamma = an * an - a0 * a0
        if gamma == 0:
            return None
        rev = q[::-1]
        t = [an * q[k] - a0 * rev[k] for k in range(1, n + 1)]
        g = reduce(gcd, t)
        t = [c // g for c in t]
        if gamma > 0:
            count += 1
            q = t
        else:
            # count_in(q) = n - 1 - count_in(t); flip bookkeeping via recursion
            inner = _count_unit_disk(t)
            if inner is None:
                return None
            return count + (n - 1 - inner)


def count_in_disk(p: Sequence, r) -> int | None:
    """Zeros (with multiplicity) of p with |z| < r, None if undecidable at exactly r."""
    r = Fraction(r)
    if r <= 0:
        return 0
    return _count_unit_disk(_scaled_integer(p, r))


def _robust_count(p: Sequence, r: Fraction, width: Fraction) -> tuple[int, Fraction]:
    """Count at r, nudging r within ``width`` when the reduction degenerates."""
    c = count_in_disk(p, r)
    j = 1
    while c is None:
        for cand in (r + width * Fraction(j, 4096), r - width * Fraction(j, 4096)):
            c = count_in_disk(p, cand)
            if c is not None:
                return c, cand
        j += 1
    return c, r


def modulus_bracket(p: Sequence, k: int, tol) -> tuple[Fraction, Fraction]:
    """Bracket [lo, hi] around the k-th smallest root modulus (k = 1..deg)."""
    p = normalize(p)
    n = len(p) - 1
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}")
    zeros_at_origin = next(i for i, c in enumerate(p) if c != 0)
    if k <= zeros_at_origin:
        return Fraction(0), Fraction(0)
    lo, hi = Fraction(0), cauchy_bound(p)
    tol = Fraction(tol)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        c, used = _robust_count(p, mid, (hi - lo) / 4)
        if c >= k:
            hi = used
        else:
            lo = used
    return lo, hi


def spectral_radius_bracket(p: Sequence, tol) -> tuple[Fraction, Fraction]:
    return modulus_bracket(p, degree(p), tol)


def root_moduli(p: Sequence, tol) -> list[tuple[Fraction, Fraction]]:
    """Certified brackets of all root moduli, ascending, with multiplicity."""
    n = degree(p)
    return [modulus_bracket(p, k, tol) for k in range(1, n + 1)]


# -- irreducibility over Q (degree <= 4) ----------------------------------------

def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def rational_roots(p: Sequence) -> list[Fraction]:
    ip = to_integer(p)
    if not ip:
        return []
    roots = []
    if ip[0] == 0:
        roots.append(Fraction(0))
        while ip and ip[0] == 0:
            ip = ip[1:]
    if len(ip) < 2:
        return roots
    for num in _divisors(ip[0]):
        for den in _divisors(ip[-1]):
            for s in (1, -1):
                x = Fraction(s * num, den)
                if x not in roots and evaluate(ip, x) == 0:
                    roots.append(x)
    return sorted(roots)


def is_irreducible(p: Sequence) -> bool | None:
    """Irreducibility over Q for degree <= 4; None (undecided) above that."""
    ip = to_integer(p)
    n = len(ip) - 1
    if n < 1:
        raise ValueError("constant polynomial")
    if n == 1:
        return True
    if n > 4:
        return None
    if rational_roots(ip):
        return False
    if n <= 3:
        return True
    if ip[-1] == 1:
        return not _monic_quartic_splits(ip)
    # degree 4 without linear factors: look for a quadratic factor c t^2 + u t + v
    norm2 = isqrt(sum(c * c for c in ip)) + 1
    bound = comb(2, 1) * norm2 * abs(ip[-1])
    for c in _divisors(ip[-1]):
        for v_abs in _divisors(ip[0]):
            for v in (v_abs, -v_abs):
                for u in range(-bound, bound + 1):
                    _, rem = divmod_poly(ip, (v, u, c))
                    if not rem:
                        return False
    return True


def _monic_quartic_splits(ip: Sequence[int]) -> bool:
    """Whether t^4 + a3 t^3 + a2 t^2 + a1 t + a0 = (t^2 + u t + v)(t^2 + u' t + v')."""
    a0, a1, a2, a3 = ip[0], ip[1], ip[2], ip[3]
    for v_abs in _divisors(a0):
        for v in (v_abs, -v_abs):
            w = a0 // v
            if w != v:
                num, den = a1 - a3 * v, w - v
                if num % den:
                    continue
                candidates = [num // den]
            else:
                if a1 != a3 * v:
                    continue
                disc = a3 * a3 - 4 * (a2 - 2 * v)
                if disc < 0 or isqrt(disc) ** 2 != disc:
                    continue
                s = isqrt(disc)
                candidates = [(a3 + s) // 2, (a3 - s) // 2] if (a3 + s) % 2 == 0 else []
            for u in candidates:
                u2 = a3 - u
                if v + w + u * u2 == a2 and u * w + u2 * v == a1:
                    return True
    return False

"""Multivariate gcd over Q.

Recursive scheme: view a polynomial as univariate in its last active variable
with coefficients in the remaining variables, split off the content (a gcd
of coefficients, computed recursively), and run a subresultant polynomial
remainder sequence on the primitive parts.

Cost: the subresultant PRS keeps coefficient growth polynomial, but each
pseudo-remainder step multiplies full multivariate coefficients, so cost
grows roughly with (terms * degree)^2 per step.  Inputs beyond a few hundred
in degree or tens of thousands of terms fall off a cliff; the flint backend
(see :mod:`adlab.exact.flint_backend`) covers that range.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import MultiPoly


def _as_univariate(p: MultiPoly, k: int) -> dict[int, MultiPoly]:
    """Coefficients of p in x_k (each coefficient free of x_k)."""
    buckets: dict[int, dict] = {}
    for m, c in p.terms.items():
        e = m[k]
        stripped = m[:k] + (0,) + m[k + 1:]
        buckets.setdefault(e, {})[stripped] = c
    return {e: MultiPoly(p.nvars, t) for e, t in buckets.items()}


def _from_univariate(coeffs: dict[int, MultiPoly], k: int, nvars: int) -> MultiPoly:
    out = {}
    for e, c in coeffs.items():
        for m, v in c.terms.items():
            nm = m[:k] + (e,) + m[k + 1:]
            out[nm] = v
    return MultiPoly(nvars, out)


def _udeg(u: dict[int, MultiPoly]) -> int:
    return max(u) if u else -1


def _lc(u: dict[int, MultiPoly]) -> MultiPoly:
    return u[max(u)]


def _prem(a: dict[int, MultiPoly], b: dict[int, MultiPoly], nvars: int) -> dict[int, MultiPoly]:
    """Pseudo-remainder of a by b: lc(b)^(deg a - deg b + 1) * a mod b."""
    da, db = _udeg(a), _udeg(b)
    lcb = _lc(b)
    r = dict(a)
    for _ in range(da - db + 1):
        dr = _udeg(r)
        if dr < db:
            # keep the power of lc(b) exact even when r drops early
            r = {e: c * lcb for e, c in r.items()}
            continue
        lcr = r[dr]
        new = {e: c * lcb for e, c in r.items() if e != dr}
        shift = dr - db
        for e, c in b.items():
            if e == db:
                continue
            t = new.get(e + shift, MultiPoly.zero(nvars)) - lcr * c
            if t:
                new[e + shift] = t
            else:
                new.pop(e + shift, None)
        r = new
    return r


def _content_in(p: MultiPoly, k: int) -> MultiPoly:
    coeffs = _as_univariate(p, k)
    g = MultiPoly.zero(p.nvars)
    for c in sorted(coeffs.values(), key=len):
        g = _gcd(g, c, k - 1)
        if g.is_constant():
            return MultiPoly.one(p.nvars)
    return g


def _last_var(p: MultiPoly, q: MultiPoly, k: int) -> int:
    used = p.variables_used() | q.variables_used()
    used = [i for i in used if i <= k]
    return max(used) if used else -1


def _gcd(p: MultiPoly, q: MultiPoly, k: int) -> MultiPoly:
    """gcd of p and q, both involving only x_0..x_k; normalized primitive."""
    n = p.nvars
    if p.is_zero():
        return q.primitive()
    if q.is_zero():
        return p.primitive()
    if p.is_constant() or q.is_constant():
        return MultiPoly.one(n)

    # pull out the common monomial factor first: cheap and very common here
    mp, mq = p.monomial_content(), q.monomial_content()
    mono = tuple(min(a, b) for a, b in zip(mp, mq))
    if any(mp) or any(mq):
        g = _gcd(p.shift(mp, -1), q.shift(mq, -1), k)
        return g.shift(mono) if any(mono) else g

    k = _last_var(p, q, k)
    if k < 0:
        return MultiPoly.one(n)

    cp, cq = _content_in(p, k), _content_in(q, k)
    pp, qp = p.exact_div(cp), q.exact_div(cq)
    c = _gcd(cp, cq, k - 1)

    a, b = _as_univariate(pp, k), _as_univariate(qp, k)
    if _udeg(a) == 0 or _udeg(b) == 0:
        return c.primitive()
    if _udeg(a) < _udeg(b):
        a, b = b, a

    # subresultant PRS (Collins / Brown)
    g = MultiPoly.one(n)
    h = MultiPoly.one(n)
    while True:
        delta = _udeg(a) - _udeg(b)
        r = _prem(a, b, n)
        if not r:
            break
        if _udeg(r) == 0:
            return c.primitive()
        divisor = g * h**delta
        a, b = b, {e: v.exact_div(divisor) for e, v in r.items()}
        g = _lc(a)
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = (g**delta).exact_div(h ** (delta - 1))
    last = _from_univariate(b, k, n)
    last = last.exact_div(_content_in(last, k))
    return (c * last).primitive()


def poly_gcd(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Greatest common divisor, integer content 1 and positive leading coefficient."""
    if p.nvars != q.nvars:
        raise ValueError(f"variable-count mismatch: {p.nvars} vs {q.nvars}")
    if p.is_zero() and q.is_zero():
        raise ValueError("gcd of two zero polynomials is undefined")
    return _gcd(p, q, p.nvars - 1)


def poly_gcd_many(polys) -> MultiPoly:
    polys = sorted((p for p in polys if not p.is_zero()), key=len)
    if not polys:
        raise ValueError("gcd of zero polynomials is undefined")
    g = polys[0].primitive()
    for p in polys[1:]:
        if g.is_constant():
            break
        g = poly_gcd(g, p)
    return g


def rational_content_unit(p: MultiPoly) -> Fraction:
    """Scalar turning p into its primitive normal form (p == unit * p.primitive())."""
    c = p.content()
    return -c if p.leading_coefficient() < 0 else c

from fractions import Fraction

import sympy
from hypothesis import settings, strategies as st

from adlab.exact import MultiPoly

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

NAMES3 = ["x0", "x1", "x2"]
SYMS3 = sympy.symbols(NAMES3)


def small_poly(nvars=3, max_terms=8, max_exp=3, coef=5):
    mono = st.tuples(*[st.integers(0, max_exp) for _ in range(nvars)])
    c = st.fractions(min_value=-coef, max_value=coef, max_denominator=3)
    return st.dictionaries(mono, c, max_size=max_terms).map(lambda d: MultiPoly(nvars, d))


def nonzero_poly(**kw):
    return small_poly(**kw).filter(lambda p: not p.is_zero())


def to_sympy(p: MultiPoly, syms=SYMS3):
    expr = sympy.Integer(0)
    for m, c in p.terms.items():
        t = sympy.Rational(c.numerator, c.denominator)
        for s, e in zip(syms, m):
            t *= s**e
        expr += t
    return sympy.expand(expr)


def from_sympy(expr, syms=SYMS3) -> MultiPoly:
    poly = sympy.Poly(sympy.expand(expr), *syms)
    return MultiPoly(len(syms), {m: Fraction(int(c.p), int(c.q)) for m, c in poly.terms()})



def numeric_roots(p, digits=40):
    """All complex roots of p (constant first) with multiplicity.

    mpmath's polyroots stalls on repeated roots, so it is run on each
    squarefree factor from sympy and the roots are repeated.
    """
    import mpmath
    t = sympy.Symbol("t")
    _, factors = sympy.sqf_list(sympy.Poly(list(reversed([int(c) for c in p])), t))
    out = []
    with mpmath.workdps(digits):
        for f, mult in factors:
            coeffs = [int(c) for c in f.all_coeffs()]
            if len(coeffs) < 2:
                continue
            roots = mpmath.polyroots(coeffs, maxsteps=500, extraprec=4 * digits)
            out.extend(r for r in roots for _ in range(mult))
    return out

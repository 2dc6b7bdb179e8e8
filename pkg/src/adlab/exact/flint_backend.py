"""Bridge to python-flint's ``fmpq_mpoly`` for composition-heavy workloads.

The pure-Python :class:`~adlab.exact.poly.MultiPoly` is the reference
implementation.  Iterating maps to degree 100+ needs compiled multiplication
and gcd, so :class:`DehomogenizedIterator` keeps iterates in flint.

Iterates are stored dehomogenized (x0 = 1) together with their formal
degree.  For homogeneous H_i = x0^v_i * hom(h_i), the gcd is
x0^min(v_i) * hom(gcd(h_i)), which keeps one variable out of every product.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .poly import MultiPoly

try:
    import flint
except ImportError:  # pragma: no cover - exercised only without the dependency
    flint = None


def available() -> bool:
    return flint is not None


@lru_cache(maxsize=None)
def context(nvars: int):
    if flint is None:
        raise RuntimeError("python-flint is not installed")
    return flint.fmpq_mpoly_ctx.get(tuple(f"v{i}" for i in range(nvars)), "deglex")


def to_flint(p: MultiPoly):
    ctx = context(p.nvars)
    return ctx.from_dict({m: flint.fmpq(c.numerator, c.denominator) for m, c in p.terms.items()})


def from_flint(fp, nvars: int) -> MultiPoly:
    terms = {}
    for m, c in fp.to_dict().items():
        q = flint.fmpq(c)
        terms[tuple(int(e) for e in m)] = Fraction(int(q.p), int(q.q))
    return MultiPoly(nvars, terms)


def gcd_many(polys):
    nonzero = sorted((p for p in polys if not p.is_zero()), key=len)
    g = nonzero[0]
    for p in nonzero[1:]:
        if g.total_degree() <= 0:
            break
        g = g.gcd(p)
    return g


def compose_normalized(f: Sequence[MultiPoly], g: Sequence[MultiPoly]) -> list[MultiPoly]:
    """f o g with the common factor removed (scalar normalization left to the caller)."""
    n = g[0].nvars
    ctx = context(n)
    fg = [to_flint(p) for p in g]
    comp = [to_flint(p).compose(*fg, ctx=ctx) for p in f]
    gg = gcd_many(comp)
    if gg.total_degree() > 0:
        comp = [c / gg for c in comp]
    return [from_flint(c, n) for c in comp]


class DehomogenizedIterator:
    """Iterates f, f^2, f^3, ... of a homogeneous map, kept in coprime form."""

    def __init__(self, coords: Sequence[MultiPoly]):
        self.nvars = coords[0].nvars
        if self.nvars < 2:
            raise ValueError("need a map of P^N with N >= 1")
        self.d = int(coords[0].degree())
        self.f = [to_flint(p) for p in coords]
        ctx = context(self.nvars - 1)
        gens = ctx.gens()
        self.ctx = ctx
        self.g = [ctx.from_dict({(0,) * (self.nvars - 1): 1}), *gens]
        self.D = 1
        self.n = 0

    def term_count(self) -> int:
        return max(len(p) for p in self.g)

    def step(self) -> int:
        comp = [p.compose(*self.g, ctx=self.ctx) for p in self.f]
        D = self.d * self.D
        vals = [D - int(c.total_degree()) for c in comp if not c.is_zero()]
        gg = gcd_many(comp)
        drop = min(vals)
        if gg.total_degree() > 0:
            comp = [c / gg for c in comp]
            drop += int(gg.total_degree())
        self.g = comp
        self.D = D - drop
        self.n += 1
        return self.D

    def homogeneous(self) -> list[MultiPoly]:
        out = []
        for c in self.g:
            p = from_flint(c, self.nvars - 1)
            out.append(p.homogenize(self.D) if not p.is_zero() else MultiPoly.zero(self.nvars))
        return out

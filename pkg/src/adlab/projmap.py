"""Rational self-maps of projective space P^N over Q.

A map is stored as N+1 homogeneous forms of a common degree, in coprime
normal form: the polynomial gcd of the coordinates is divided out, the
coefficients are coprime integers, and the first nonzero coordinate has a
positive leading coefficient.  ``compose(f, g)`` means "apply g first".
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd, lcm
from typing import Sequence

import gmpy2

from .exact import flint_backend
from .exact.gcd import poly_gcd_many
from .exact.parse import poly_parse
from .exact.poly import MultiPoly

DEFAULT_TERM_CAP = 5_000_000


class MapError(ValueError):
    pass


class ResourceLimitExceeded(RuntimeError):
    """A coordinate outgrew the term cap; ``partial`` holds what was computed."""

    def __init__(self, message: str, partial=None, failed_at: int | None = None):
        super().__init__(message)
        self.partial = partial
        self.failed_at = failed_at


class _Indeterminate:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INDETERMINATE"

    def __bool__(self) -> bool:
        return False


INDETERMINATE = _Indeterminate()


def default_names(dim: int) -> list[str]:
    return [f"x{i}" for i in range(dim + 1)]


# -- points -------------------------------------------------------------------

def _canonical_ints(values) -> tuple:
    """Divide by the gcd and make the first nonzero entry positive (mpz-aware)."""
    vals = [gmpy2.mpz(v) for v in values]
    g = gmpy2.mpz(0)
    for v in vals:
        g = gmpy2.gcd(g, v)
        if g == 1:
            break
    if g == 0:
        raise ValueError("all coordinates are zero")
    first = next(v for v in vals if v)
    if first < 0:
        g = -g
    if g != 1:
        vals = [v // g for v in vals]
    return tuple(vals)


@dataclass(frozen=True)
class ProjPoint:
    """A rational point of P^N with coprime integer coordinates."""

    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) < 2:
            raise ValueError("a point of P^N needs at least two coordinates")
        canon = tuple(int(v) for v in _canonical_ints(self.coords))
        object.__setattr__(self, "coords", canon)

    @classmethod
    def of(cls, *coords) -> "ProjPoint":
        if len(coords) == 1 and not isinstance(coords[0], (int, Fraction)):
            coords = tuple(coords[0])
        if any(isinstance(c, Fraction) and c.denominator != 1 for c in coords):
            den = reduce(lcm, (Fraction(c).denominator for c in coords))
            coords = tuple(int(Fraction(c) * den) for c in coords)
        return cls(tuple(int(c) for c in coords))

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __iter__(self):
        return iter(self.coords)

    def __str__(self) -> str:
        return "[" + " : ".join(str(c) for c in self.coords) + "]"


# -- maps ----------------------------------------------------------------------

def _normalize_coords(coords: Sequence[MultiPoly], backend: str = "python") -> list[MultiPoly]:
    if all(c.is_zero() for c in coords):
        raise MapError("all coordinates are zero")
    if backend == "skip":
        pass
    elif backend == "flint":
        ctx_polys = [flint_backend.to_flint(c) for c in coords]
        g = flint_backend.gcd_many(ctx_polys)
        if g.total_degree() > 0:
            coords = [flint_backend.from_flint(c / g, coords[0].nvars) for c in ctx_polys]
    else:
        g = poly_gcd_many(coords)
        if not g.is_constant():
            coords = [c.exact_div(g) for c in coords]
    # joint scalar normalization: coprime integers, positive lead of first nonzero coordinate
    coeffs = [c for p in coords for c in p.terms.values()]
    den = reduce(lcm, (c.denominator for c in coeffs))
    num = reduce(gcd, (c.numerator for c in coeffs))
    scale = Fraction(den, num)
    first = next(p for p in coords if not p.is_zero())
    if first.leading_coefficient() < 0:
        scale = -scale
    return [c.scale(scale) for c in coords]


class ProjMap:
    """Dominant rational self-map of P^N given by coprime homogeneous forms."""

    def __init__(self, coords: Sequence[MultiPoly], names: Sequence[str] | None = None,
                 normalize: bool = True, backend: str = "python"):
        coords = list(coords)
        if len(coords) < 2:
            raise MapError("a map of P^N needs at least two coordinates")
        n = len(coords)
        if any(c.nvars != n for c in coords):
            raise MapError(f"each coordinate must be a form in {n} variables")
        for i, c in enumerate(coords):
            if not c.is_homogeneous():
                raise MapError(f"coordinate {i} is not homogeneous")
        if normalize:
            coords = _normalize_coords(coords, backend)
        degs = {c.degree() for c in coords if not c.is_zero()}
        if len(degs) != 1:
            raise MapError(f"coordinates have mixed degrees {sorted(degs)}")
        d = degs.pop()
        if d < 1:
            raise MapError("a map of degree 0 is constant, not dominant")
        self._coords = tuple(coords)
        self._degree = int(d)
        self.names = tuple(names) if names is not None else tuple(default_names(n - 1))
        if len(self.names) != n:
            raise MapError("variable name list does not match the dimension")

    @property
    def coords(self) -> tuple[MultiPoly, ...]:
        return self._coords

    @property
    def dim(self) -> int:
        return len(self._coords) - 1

    @property
    def degree(self) -> int:
        return self._degree

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjMap):
            return NotImplemented
        return self._coords == other._coords

    def __hash__(self) -> int:
        return hash(self._coords)

    def __repr__(self) -> str:
        return "ProjMap[" + " : ".join(c.to_str(self.names) for c in self._coords) + "]"

    def term_count(self) -> int:
        return max(len(c) for c in self._coords)

    @classmethod
    def identity(cls, dim: int) -> "ProjMap":
        n = dim + 1
        return cls([MultiPoly.var(n, i) for i in range(n)])

    def strings(self) -> list[str]:
        return [c.to_str(self.names) for c in self._coords]

    def to_json(self) -> dict:
        return {"dim": self.dim, "vars": list(self.names), "coords": self.strings()}

    def height_constant(self) -> float:
        """log(#monomials * max |coefficient|), the additive constant in h(f(x)) <= d h(x) + C."""
        import math
        nterms = max(len(c) for c in self._coords)
        maxc = max(abs(v) for c in self._coords for v in c.terms.values())
        return math.log(nterms * maxc)

    @cached_property
    def _compiled(self):
        out = []
        for c in self._coords:
            out.append([(gmpy2.mpz(v.numerator), m) for m, v in c.terms.items()])
        return out

    def evaluate_raw(self, coords: Sequence) -> list:
        """Coordinates of f at an integer vector, before gcd removal (mpz)."""
        pts = [gmpy2.mpz(v) for v in coords]
        cache: dict[tuple[int, int], object] = {}

        def pw(i: int, e: int):
            key = (i, e)
            val = cache.get(key)
            if val is None:
                if e == 1:
                    val = pts[i]
                elif e % 2 == 0:
                    half = pw(i, e // 2)
                    val = half * half
                else:
                    val = pw(i, e - 1) * pts[i]
                cache[key] = val
            return val

        result = []
        for terms in self._compiled:
            acc = gmpy2.mpz(0)
            for coef, m in terms:
                t = coef
                for i, e in enumerate(m):
                    if e:
                        t = t * pw(i, e)
                acc += t
            result.append(acc)
        return result


def map_parse(texts: Sequence[str], variables: Sequence[str] | None = None) -> ProjMap:
    """Build a map from N+1 coordinate expressions (divides out their gcd)."""
    variables = list(variables) if variables is not None else default_names(len(texts) - 1)
    if len(texts) != len(variables):
        raise MapError(f"{len(texts)} coordinates given for {len(variables)} variables")
    return ProjMap([poly_parse(t, variables) for t in texts], names=variables)


def affine_lift(exprs: Sequence[str] | Sequence[MultiPoly], variables: Sequence[str] | None = None,
                names: Sequence[str] | None = None) -> ProjMap:
    """Extend a polynomial self-map of A^N to P^N via y_i = x_i / x0."""
    n = len(exprs)
    variables = list(variables) if variables is not None else [f"y{i}" for i in range(1, n + 1)]
    if len(variables) != n:
        raise MapError(f"{n} expressions given for {len(variables)} affine variables")
    polys = [poly_parse(e, variables) if isinstance(e, str) else e for e in exprs]
    d = max(max(int(p.degree()) if not p.is_zero() else 0 for p in polys), 1)
    coords = [MultiPoly.var(n + 1, 0) ** d] + [p.homogenize(d, position=0) if not p.is_zero()
                                               else MultiPoly.zero(n + 1) for p in polys]
    return ProjMap(coords, names=names)


def _estimated_cost(f: ProjMap, g: ProjMap) -> int:
    return f.term_count() * g.term_count() ** f.degree


def compose(f: ProjMap, g: ProjMap, backend: str = "auto", term_cap: int = DEFAULT_TERM_CAP) -> ProjMap:
    """The map f o g (g applied first), in coprime normal form."""
    if f.dim != g.dim:
        raise MapError(f"dimension mismatch: {f.dim} vs {g.dim}")
    if backend == "auto":
        use_flint = flint_backend.available() and _estimated_cost(f, g) > 20_000
        backend = "flint" if use_flint else "python"
    if backend == "flint":
        coords = flint_backend.compose_normalized(f.coords, g.coords)
    elif backend == "python":
        coords = [c.substitute(g.coords) for c in f.coords]
    else:
        raise ValueError(f"unknown backend {backend!r}")
    biggest = max(len(c) for c in coords)
    if biggest > term_cap:
        raise ResourceLimitExceeded(f"composition has {biggest} terms (cap {term_cap})")
    return ProjMap(coords, names=g.names, backend="python" if backend == "python" else "skip")


def iterate(f: ProjMap, n: int, backend: str = "auto") -> ProjMap:
    if n < 0:
        raise ValueError("iterate count must be nonnegative")
    result = ProjMap.identity(f.dim)
    for _ in range(n):
        result = compose(f, result, backend=backend)
    return ProjMap(result.coords, names=f.names, normalize=False)


@dataclass
class DegreeSequence:
    """degs[n] = deg(f^(n+1))."""

    degs: list[int]
    truncated: bool = False
    failed_at: int | None = None
    term_counts: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.degs)

    def is_submultiplicative(self) -> bool:
        d = self.degs
        return all(d[a + b + 1] <= d[a] * d[b]
                   for a in range(len(d)) for b in range(len(d)) if a + b + 1 < len(d))


def degree_sequence(f: ProjMap, L: int, backend: str = "auto", term_cap: int = DEFAULT_TERM_CAP,
                    strict: bool = False) -> DegreeSequence:
    """deg(f^n) for n = 1..L with coprime normalization at every step.

    When an iterate exceeds ``term_cap`` terms the sequence is returned with
    ``truncated=True`` (or ResourceLimitExceeded is raised if ``strict``).
    """
    if L < 1:
        raise ValueError("L must be at least 1")
    if backend == "auto":
        backend = "flint" if flint_backend.available() else "python"
    seq = DegreeSequence(degs=[])

    def fail(n: int) -> DegreeSequence:
        seq.truncated = True
        seq.failed_at = n
        if strict:
            raise ResourceLimitExceeded(f"iterate {n} exceeded {term_cap} terms", partial=seq, failed_at=n)
        return seq

    if backend == "flint":
        it = flint_backend.DehomogenizedIterator(f.coords)
        for n in range(1, L + 1):
            d = it.step()
            terms = it.term_count()
            if terms > term_cap:
                return fail(n)
            seq.degs.append(d)
            seq.term_counts.append(terms)
        return seq
    if backend != "python":
        raise ValueError(f"unknown backend {backend!r}")
    cur = f
    for n in range(1, L + 1):
        if n > 1:
            try:
                cur = compose(f, cur, backend="python", term_cap=term_cap)
            except ResourceLimitExceeded:
                return fail(n)
        seq.degs.append(cur.degree)
        seq.term_counts.append(cur.term_count())
    return seq


def eval_point(f: ProjMap, P: ProjPoint):
    """f(P) in canonical form, or INDETERMINATE when every coordinate vanishes."""
    if f.dim != P.dim:
        raise MapError(f"dimension mismatch: map on P^{f.dim}, point in P^{P.dim}")
    vals = f.evaluate_raw(P.coords)
    if not any(vals):
        return INDETERMINATE
    return ProjPoint(tuple(int(v) for v in _canonical_ints(vals)))


def is_invariant_hypersurface(f: ProjMap, Z: MultiPoly) -> bool:
    """True iff Z divides Z o f, i.e. f maps {Z = 0} into itself."""
    if Z.is_zero():
        raise MapError("hypersurface equation must be nonzero")
    if not Z.is_homogeneous():
        raise MapError("hypersurface equation must be homogeneous")
    if Z.nvars != f.dim + 1:
        raise MapError("hypersurface lives in a different projective space")
    return Z.divides(Z.substitute(f.coords))


# -- JSON map definitions -------------------------------------------------------

def map_from_json(doc: dict) -> ProjMap:
    if "dim" not in doc:
        raise MapError("map definition needs a 'dim' field")
    dim = doc["dim"]
    if "coords" in doc:
        variables = doc.get("vars") or default_names(dim)
        if len(doc["coords"]) != dim + 1:
            raise MapError(f"'coords' must list {dim + 1} expressions")
        return map_parse(doc["coords"], variables)
    if "affine" in doc:
        if len(doc["affine"]) != dim:
            raise MapError(f"'affine' must list {dim} expressions")
        return affine_lift(doc["affine"], doc.get("vars"))
    raise MapError("map definition needs 'coords' or 'affine'")


def load_map(path: str) -> ProjMap:
    with open(path) as fh:
        return map_from_json(json.load(fh))

"""Ready-made maps: the Cremona involution and the worked examples on P^2, P^3, A^4."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .exact import MultiPoly, poly_parse
from .monomial import MonomialMap, monomial_to_projective
from .projmap import ProjMap, affine_lift, compose, map_parse


class UnknownMap(KeyError):
    pass


def _lit(q) -> str:
    q = Fraction(q)
    if q == 0:
        raise ValueError("parameter must be nonzero")
    return f"({q.numerator}/{q.denominator})" if q.denominator != 1 else f"({q.numerator})"


def cremona_sigma() -> ProjMap:
    return map_parse(["x1*x2", "x0*x2", "x0*x1"])


def bdj_g() -> ProjMap:
    """Involution conjugate to the Cremona involution by a linear change of coordinates."""
    return map_parse(["x0*(x1+x2-x0)", "x1*(x2+x0-x1)", "x2*(x0+x1-x2)"])


def bdj_h(zeta=(1, 2)) -> ProjMap:
    return monomial_to_projective(MonomialMap.from_zeta(*zeta))


def bdj_f(zeta=(1, 2)) -> ProjMap:
    """g o h with h(y1, y2) = (y1^a y2^b, y1^-b y2^a), zeta = a + b i."""
    return compose(bdj_g(), bdj_h(zeta), backend="python")


_AFFINE3 = ["x", "y", "z"]


def _gs_parts(d: int | None, b, P: str):
    Pp = poly_parse(P, ["x", "y"])
    if Pp.is_zero() or not Pp.is_homogeneous():
        raise ValueError("P must be a nonzero homogeneous polynomial in x, y")
    deg = int(Pp.degree())
    if d is None:
        d = deg
    if deg != d or d < 2:
        raise ValueError(f"P must be homogeneous of degree d >= 2 (got degree {deg}, d={d})")
    return d, Fraction(b), Pp


def gs_f_affine(d: int | None = None, b=1, P: str = "y^2") -> list[MultiPoly]:
    d, b, Pp = _gs_parts(d, b, P)
    x, y, z = (MultiPoly.var(3, i) for i in range(3))
    return [x * Pp.substitute([x, y]) + z, x ** (d + 1) + y.scale(b), x]


def gs_f_inv_affine(d: int | None = None, b=1, P: str = "y^2") -> list[MultiPoly]:
    d, b, Pp = _gs_parts(d, b, P)
    x, y, z = (MultiPoly.var(3, i) for i in range(3))
    w = (y - z ** (d + 1)).scale(1 / b)
    return [z, w, x - z * Pp.substitute([z, w])]


def gs_f(d: int | None = None, b=1, P: str = "y^2") -> ProjMap:
    """Lift of (x, y, z) -> (x P(x, y) + z, x^(d+1) + b y, x)."""
    return affine_lift(gs_f_affine(d, b, P))


def gs_f_inv(d: int | None = None, b=1, P: str = "y^2") -> ProjMap:
    return affine_lift(gs_f_inv_affine(d, b, P))


def _check_nonzero(**params) -> None:
    for k, v in params.items():
        if Fraction(v) == 0:
            raise ValueError(f"parameter {k} must be nonzero")


def cg_f(alpha=1, a=1) -> ProjMap:
    """Lift of (x, y, z) -> (alpha x y + a z, y^2 + x, y)."""
    _check_nonzero(alpha=alpha, a=a)
    return affine_lift([f"{_lit(alpha)}*x*y + {_lit(a)}*z", "y^2 + x", "y"], _AFFINE3)


def cg_f_inv(alpha=1, a=1) -> ProjMap:
    _check_nonzero(alpha=alpha, a=a)
    al, ai = _lit(alpha), _lit(1 / Fraction(a))
    return affine_lift(["y - z^2", "z", f"{ai}*(x - {al}*(y - z^2)*z)"], _AFFINE3)


def cg_g(beta=1, b=1) -> ProjMap:
    """Lift of (x, y, z) -> (x^2 - x z + y, beta z, b x)."""
    _check_nonzero(beta=beta, b=b)
    return affine_lift([f"x^2 - x*z + y", f"{_lit(beta)}*z", f"{_lit(b)}*x"], _AFFINE3)


def cg_g_inv(beta=1, b=1) -> ProjMap:
    _check_nonzero(beta=beta, b=b)
    bi, bbi = _lit(1 / Fraction(b)), _lit(1 / (Fraction(b) * Fraction(beta)))
    bi2 = _lit(1 / Fraction(b) ** 2)
    return affine_lift([f"{bi}*z", f"x - {bi2}*z^2 + {bbi}*y*z", f"{_lit(1 / Fraction(beta))}*y"],
                       _AFFINE3)


BHT_VARS = ["x1", "x2", "x3", "x4"]
BHT_F_EXPRS = ["x2", "-x4", "x1 - x1*x2^2", "-x3 + x1*x2*x4"]
BHT_PHI_EXPR = "x1*x4 - x2*x3"


def bht_F() -> ProjMap:
    return affine_lift(BHT_F_EXPRS, BHT_VARS, names=["z", *BHT_VARS])


def bht_phi() -> MultiPoly:
    return poly_parse(BHT_PHI_EXPR, BHT_VARS)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str
    build: Callable
    defaults: dict = field(default_factory=dict)
    kind: str = "map"

    def make(self, **params):
        merged = dict(self.defaults)
        unknown = set(params) - set(merged)
        if unknown:
            raise TypeError(f"{self.name} does not take parameters {sorted(unknown)}")
        merged.update(params)
        return self.build(**merged)


_ENTRIES = [
    CatalogEntry("cremona_sigma", "standard Cremona involution [x1x2 : x0x2 : x0x1] on P^2", cremona_sigma),
    CatalogEntry("bdj_g", "quadratic involution of P^2 conjugate to the Cremona involution", bdj_g),
    CatalogEntry("bdj_h", "monomial map of zeta = a + b i lifted to P^2", bdj_h, {"zeta": [1, 2]}),
    CatalogEntry("bdj_f", "g o h on P^2 for the monomial map of zeta = a + b i", bdj_f, {"zeta": [1, 2]}),
    CatalogEntry("gs_f", "P^3 lift of (x P(x,y) + z, x^(d+1) + b y, x)", gs_f, {"d": None, "b": 1, "P": "y^2"}),
    CatalogEntry("gs_f_inv", "inverse of gs_f", gs_f_inv, {"d": None, "b": 1, "P": "y^2"}),
    CatalogEntry("cg_f", "P^3 lift of (alpha x y + a z, y^2 + x, y)", cg_f, {"alpha": 1, "a": 1}),
    CatalogEntry("cg_f_inv", "inverse of cg_f", cg_f_inv, {"alpha": 1, "a": 1}),
    CatalogEntry("cg_g", "P^3 lift of (x^2 - x z + y, beta z, b x)", cg_g, {"beta": 1, "b": 1}),
    CatalogEntry("cg_g_inv", "inverse of cg_g", cg_g_inv, {"beta": 1, "b": 1}),
    CatalogEntry("bht_F", "P^4 lift of the A^4 map preserving the fibres of x1 x4 - x2 x3", bht_F),
    CatalogEntry("bht_phi", "invariant function x1 x4 - x2 x3 on A^4", bht_phi, kind="function"),
]
_BY_NAME = {e.name: e for e in _ENTRIES}


def builtin_catalog() -> list[CatalogEntry]:
    return list(_ENTRIES)


def get(name: str, **params):
    try:
        entry = _BY_NAME[name]
    except KeyError:
        raise UnknownMap(f"unknown catalog map {name!r}; known: {', '.join(sorted(_BY_NAME))}") from None
    if "zeta" in params:
        params["zeta"] = tuple(params["zeta"])
    return entry.make(**params)


def entry_json(name: str, **params) -> dict:
    """JSON definition that map_from_json (or function_from_json) rebuilds exactly."""
    obj = get(name, **params)
    if isinstance(obj, MultiPoly):
        return {"vars": BHT_VARS, "poly": obj.to_str(BHT_VARS)}
    return obj.to_json()


def function_from_json(doc: dict) -> MultiPoly:
    return poly_parse(doc["poly"], doc["vars"])

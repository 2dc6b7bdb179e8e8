"""Monomial self-maps given by nonsingular integer matrices.

Row i of the matrix holds the exponents of the i-th output coordinate, so
on P^2 the Gaussian integer a + bi gives h(y1, y2) = (y1^a y2^b, y1^-b y2^a).
Dynamical degrees are spectral radii of the exterior powers of the matrix,
computed from exact characteristic polynomials and certified root-modulus
brackets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .exact import upoly
from .exact.poly import MultiPoly
from .exact.upoly import Uncertifiable
from .interval import Approx
from .projmap import ProjMap

Matrix = tuple[tuple[int, ...], ...]

CERT_MARGIN = Fraction(1, 10**9)


class SingularMatrix(ValueError):
    pass


# -- integer matrices ---------------------------------------------------------

def as_matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    m = tuple(tuple(int(v) for v in row) for row in rows)
    n = len(m)
    if n == 0 or any(len(row) != n for row in m):
        raise ValueError("matrix must be square and nonempty")
    return m


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def matpow(m: Matrix, k: int) -> Matrix:
    """Exact power by repeated squaring."""
    if k < 0:
        raise ValueError("negative matrix power")
    result = identity(len(m))
    base = m
    while k:
        if k & 1:
            result = matmul(result, base)
        k >>= 1
        if k:
            base = matmul(base, base)
    return result


def det(m: Sequence[Sequence[int]]) -> int:
    """Determinant by fraction-free Bareiss elimination."""
    a = [list(row) for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def exterior_power(m: Matrix, k: int) -> Matrix:
    """Matrix of k x k minors, rows/columns indexed by sorted k-subsets in lex order."""
    n = len(m)
    if not 0 <= k <= n:
        raise ValueError(f"exterior power {k} of a {n}x{n} matrix")
    subsets = list(combinations(range(n), k))
    return tuple(tuple(det([[m[r][c] for c in cols] for r in rows]) for cols in subsets)
                 for rows in subsets)


def char_poly(m: Matrix) -> tuple[int, ...]:
    """det(tI - M) by Faddeev-LeVerrier; coefficients constant term first."""
    n = len(m)
    mq = [[Fraction(v) for v in row] for row in m]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    aux = [[Fraction(0)] * n for _ in range(n)]  # M_0 = 0
    for k in range(1, n + 1):
        # M_k = M * M_{k-1} + c_{n-k+1} I
        prod = [[sum(mq[i][t] * aux[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            prod[i][i] += coeffs[n - k + 1]
        aux = prod
        tr = sum(sum(mq[i][t] * aux[t][i] for t in range(n)) for i in range(n))
        coeffs[n - k] = -tr / k
    assert all(c.denominator == 1 for c in coeffs)
    return tuple(int(c) for c in coeffs)


# -- data types ---------------------------------------------------------------

@dataclass(frozen=True)
class GaussianInt:
    re: int
    im: int

    def __mul__(self, other: "GaussianInt") -> "GaussianInt":
        return GaussianInt(self.re * other.re - self.im * other.im,
                           self.re * other.im + self.im * other.re)

    def __pow__(self, k: int) -> "GaussianInt":
        out = GaussianInt(1, 0)
        for _ in range(k):
            out = out * self
        return out

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def matrix(self) -> Matrix:
        return ((self.re, self.im), (-self.im, self.re))

    def is_real(self) -> bool:
        return self.im == 0


@dataclass(frozen=True)
class MonomialMap:
    """Monomial self-map of the torus (G_m)^n with exponent matrix M, det M != 0."""

    M: Matrix

    def __post_init__(self):
        m = as_matrix(self.M)
        object.__setattr__(self, "M", m)
        if det(m) == 0:
            raise SingularMatrix("monomial map needs a matrix with nonzero determinant")

    @classmethod
    def from_zeta(cls, re: int, im: int) -> "MonomialMap":
        return cls(GaussianInt(re, im).matrix())

    @classmethod
    def from_json(cls, doc: dict) -> "MonomialMap":
        if "zeta" in doc:
            re, im = doc["zeta"]
            return cls.from_zeta(int(re), int(im))
        rows = doc["rows"]
        if "n" in doc and doc["n"] != len(rows):
            raise ValueError(f"'n' is {doc['n']} but {len(rows)} rows were given")
        return cls(as_matrix(rows))

    @property
    def n(self) -> int:
        return len(self.M)

    def power(self, k: int) -> "MonomialMap":
        return MonomialMap(matpow(self.M, k))

    def to_json(self) -> dict:
        return {"n": self.n, "rows": [list(r) for r in self.M]}


# -- degrees on P^2 -------------------------------------------------------------

def monomial_degree(M: Sequence[Sequence[int]]) -> int:
    """Degree of the coprime projective lift on P^2 of the monomial map of M."""
    (a, b), (c, d) = as_matrix(M)
    if a * d - b * c == 0:
        raise SingularMatrix("singular matrix")
    return max(0, a + b, c + d) - min(0, a, c) - min(0, b, d)


def monomial_to_projective(h: MonomialMap) -> ProjMap:
    """Coprime lift [x0^s0 x1^s1 x2^s2 : ...] clearing every negative exponent."""
    if h.n != 2:
        raise ValueError("projective lifts are implemented on P^2 only")
    (a, b), (c, d) = h.M
    # exponent vectors on (x0, x1, x2) of 1, y^row0, y^row1 with y_i = x_i / x0
    vecs = [(0, 0, 0), (-a - b, a, b), (-c - d, c, d)]
    shift = [-min(v[i] for v in vecs) for i in range(3)]
    coords = [MultiPoly.monomial([v[i] + shift[i] for i in range(3)]) for v in vecs]
    return ProjMap(coords, normalize=False)


def power_degrees(h: MonomialMap, J: int) -> list[int]:
    """deg(h^j) for j = 1..J on P^2."""
    if h.n != 2:
        raise ValueError("closed-form degrees are available on P^2 only")
    out = []
    m = h.M
    for _ in range(J):
        out.append(monomial_degree(m))
        m = matmul(m, h.M)
    return out


# -- dynamical degrees ------------------------------------------------------------

def spectral_radius(M: Matrix, tol=Fraction(1, 10**12)) -> Approx:
    n = len(M)
    if n == 0:
        return Approx.exact(1)
    lo, hi = upoly.spectral_radius_bracket(char_poly(M), tol)
    return Approx.from_bracket(lo, hi)


def dyn_degrees_monomial(h: MonomialMap, tol=Fraction(1, 10**12)) -> list[Approx]:
    """delta_1..delta_n as certified brackets; delta_n = |det M| exactly."""
    tol = Fraction(tol)
    out = []
    for k in range(1, h.n):
        out.append(spectral_radius(exterior_power(h.M, k), tol))
    out.append(Approx.exact(abs(det(h.M))))
    return out


# -- Pisot test ---------------------------------------------------------------

@dataclass
class PisotVerdict:
    is_pisot: bool
    dominant_root: Approx | None
    other_root_moduli: list[Approx]
    irreducible: bool | None
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "is_pisot": self.is_pisot,
            "dominant_root": self.dominant_root.to_json() if self.dominant_root else None,
            "other_root_moduli": [m.to_json() for m in self.other_root_moduli],
            "irreducible": self.irreducible,
            "reason": self.reason,
        }


def _certified_count(p, r: Fraction) -> int:
    c = upoly.count_in_disk(p, r)
    j = 1
    while c is None:
        # exactly-degenerate radius: any nearby radius certifies the same annulus count
        c = upoly.count_in_disk(p, r * (1 + Fraction(j, 10**12)))
        j += 1
    return c


def pisot_check(p: Sequence[int], tol=Fraction(1, 10**12), margin: Fraction = CERT_MARGIN) -> PisotVerdict:
    """Decide whether monic integer p is the minimal polynomial of a Pisot number.

    Raises Uncertifiable when some root lies within ``margin`` of the unit
    circle or of 1, where a strict inequality cannot be certified.
    """
    ip = list(p)
    while ip and ip[-1] == 0:
        ip.pop()
    n = len(ip) - 1
    if n < 1:
        raise ValueError("need a polynomial of degree >= 1")
    if any(Fraction(c).denominator != 1 for c in ip):
        raise ValueError("integer coefficients required")
    ip = [int(c) for c in ip]
    if ip[-1] == -1:
        ip = [-c for c in ip]
    moduli = [Approx.from_bracket(*b) for b in upoly.root_moduli(ip, tol)]
    if ip[-1] != 1:
        return PisotVerdict(False, None, moduli, None, "not monic: roots are not algebraic integers")
    irreducible = upoly.is_irreducible(ip)
    if irreducible is False:
        return PisotVerdict(False, None, moduli, False, "reducible over Q")

    # real roots in (1, B] by Sturm count: exact, no margin needed
    real_above = upoly.count_real_roots(ip, 1, upoly.cauchy_bound(ip))
    if real_above != 1:
        reason = "no real root greater than 1" if real_above == 0 else f"{real_above} real roots greater than 1"
        return PisotVerdict(False, None, moduli, irreducible, reason)
    dominant = Approx.from_bracket(*upoly.largest_real_root_bracket(ip, tol))
    others = moduli[:-1]

    inside = upoly.count_in_disk(ip, 1)
    if inside is None:
        # roots on or symmetric about the unit circle: fall back to the margin
        inner = _certified_count(ip, 1 - margin)
        outer = _certified_count(ip, 1 + margin)
        if inner != outer and outer >= n - 1:
            raise Uncertifiable(f"{outer - inner} root(s) within {margin} of the unit circle")
        inside = inner
    if dominant.lo <= 1 + margin:
        raise Uncertifiable("the real root above 1 lies within the certification margin")
    if inside != n - 1:
        return PisotVerdict(False, dominant, others, irreducible,
                            f"{n - inside} root(s) outside the open unit disk")
    if irreducible is None:
        # one root outside, the rest strictly inside and none at 0: a proper factor
        # would have all roots inside the disk and a nonzero integer constant term
        irreducible = ip[0] != 0
        if not irreducible:
            return PisotVerdict(False, dominant, others, False, "divisible by t")
    return PisotVerdict(True, dominant, others, irreducible, "")


@dataclass
class CohHypReport:
    pisot: PisotVerdict | None
    pisot_sign: int
    pisot_verdict: bool | None
    delta_verdict: bool
    deltas: list[Approx] = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return bool(self.pisot_verdict) == self.delta_verdict

    def to_json(self) -> dict:
        return {
            "pisot_verdict": self.pisot_verdict,
            "pisot_sign": self.pisot_sign,
            "pisot": self.pisot.to_json() if self.pisot else None,
            "delta_verdict": self.delta_verdict,
            "deltas": [d.to_json() for d in self.deltas],
            "agree": self.agree,
        }


def is_1_coh_hyp_monomial(h: MonomialMap, tol=Fraction(1, 10**12)) -> CohHypReport:
    """Pisot criterion on char(M) cross-checked against delta_1 dominance.

    The dominant eigenvalue may be negative (e.g. -M for a Pisot matrix M);
    delta_1 only sees its modulus, so the Pisot test is applied to char(M)
    and to char(-M) and either one counts.
    """
    from .dyndeg import classify

    cp = list(char_poly(h.M))
    neg = [c * (-1) ** i for i, c in enumerate(cp)]
    if len(cp) % 2 == 0:  # odd degree: keep the polynomial monic
        neg = [-c for c in neg]
    verdict, sign, used, undecided = None, 1, None, False
    for s, poly in ((1, cp), (-1, neg)):
        try:
            v = pisot_check(poly, tol)
        except Uncertifiable:
            undecided = True
            continue
        if used is None or v.is_pisot:
            used, sign = v, s
        if v.is_pisot:
            break
    # "not Pisot" is only certain when neither sign was left undecided
    if used is not None and (used.is_pisot or not undecided):
        verdict = used.is_pisot
    deltas = dyn_degrees_monomial(h, tol)
    hv = classify(deltas)
    return CohHypReport(used, sign, verdict, hv.p == 1, deltas)


@dataclass
class MonomialReport:
    matrix: Matrix
    degrees: list[int] | None
    dyn_degrees: list[Approx]
    char_poly: tuple[int, ...]
    coh_hyp: CohHypReport
    coh_hyp_p: int | None

    def to_json(self) -> dict:
        return {
            "matrix": [list(r) for r in self.matrix],
            "degrees": self.degrees,
            "dyn_degrees": [d.to_json() for d in self.dyn_degrees],
            "char_poly": list(self.char_poly),
            "pisot": self.coh_hyp.pisot_verdict,
            "coh_hyp": self.coh_hyp.to_json(),
            "coh_hyp_p": self.coh_hyp_p,
        }


def monomial_report(h: MonomialMap, J: int = 8, tol=Fraction(1, 10**12)) -> MonomialReport:
    """Degrees (on P^2), dynamical degrees, char poly and hyperbolicity of h."""
    from .dyndeg import classify

    coh = is_1_coh_hyp_monomial(h, tol)
    degrees = power_degrees(h, J) if h.n == 2 else None
    return MonomialReport(h.M, degrees, coh.deltas, char_poly(h.M), coh, classify(coh.deltas).p)

"""Growth-rate estimators and the certified series solver for delta_1(g o h).

Every real output is an :class:`~adlab.interval.Approx` or carries an
explicit residual; comparisons between estimates use bracket semantics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import upoly
from .exact.parse import poly_parse
from .interval import Approx, decimal_string
from .monomial import MonomialMap, power_degrees, spectral_radius
from .projmap import DegreeSequence


class SequenceTooShort(ValueError):
    pass


class BracketError(ArithmeticError):
    pass


# -- degree-sequence growth ----------------------------------------------------

@dataclass
class DynDegEstimate:
    value: float
    method: str
    window: int
    residual: float
    root: float
    ratio: float
    exact: Fraction | None = None
    iterates_used: int = 0

    def to_json(self) -> dict:
        radius = 0 if self.exact is not None else self.residual
        return {
            "value": decimal_string(self.exact if self.exact is not None else self.value),
            "radius": decimal_string(radius),
            "method": self.method,
            "iterates_used": self.iterates_used,
            "root_estimate": decimal_string(self.root),
            "ratio_estimate": decimal_string(self.ratio),
        }


def estimate_growth(seq: DegreeSequence | Sequence[int]) -> DynDegEstimate:
    """n-th root and last-ratio estimates of lim deg(f^n)^(1/n).

    An exactly geometric tail (constant ratio over the last three entries)
    is reported as the exact rational ratio.
    """
    degs = list(seq.degs if isinstance(seq, DegreeSequence) else seq)
    if len(degs) < 3:
        raise SequenceTooShort("need at least three degrees")
    n = len(degs)
    root = degs[-1] ** (1.0 / n)
    r_last = Fraction(degs[-1], degs[-2])
    r_prev = Fraction(degs[-2], degs[-3])
    if r_last == r_prev:
        value = max(r_last, Fraction(1))
        return DynDegEstimate(float(value), "ratio", 3, 0.0, root, float(r_last),
                              exact=value, iterates_used=n)
    residual = abs(float(r_last - r_prev))
    return DynDegEstimate(max(1.0, float(r_last)), "ratio", 2, residual, root, float(r_last),
                          iterates_used=n)


# -- series for delta_1 of g o h ---------------------------------------------------

@dataclass
class SeriesResult:
    value: Approx
    iterates_used: int
    tail_constant: float
    growth_rate: Approx
    residual_bound: Fraction

    def to_json(self) -> dict:
        out = self.value.to_json()
        out.update(method="series", iterates_used=self.iterates_used,
                   residual_bound=decimal_string(self.residual_bound))
        return out


class _Series:
    """S(lam) = sum_{j>=1} deg(h^j) lam^-j with a geometric tail bound."""

    def __init__(self, h: MonomialMap, warmup: int = 20):
        self.h = h
        self.rho = spectral_radius(h.M)
        self.degs: list[int] = []
        self._extend(warmup)
        r = self.rho.hi
        self.C = max(Fraction(d) / r ** (j + 1) for j, d in enumerate(self.degs))

    def _extend(self, J: int) -> None:
        if J > len(self.degs):
            self.degs = power_degrees(self.h, J)

    def partial(self, lam: Fraction, J: int) -> Fraction:
        self._extend(J)
        x = 1 / lam
        acc = Fraction(0)
        for d in reversed(self.degs[:J]):
            acc = (acc + d) * x
        return acc

    def tail(self, lam: Fraction, J: int) -> Fraction:
        q = self.rho.hi / lam
        if q >= 1:
            return Fraction(10**30)
        return self.C * q ** (J + 1) / (1 - q)

    def compare(self, lam: Fraction, eps: Fraction, J: int, j_max: int) -> tuple[int, int, Fraction]:
        """Sign of S(lam) - 1, the truncation used and a residual bound.

        Sign 0 means the root lies within eps of lam: |S(lam) - 1| <= tail and
        |S'| >= d1 / x^2 on the segment between them.
        """
        d1 = self.degs[0]
        while True:
            s = self.partial(lam, J)
            t = self.tail(lam, J)
            if s > 1:
                return 1, J, s - 1
            if s + t < 1:
                return -1, J, 1 - s
            if t * (lam + eps) ** 2 / d1 < eps:
                return 0, J, t
            if J >= j_max:
                raise BracketError(f"tail bound does not certify at lambda={float(lam)} within {j_max} terms")
            J = min(2 * J, j_max)


def bdj_delta1(h: MonomialMap, tol=Fraction(1, 10**10), lam_max=10**6, j_max: int = 5000) -> SeriesResult:
    """Unique lam > delta_1(h) with sum_{j>=1} deg(h^j) lam^-j = 1.

    The bracket [lo, hi] is narrowed by bisection until its width is below
    ``tol``; every decision compares a truncated sum plus a geometric tail
    bound deg(h^j) <= C rho^j with 1.
    """
    if h.n != 2:
        raise ValueError("the series solver needs a monomial map of P^2")
    tol = Fraction(tol)
    eps = tol / 4
    S = _Series(h)
    J = 20
    d1 = S.degs[0]
    if d1 > S.rho.hi:
        lo = Fraction(d1)  # S(d1) >= 1 + deg(h^2)/d1^2 > 1
    else:
        lo = None
        step = S.rho.hi / 2
        while step > Fraction(1, 10**6):
            cand = S.rho.hi + step
            sign, J, _ = S.compare(cand, eps, J, j_max)
            if sign > 0:
                lo = cand
                break
            step /= 2
        if lo is None:
            raise BracketError("could not find lam with S(lam) > 1 above the growth rate")
    hi = 2 * lo
    while True:
        if hi > lam_max:
            raise BracketError(f"no bracketing interval below lam_max={lam_max}")
        sign, J, _ = S.compare(hi, eps, J, j_max)
        if sign < 0:
            break
        if sign == 0:
            lo, hi = hi - eps, hi + eps
            break
        lo, hi = hi, 2 * hi
    while hi - lo > tol:
        mid = (lo + hi) / 2
        sign, J, _ = S.compare(mid, eps, J, j_max)
        if sign > 0:
            lo = mid
        elif sign < 0:
            hi = mid
        else:
            lo, hi = max(lo, mid - eps), min(hi, mid + eps)
    value = Approx(lo, hi)
    residual = abs(S.partial(value.value, J) - 1) + S.tail(value.value, J)
    return SeriesResult(value, J, float(S.C), S.rho, residual)


# -- classification -------------------------------------------------------------

@dataclass
class HyperbolicityVerdict:
    deltas: list[Approx]
    p: int | None
    margin: Fraction
    target_ratio: Approx | None
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "deltas": [d.to_json() for d in self.deltas],
            "p": self.p,
            "margin": decimal_string(self.margin),
            "target_ratio": self.target_ratio.to_json() if self.target_ratio else None,
            "reason": self.reason,
        }


def classify(deltas: Sequence) -> HyperbolicityVerdict:
    """Index p with delta_p strictly above every other delta_i, if certifiable.

    ``deltas`` lists delta_1..delta_N as Approx, (value, radius) tuples, or
    plain numbers.
    """
    ds = [Approx.coerce(d) for d in deltas]
    if not ds:
        raise ValueError("need at least one dynamical degree")
    top = max(range(len(ds)), key=lambda i: ds[i].value)
    others = [d for i, d in enumerate(ds) if i != top]
    margin = ds[top].value - max((d.value for d in others), default=Fraction(1))
    if others and not all(ds[top].certainly_gt(d) for d in others):
        return HyperbolicityVerdict(ds, None, margin, None,
                                    "not certifiably cohomologically hyperbolic (tie within precision)")
    if not others and not ds[0].certainly_gt(1):
        return HyperbolicityVerdict(ds, None, margin, None, "delta_1 is not certifiably > 1")
    p = top + 1
    prev = ds[top - 1] if top > 0 else Approx.exact(1)
    return HyperbolicityVerdict(ds, p, margin, ds[top] / prev, "")


def check_log_concavity(deltas: Sequence) -> tuple[bool, int | None]:
    """delta_k^2 >= delta_{k-1} delta_{k+1} for inner k; ``deltas`` starts at delta_0 = 1.

    Only certain violations count: brackets that overlap are accepted.
    """
    ds = [Approx.coerce(d) for d in deltas]
    for k in range(1, len(ds) - 1):
        sq = ds[k] * ds[k]
        prod = ds[k - 1] * ds[k + 1]
        if sq.certainly_lt(prod):
            return False, k
    return True, None


# -- largest real root -------------------------------------------------------------

def univariate(p, var: str = "t") -> tuple[Fraction, ...]:
    """Coefficients (constant first) from a string or sequence."""
    if isinstance(p, str):
        poly = poly_parse(p, [var])
        if poly.is_zero():
            return ()
        deg = int(poly.degree())
        coeffs = [Fraction(0)] * (deg + 1)
        for (e,), c in poly.terms.items():
            coeffs[e] = c
        return tuple(coeffs)
    return upoly.normalize(p)


def largest_real_root(p, tol=Fraction(1, 10**10)) -> Approx:
    """Largest real root by Sturm-guided bisection from the Cauchy bound.

    A rational root inside the final bracket is returned exactly; a largest
    root <= 0 raises NoRealRoot.
    """
    coeffs = univariate(p)
    lo, hi = upoly.largest_real_root_bracket(coeffs, Fraction(tol))
    if hi <= 0:
        raise upoly.NoRealRoot("no positive real root")
    exact = [r for r in upoly.rational_roots(upoly.to_integer(coeffs)) if lo <= r <= hi]
    if exact:
        return Approx.exact(exact[0])
    return Approx(lo, hi)


def geometric_mean_rate(values: Sequence[float]) -> float:
    return math.exp(sum(math.log(v) for v in values) / len(values))

"""Heights, orbits and arithmetic-degree estimates over Q.

Orbit coordinates are kept as gmpy2 integers; once they pass
``STORE_BITS`` bits only a sha256 digest of the canonical form is retained,
so periodicity detection re-verifies candidate repeats exactly.
"""

from __future__ import annotations

import csv
import hashlib
import io
import random
from dataclasses import dataclass, field
from typing import Sequence

import gmpy2

from .exact import MultiPoly, poly_parse
from .interval import decimal_string
from .projmap import ProjMap, ProjPoint, _canonical_ints

STORE_BITS = 10_000


class OrbitTooShort(ValueError):
    pass


# -- heights ----------------------------------------------------------------------

@dataclass(frozen=True)
class HeightValue:
    h: float
    hplus: float

    def to_json(self) -> str:
        return repr(self.h)


def _log_abs(v) -> float:
    v = abs(gmpy2.mpz(v))
    return float(gmpy2.log(v)) if v else float("-inf")


def height_of_coords(coords: Sequence) -> HeightValue:
    """log max |x_i| of an already canonical integer vector (double precision)."""
    m = max(abs(gmpy2.mpz(c)) for c in coords)
    h = _log_abs(m) if m > 1 else 0.0
    return HeightValue(h, max(1.0, h))


def weil_height(P: ProjPoint | Sequence[int]) -> HeightValue:
    coords = P.coords if isinstance(P, ProjPoint) else _canonical_ints(P)
    return height_of_coords(coords)


# -- orbits ----------------------------------------------------------------------

def _digest(coords) -> str:
    h = hashlib.sha256()
    for c in coords:
        h.update(gmpy2.to_binary(gmpy2.mpz(c)))
        h.update(b"|")
    return h.hexdigest()


@dataclass
class OrbitRecord:
    start: ProjPoint
    points: list  # tuple of ints, or None once compressed
    digests: list[str]
    heights: list[HeightValue]
    stop: dict
    bits: list[int] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.heights)

    @property
    def is_periodic(self) -> bool:
        return self.stop.get("reason") == "periodic"

    def shifted(self, k: int) -> "OrbitRecord":
        """The orbit of f^k(start), reusing the computed iterates."""
        if k >= self.length:
            raise OrbitTooShort(f"cannot restart at {k} on an orbit of length {self.length}")
        stop = dict(self.stop)
        if stop.get("reason") == "hit_indeterminacy":
            stop["n"] -= k
        elif stop.get("reason") == "periodic":
            stop["preperiod"] = max(0, stop["preperiod"] - k)
        start = self.points[k]
        return OrbitRecord(ProjPoint(start) if start is not None else self.start, self.points[k:],
                           self.digests[k:], self.heights[k:], stop, self.bits[k:])

    def to_json(self) -> dict:
        return {
            "start": list(self.start.coords),
            "stop": self.stop,
            "heights": [decimal_string(hv.h) for hv in self.heights],
            "bits": self.bits,
        }


def run_orbit(f: ProjMap, P: ProjPoint, budget: int = 10, height_cap: float | None = None,
              store_bits: int = STORE_BITS) -> OrbitRecord:
    """Iterate f from P, recording P, f(P), ..., until a stop condition.

    ``budget`` counts iterates beyond the start, so a full run records
    budget + 1 points.
    """
    if f.dim != P.dim:
        raise ValueError(f"dimension mismatch: map on P^{f.dim}, point in P^{P.dim}")
    cur = tuple(gmpy2.mpz(c) for c in P.coords)
    seen: dict[str, int] = {}
    points, digests, heights, bits = [], [], [], []
    full: dict[int, tuple] = {}

    def recompute(k: int) -> tuple:
        pt = tuple(gmpy2.mpz(c) for c in P.coords)
        for _ in range(k):
            pt = tuple(_canonical_ints(f.evaluate_raw(pt)))
        return pt

    def record(coords) -> int | None:
        i = len(heights)
        dg = _digest(coords)
        nbits = max(int(gmpy2.mpz(c).bit_length()) for c in coords)
        prev = seen.get(dg)
        if prev is not None and (full[prev] if prev in full else recompute(prev)) == coords:
            return prev
        seen.setdefault(dg, i)
        keep = nbits <= store_bits
        if keep:
            full[i] = coords
        points.append(tuple(int(c) for c in coords) if keep else None)
        digests.append(dg)
        heights.append(height_of_coords(coords))
        bits.append(nbits)
        return None

    stop = {"reason": "budget_exhausted"}
    record(cur)
    for n in range(1, budget + 1):
        vals = f.evaluate_raw(cur)
        if not any(vals):
            stop = {"reason": "hit_indeterminacy", "n": n - 1}
            break
        cur = tuple(_canonical_ints(vals))
        rep = record(cur)
        if rep is not None:
            stop = {"reason": "periodic", "preperiod": rep, "period": n - rep}
            break
        if height_cap is not None and heights[-1].h > height_cap:
            stop = {"reason": "height_cap", "n": n}
            break
    return OrbitRecord(P, points, digests, heights, stop, bits)


# -- arithmetic degree ---------------------------------------------------------------

@dataclass
class ArithDegEstimate:
    lower_seq: list[float]
    upper_seq: list[float]
    ratio_seq: list[float]
    alpha_lower: float
    alpha_upper: float
    alpha_ratio: float
    alpha_root: float
    spread: float
    window: int
    converged: bool

    def to_json(self) -> dict:
        return {
            "alpha_ratio": {"value": decimal_string(self.alpha_ratio), "spread": decimal_string(self.spread),
                            "lower": decimal_string(self.alpha_lower), "upper": decimal_string(self.alpha_upper),
                            "window": self.window, "converged": self.converged},
            "alpha_root": {"value": decimal_string(self.alpha_root)},
            "ratio_seq": [decimal_string(r) for r in self.ratio_seq],
        }


def arith_degree(rec: OrbitRecord | Sequence[float], window: int = 3,
                 max_spread: float = 0.1) -> ArithDegEstimate:
    """Ratio and root estimates of the arithmetic degree along an orbit.

    Accepts an OrbitRecord or a plain list of h+ values.  Periodic orbits
    have bounded heights and give exactly 1.
    """
    if isinstance(rec, OrbitRecord):
        hp = [hv.hplus for hv in rec.heights]
        periodic = rec.is_periodic
        if rec.stop.get("reason") == "hit_indeterminacy" and rec.stop["n"] < 4:
            raise OrbitTooShort("orbit hit indeterminacy before index 4")
    else:
        hp = [max(1.0, float(h)) for h in rec]
        periodic = False
    if periodic:
        ones = [1.0] * max(len(hp) - 1, 0)
        return ArithDegEstimate(ones, ones, ones, 1.0, 1.0, 1.0, 1.0, 0.0, window, True)
    if len(hp) < 4:
        raise OrbitTooShort(f"need at least 4 heights, got {len(hp)}")
    roots = [hp[i] ** (1.0 / i) for i in range(1, len(hp))]
    lower_seq = [min(roots[i:]) for i in range(len(roots))]
    upper_seq = [max(roots[i:]) for i in range(len(roots))]
    ratios = [hp[i + 1] / hp[i] for i in range(len(hp) - 1)]
    w = min(window, len(ratios))
    tail = ratios[-w:]
    lo, hi = max(1.0, min(tail)), max(1.0, max(tail))
    spread = hi - lo
    return ArithDegEstimate(lower_seq, upper_seq, ratios, lo, hi, max(1.0, ratios[-1]),
                            roots[-1], spread, w, spread <= max_spread * hi)


def power_consistency(rec: OrbitRecord, k: int = 2, window: int = 3) -> dict:
    """Compare the f^k estimate (every k-th height) with the k-th power of the f estimate."""
    base = arith_degree(rec, window)
    hp = [hv.hplus for hv in rec.heights]
    sub = hp[(len(hp) - 1) % k::k]
    powered = arith_degree(sub, window)
    target = base.alpha_ratio ** k
    # |R^k - r^k| <= k * max(R, r)^(k-1) * |R - r| bounds the induced spread
    induced = k * base.alpha_upper ** (k - 1) * base.spread
    diff = abs(powered.alpha_ratio - target)
    return {"k": k, "alpha_fk": powered.alpha_ratio, "alpha_f_pow": target, "diff": diff,
            "allowed": powered.spread + induced, "ok": diff <= powered.spread + induced}


def shift_consistency(rec: OrbitRecord, k: int = 3, window: int = 3) -> dict:
    base = arith_degree(rec, window)
    moved = arith_degree(rec.shifted(k), window)
    diff = abs(moved.alpha_ratio - base.alpha_ratio)
    return {"k": k, "diff": diff, "spread": base.spread, "ok": diff <= base.spread}


# -- return sets -------------------------------------------------------------------

def _eval_int(Z: MultiPoly, coords) -> object:
    """Z at an integer vector, up to a positive rational factor."""
    acc = gmpy2.mpz(0)
    for m, c in Z.primitive().integer_terms().items():
        t = gmpy2.mpz(c)
        for x, e in zip(coords, m):
            if e:
                t *= gmpy2.mpz(x) ** e
        acc += t
    return acc


def fit_progressions(hits: Sequence[int], horizon: int) -> dict:
    """Describe hits in [0, horizon) as finitely many indices plus periodic residues.

    The diagnostic picks the smallest threshold and period (observed at
    least twice over) beyond which membership is periodic.
    """
    hitset = set(hits)
    if not hitset:
        return {"consistent": True, "finite": [], "threshold": 0, "period": None, "residues": []}
    for period in range(1, horizon // 2 + 1):
        for threshold in range(0, horizon - 2 * period + 1):
            ok = all((n in hitset) == (n + period in hitset) for n in range(threshold, horizon - period))
            if ok:
                residues = sorted({n % period for n in hitset if n >= threshold})
                if not residues:
                    continue
                return {"consistent": True, "finite": sorted(n for n in hitset if n < threshold),
                        "threshold": threshold, "period": period, "residues": residues}
    # a sparse set with the last hits well before the horizon reads as finite
    last = max(hitset)
    if last < horizon // 2:
        return {"consistent": True, "finite": sorted(hitset), "threshold": last + 1, "period": None,
                "residues": []}
    return {"consistent": False, "finite": sorted(hitset), "threshold": None, "period": None, "residues": []}


@dataclass
class ReturnSet:
    indices: list[int]
    horizon: int
    stop: dict
    pattern: dict

    def to_json(self) -> dict:
        return {"indices": self.indices, "horizon": self.horizon, "stop": self.stop, "pattern": self.pattern}


def return_set(f: ProjMap, P: ProjPoint, Z: MultiPoly, budget: int = 20) -> ReturnSet:
    """Indices n <= budget with f^n(P) on {Z = 0}; a periodic orbit is unrolled to the full budget."""
    if Z.is_zero() or not Z.is_homogeneous():
        raise ValueError("Z must be a nonzero homogeneous polynomial")
    if Z.nvars != f.dim + 1:
        raise ValueError("Z lives in a different projective space")
    rec = run_orbit(f, P, budget, store_bits=1 << 62)
    on_z = [_eval_int(Z, pt) == 0 for pt in rec.points]
    if rec.is_periodic:
        pre, per = rec.stop["preperiod"], rec.stop["period"]
        horizon = budget + 1
        indices = [n for n in range(horizon) if on_z[n if n < pre else pre + (n - pre) % per]]
    else:
        horizon = len(on_z)
        indices = [n for n, v in enumerate(on_z) if v]
    return ReturnSet(indices, horizon, rec.stop, fit_progressions(indices, horizon))


# -- invariants and height inequalities ------------------------------------------------

def check_invariant(F_exprs: Sequence[str], phi: str | MultiPoly, variables: Sequence[str]) -> bool:
    """True iff phi o F - phi expands to zero."""
    variables = list(variables)
    if len(F_exprs) != len(variables):
        raise ValueError(f"{len(F_exprs)} map components for {len(variables)} variables")
    F = [poly_parse(e, variables) if isinstance(e, str) else e for e in F_exprs]
    ph = poly_parse(phi, variables) if isinstance(phi, str) else phi
    if ph.nvars != len(variables):
        raise ValueError("phi and F use different variable counts")
    return (ph.substitute(F) - ph).is_zero()


def three_point_experiment(g: ProjMap, samples: Sequence[ProjPoint], d1, d2, zeta) -> dict:
    """Slack h(g^2 z)/d1 + h(z)/d2 - zeta h(g z) over the samples."""
    d1, d2, zeta = float(d1), float(d2), float(zeta)
    if d1 <= 0 or d2 <= 0:
        raise ValueError("d1 and d2 must be positive")
    if not zeta > 1 / d1 + 1 / d2:
        raise ValueError(f"need zeta > 1/d1 + 1/d2 = {1 / d1 + 1 / d2}")
    slacks, skipped = [], []
    for z in samples:
        rec = run_orbit(g, z, 2)
        if rec.stop.get("reason") == "hit_indeterminacy":
            skipped.append({"point": list(z.coords), "note": f"indeterminate after {rec.stop['n']} steps"})
            continue
        hs = [hv.h for hv in rec.heights]
        if len(hs) < 3:  # periodic: unroll
            pre, per = rec.stop["preperiod"], rec.stop["period"]
            hs = [hs[i if i < pre else pre + (i - pre) % per] for i in range(3)]
        slacks.append(hs[2] / d1 + hs[0] / d2 - zeta * hs[1])
    if not slacks:
        return {"min_slack": None, "est_C": None, "samples_used": 0, "skipped": skipped}
    m = min(slacks)
    return {"min_slack": m, "est_C": max(0.0, -m), "samples_used": len(slacks), "skipped": skipped}


# -- sampling and output -------------------------------------------------------------

def random_points(rng: random.Random, dim: int, count: int, bound: int = 10,
                  avoid: MultiPoly | None = None, max_tries: int = 100_000) -> list[ProjPoint]:
    """Points with coordinates uniform in [-bound, bound], off the avoid-locus."""
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not sample enough points off the avoid-locus")
        coords = [rng.randint(-bound, bound) for _ in range(dim + 1)]
        if not any(coords):
            continue
        P = ProjPoint(tuple(coords))
        if avoid is not None and _eval_int(avoid, P.coords) == 0:
            continue
        out.append(P)
    return out


def orbit_report(rec: OrbitRecord, est: ArithDegEstimate | None = None,
                 Z: MultiPoly | None = None) -> dict:
    doc = rec.to_json()
    if est is not None:
        doc.update({k: v for k, v in est.to_json().items() if k in ("alpha_ratio", "alpha_root")})
    if Z is not None:
        doc["hit_Z"] = [None if p is None else bool(_eval_int(Z, p) == 0) for p in rec.points]
    return doc


def orbit_csv(rec: OrbitRecord, Z: MultiPoly | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "h", "h_ratio", "hit_Z"])
    prev = None
    for n, (hv, pt) in enumerate(zip(rec.heights, rec.points)):
        ratio = "" if prev is None else decimal_string(hv.hplus / prev)
        hit = "" if Z is None or pt is None else int(_eval_int(Z, pt) == 0)
        w.writerow([n, decimal_string(hv.h), ratio, hit])
        prev = hv.hplus
    return buf.getvalue()


def log_height_bound(f: ProjMap, h: float) -> float:
    """deg(f) h+ + C_f, the a priori bound for h+(f(x))."""
    return f.degree * max(1.0, h) + f.height_constant()


import csv
import io
import math
import random
from functools import reduce

import pytest
from hypothesis import given, settings, strategies as st

from adlab import catalog, orbitlab
from adlab.exact import poly_parse
from adlab.orbitlab import (OrbitTooShort, arith_degree, check_invariant, fit_progressions, power_consistency,
                            return_set, run_orbit, shift_consistency, three_point_experiment, weil_height)
from adlab.projmap import ProjMap, ProjPoint, map_parse

X = ["x0", "x1", "x2"]


def Z(text):
    return poly_parse(text, X)


# -- heights ----------------------------------------------------------------------------

def test_weil_height_examples():
    hv = weil_height(ProjPoint.of(1, 0, 0))
    assert hv.h == 0 and hv.hplus == 1
    assert weil_height(ProjPoint.of(2, 4, 6)).h == pytest.approx(math.log(3), abs=1e-15)
    assert weil_height([3, -5]).h == pytest.approx(math.log(5), abs=1e-15)


@given(st.lists(st.integers(-10**30, 10**30), min_size=2, max_size=5).filter(any), st.integers(1, 10**6))
def test_weil_height_scaling_invariant_and_matches_log(coords, k):
    g = reduce(math.gcd, coords)
    expected = math.log(max(abs(c) // g for c in coords))
    assert weil_height(coords).h == pytest.approx(expected, rel=1e-12, abs=1e-15)
    assert weil_height([k * c for c in coords]) == weil_height(coords)
    assert weil_height(coords).hplus >= 1


# -- orbits -----------------------------------------------------------------------------

def test_sigma_orbits():
    sigma = catalog.cremona_sigma()
    rec = run_orbit(sigma, ProjPoint.of(1, 1, 1), 10)
    assert rec.stop == {"reason": "periodic", "preperiod": 0, "period": 1}
    rec = run_orbit(sigma, ProjPoint.of(1, 2, 3), 10)
    assert rec.stop == {"reason": "periodic", "preperiod": 0, "period": 2}
    assert rec.points == [(1, 2, 3), (6, 3, 2)]


def test_orbit_indeterminacy_and_caps():
    sigma = catalog.cremona_sigma()
    rec = run_orbit(sigma, ProjPoint.of(1, 0, 0), 5)
    assert rec.stop == {"reason": "hit_indeterminacy", "n": 0} and rec.length == 1
    # [1:1:0] -> [0:0:1], which is indeterminate
    rec = run_orbit(sigma, ProjPoint.of(1, 1, 0), 5)
    assert rec.stop == {"reason": "hit_indeterminacy", "n": 1} and rec.points[1] == (0, 0, 1)
    rec = run_orbit(catalog.bdj_f(), ProjPoint.of(3, -2, 7), 10, height_cap=50.0)
    assert rec.stop["reason"] == "height_cap" and rec.heights[-1].h > 50
    assert all(hv.h <= 50 for hv in rec.heights[:-1])


def test_orbit_budget_and_json():
    assert run_orbit(catalog.bdj_g(), ProjPoint.of(2, 3, 7), 4).stop["period"] == 2  # g is an involution
    rec = run_orbit(catalog.bdj_f(), ProjPoint.of(2, 3, 7), 4)
    assert rec.stop == {"reason": "budget_exhausted"} and rec.length == 5
    doc = rec.to_json()
    assert doc["start"] == [2, 3, 7] and len(doc["heights"]) == 5
    with pytest.raises(ValueError):
        run_orbit(catalog.bdj_g(), ProjPoint.of(1, 2), 3)


def test_compressed_points_still_detect_periods():
    f = ProjMap.identity(2)
    big = ProjPoint.of(1, 2**80 + 1, 3**60)
    rec = run_orbit(f, big, 5, store_bits=16)
    assert rec.points == [None] and rec.stop == {"reason": "periodic", "preperiod": 0, "period": 1}
    sigma = catalog.cremona_sigma()
    P = ProjPoint.of(2**40 + 1, 3**30, 5**20)
    full = run_orbit(sigma, P, 6)
    small = run_orbit(sigma, P, 6, store_bits=8)
    assert small.stop == full.stop and small.digests == full.digests
    assert [hv.h for hv in small.heights] == [hv.h for hv in full.heights]


@settings(max_examples=25)
@given(st.sampled_from(["bdj_g", "cremona_sigma", "cg_f", "cg_g_inv", "gs_f"]), st.integers(0, 10**6))
def test_height_step_bound(name, seed):
    f = catalog.get(name)
    P = orbitlab.random_points(random.Random(seed), f.dim, 1, 20)[0]
    rec = run_orbit(f, P, 4)
    C = f.height_constant()
    for a, b in zip(rec.heights, rec.heights[1:]):
        assert b.hplus <= f.degree * a.hplus + C + 1e-9


def test_height_constant_is_log_terms_times_coefficient():
    f = catalog.bdj_g()
    terms = max(len(c.terms) for c in f.coords)
    coef = max(abs(v) for c in f.coords for v in c.integer_terms().values())
    assert f.height_constant() == pytest.approx(math.log(terms * coef))


# -- arithmetic degree --------------------------------------------------------------------

def test_arith_degree_periodic_is_one():
    rec = run_orbit(catalog.cremona_sigma(), ProjPoint.of(1, 2, 3), 10)
    est = arith_degree(rec)
    assert est.alpha_lower == est.alpha_upper == est.alpha_ratio == 1.0


def test_arith_degree_synthetic_powers_of_two():
    est = arith_degree([2.0 ** i for i in range(12)])
    assert est.alpha_ratio == est.alpha_lower == est.alpha_upper == 2.0
    assert est.spread == 0 and est.converged
    assert est.alpha_root == pytest.approx(2.0, rel=1e-12)


def test_arith_degree_short_orbits():
    with pytest.raises(OrbitTooShort):
        arith_degree([1.0, 2.0, 4.0])
    rec = run_orbit(catalog.cremona_sigma(), ProjPoint.of(1, 1, 0), 5)
    with pytest.raises(OrbitTooShort):
        arith_degree(rec)


@given(st.lists(st.floats(0, 1e6), min_size=4, max_size=20))
def test_arith_degree_bounds(hs):
    est = arith_degree(hs)
    assert 1 <= est.alpha_lower <= est.alpha_ratio <= est.alpha_upper


def test_power_and_shift_consistency_on_geometric_heights():
    sq = run_orbit(map_parse(["x0^2", "x1^2", "x2^2"]), ProjPoint.of(1, 2, 3), 12)
    assert sq.stop == {"reason": "budget_exhausted"}
    est = arith_degree(sq)
    assert est.alpha_ratio == pytest.approx(2.0, rel=1e-9)
    pw = power_consistency(sq, 2)
    assert pw["ok"] and pw["alpha_fk"] == pytest.approx(4.0, rel=1e-9)
    assert shift_consistency(sq, 3)["ok"]


# -- return sets --------------------------------------------------------------------------

def test_return_set_examples():
    sigma = catalog.cremona_sigma()
    rs = return_set(sigma, ProjPoint.of(1, 2, 3), Z("x0"), 20)
    assert rs.indices == [] and rs.pattern["consistent"]
    rs = return_set(ProjMap.identity(2), ProjPoint.of(0, 1, 2), Z("x0"), 10)
    assert rs.indices == list(range(11))
    assert rs.pattern["period"] == 1 and rs.pattern["residues"] == [0]
    rs = return_set(sigma, ProjPoint.of(1, 1, 1), Z("x1 - x2"), 10)
    assert rs.indices == list(range(11))


def test_return_set_alternating():
    # the line x0 = 3*x2 meets the 2-cycle only at [6:3:2]
    sigma = catalog.cremona_sigma()
    rs = return_set(sigma, ProjPoint.of(1, 2, 3), Z("x0 - 3*x2"), 9)
    assert rs.indices == [1, 3, 5, 7, 9]
    assert rs.pattern["period"] == 2 and rs.pattern["residues"] == [1]


def test_return_set_errors():
    with pytest.raises(ValueError):
        return_set(catalog.cremona_sigma(), ProjPoint.of(1, 2, 3), Z("x0 + 1"))
    with pytest.raises(ValueError):
        return_set(catalog.cremona_sigma(), ProjPoint.of(1, 2, 3), poly_parse("x0", ["x0", "x1"]))


def test_fit_progressions():
    assert fit_progressions([], 10)["consistent"]
    fit = fit_progressions([0, 2, 5, 7, 9, 11, 13, 15], 16)
    assert fit["finite"] == [0, 2] and fit["threshold"] == 4
    assert fit["period"] == 2 and fit["residues"] == [1]
    fit = fit_progressions([1, 2], 20)
    assert fit["consistent"] and fit["finite"] == [1, 2] and fit["period"] is None


# -- invariants -----------------------------------------------------------------------------

def test_check_invariant_examples():
    V = catalog.BHT_VARS
    assert check_invariant(catalog.BHT_F_EXPRS, "x1*x4 - x2*x3", V)
    assert check_invariant(catalog.BHT_F_EXPRS, "7", V)
    assert not check_invariant(catalog.BHT_F_EXPRS, "x1", V)
    with pytest.raises(ValueError):
        check_invariant(catalog.BHT_F_EXPRS[:3], "x1", V)


def test_check_invariant_powers_of_phi():
    V = catalog.BHT_VARS
    assert check_invariant(catalog.BHT_F_EXPRS, "(x1*x4 - x2*x3)^3 + 2*(x1*x4 - x2*x3)", V)


# -- three-point experiment -----------------------------------------------------------------

def test_three_point_identity():
    pts = [ProjPoint.of(1, 2, 3), ProjPoint.of(1, 10, 100)]
    rep = three_point_experiment(ProjMap.identity(2), pts, 1, 1, 2.5)
    assert rep["min_slack"] == pytest.approx(-0.5 * math.log(100))
    assert rep["est_C"] == pytest.approx(0.5 * math.log(100))


def test_three_point_sigma_skips_indeterminacy():
    rng = random.Random(3)
    pts = orbitlab.random_points(rng, 2, 20, 100) + [ProjPoint.of(1, 0, 0), ProjPoint.of(0, 1, 0)]
    rep = three_point_experiment(catalog.cremona_sigma(), pts, 1, 1, 2.1)
    assert len(rep["skipped"]) >= 2 and rep["samples_used"] + len(rep["skipped"]) == 22
    assert rep["est_C"] >= 0


def test_three_point_zero_height_and_errors():
    rep = three_point_experiment(ProjMap.identity(2), [ProjPoint.of(1, 1, -1)], 1, 1, 2.5)
    assert rep["min_slack"] == 0 and rep["est_C"] == 0
    with pytest.raises(ValueError):
        three_point_experiment(ProjMap.identity(2), [], 1, 1, 2)


# -- sampling and output ---------------------------------------------------------------------

def test_random_points_respect_bound_and_avoid():
    rng = random.Random(0)
    avoid = Z("x0*x1*x2")
    pts = orbitlab.random_points(rng, 2, 50, 5, avoid)
    assert all(max(abs(c) for c in p.coords) <= 5 and all(p.coords) for p in pts)
    assert orbitlab.random_points(random.Random(0), 2, 50, 5, avoid) == pts


def test_orbit_csv_and_report():
    rec = run_orbit(catalog.cremona_sigma(), ProjPoint.of(1, 2, 3), 5)
    rows = list(csv.reader(io.StringIO(orbitlab.orbit_csv(rec, Z("x0 - 3*x2")))))
    assert rows[0] == ["n", "h", "h_ratio", "hit_Z"]
    assert [r[3] for r in rows[1:]] == ["0", "1"]
    doc = orbitlab.orbit_report(rec, arith_degree(rec), Z("x0"))
    assert doc["alpha_ratio"]["value"] == "1.0" and doc["hit_Z"] == [False, False]
    assert doc["stop"]["reason"] == "periodic"

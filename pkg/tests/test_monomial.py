import itertools
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, strategies as st

from adlab import monomial
from adlab.dyndeg import check_log_concavity, classify
from adlab.monomial import (MonomialMap, SingularMatrix, char_poly, dyn_degrees_monomial, exterior_power,
                            is_1_coh_hyp_monomial, monomial_degree, monomial_report, monomial_to_projective,
                            pisot_check, power_degrees)
from adlab.projmap import ProjMap, compose

from conftest import numeric_roots

TOL = Fraction(1, 10**12)


def nonsingular(n, bound):
    row = st.lists(st.integers(-bound, bound), min_size=n, max_size=n)
    return st.lists(row, min_size=n, max_size=n).filter(lambda rows: monomial.det(rows) != 0)


any_matrix = st.integers(2, 4).flatmap(lambda n: nonsingular(n, 4))


def sympy_radius(rows):
    return max(abs(complex(e)) for e in sympy.Matrix(rows).eigenvals(multiple=True))


# -- degrees ---------------------------------------------------------------------

def test_monomial_degree_examples():
    assert monomial_degree(((1, 0), (0, 1))) == 1
    assert monomial_degree(((1, 2), (-2, 1))) == 5
    assert monomial_degree(((-3, 4), (-4, -3))) == 8
    with pytest.raises(SingularMatrix):
        monomial_degree(((1, 2), (2, 4)))


def test_degree_formula_matches_symbolic_lift():
    for a, b, c, d in itertools.product(range(-5, 6), repeat=4):
        if a * d - b * c == 0:
            continue
        h = MonomialMap(((a, b), (c, d)))
        # the generic normalizer recomputes the gcd from scratch
        lift = ProjMap(monomial_to_projective(h).coords)
        assert lift.degree == monomial_degree(h.M)


def test_lift_examples():
    assert monomial_to_projective(MonomialMap(((1, 0), (0, 1)))) == ProjMap.identity(2)
    assert monomial_to_projective(MonomialMap(((0, 1), (1, 0)))).strings() == ["x0", "x2", "x1"]
    f = monomial_to_projective(MonomialMap.from_zeta(1, 2))
    assert f.degree == 5 and compose(f, f).degree == 8


def test_power_degrees_examples():
    assert power_degrees(MonomialMap(((1, 0), (0, 1))), 4) == [1, 1, 1, 1]
    assert power_degrees(MonomialMap.from_zeta(1, 2), 5) == [5, 8, 22, 48, 117]
    assert power_degrees(MonomialMap.from_zeta(-3, 4), 1) == [8]
    with pytest.raises(ValueError):
        power_degrees(MonomialMap(((1, 0, 0), (0, 1, 0), (0, 0, 1))), 2)


@pytest.mark.parametrize("zeta", [(1, 2), (-3, 4), (2, -1), (0, 1)])
def test_power_degrees_match_composition(zeta):
    h = MonomialMap.from_zeta(*zeta)
    f = monomial_to_projective(h)
    fj, got = f, []
    for _ in range(3):
        got.append(fj.degree)
        fj = compose(f, fj)
    assert power_degrees(h, 3) == got


def test_zeta_shorthand():
    assert MonomialMap.from_zeta(1, 2).M == ((1, 2), (-2, 1))
    assert MonomialMap.from_json({"zeta": [-3, 4]}).M == ((-3, 4), (-4, -3))
    h = MonomialMap.from_json({"n": 2, "rows": [[2, 1], [1, 1]]})
    assert MonomialMap.from_json(h.to_json()) == h
    with pytest.raises(ValueError):
        MonomialMap.from_json({"n": 3, "rows": [[2, 1], [1, 1]]})
    with pytest.raises(SingularMatrix):
        MonomialMap(((1, 1), (1, 1)))


# -- dynamical degrees --------------------------------------------------------------

def test_dyn_degrees_examples():
    for d in dyn_degrees_monomial(MonomialMap(monomial.identity(3)), TOL):
        assert d.contains(1) and d.radius <= TOL
    d1, d2 = dyn_degrees_monomial(MonomialMap.from_zeta(1, 2), TOL)
    assert d2.is_exact and d2.value == 5
    assert d1.contains(Fraction(mpmath.nstr(mpmath.sqrt(5), 30)))
    assert d1.radius <= TOL
    assert dyn_degrees_monomial(MonomialMap.from_zeta(-3, 4))[1].value == 25


@given(any_matrix)
def test_char_poly_matches_sympy(rows):
    t = sympy.Symbol("t")
    expected = sympy.Matrix(rows).charpoly(t).all_coeffs()[::-1]
    assert list(char_poly(monomial.as_matrix(rows))) == [int(c) for c in expected]


@given(any_matrix)
def test_exterior_power_matches_minors(rows):
    M = sympy.Matrix(rows)
    n = len(rows)
    for k in range(1, n + 1):
        idx = list(itertools.combinations(range(n), k))
        expected = [[M.extract(list(r), list(c)).det() for c in idx] for r in idx]
        assert [list(r) for r in exterior_power(monomial.as_matrix(rows), k)] == expected


@given(any_matrix)
def test_dyn_degree_properties(rows):
    h = MonomialMap(rows)
    deltas = dyn_degrees_monomial(h, Fraction(1, 10**9))
    assert deltas[-1].is_exact and deltas[-1].value == abs(monomial.det(rows))
    assert abs(float(deltas[0]) - sympy_radius(rows)) < 1e-6
    for k, d in enumerate(deltas, start=1):
        assert d.hi >= 1 and d.lo <= deltas[0].hi ** k
    ok, k = check_log_concavity([1, *deltas])
    assert ok, k


@given(st.integers(2, 3).flatmap(lambda n: nonsingular(n, 3)), st.integers(2, 3))
def test_dyn_degrees_of_powers(rows, m):
    h = MonomialMap(rows)
    base = dyn_degrees_monomial(h, Fraction(1, 10**9))
    powered = dyn_degrees_monomial(h.power(m), Fraction(1, 10**9))
    for d, dm in zip(base, powered):
        assert abs(float(d) ** m - float(dm)) <= 1e-6 * max(1.0, float(dm))


# -- Pisot and hyperbolicity -----------------------------------------------------------

def test_pisot_examples():
    assert not pisot_check([1, 0, 1]).is_pisot
    v = pisot_check([-1, -1, -1, 1])
    assert v.is_pisot and v.irreducible
    assert abs(v.dominant_root.value - Fraction("1.8393")) < Fraction(1, 10**4)
    assert all(m.hi < 1 for m in v.other_root_moduli)
    g = pisot_check([-1, -1, 1])
    golden = (1 + sympy.sqrt(5)) / 2
    assert g.is_pisot and abs(float(g.dominant_root) - float(golden)) < 1e-10
    assert abs(float(g.other_root_moduli[0]) - float(golden - 1)) < 1e-10


def test_pisot_rejections():
    assert pisot_check([2, 0, 1]).reason == "no real root greater than 1"  # t^2 + 2
    assert pisot_check([6, -5, 1]).reason == "reducible over Q"
    # t^3 - 3t + 1 has roots near 1.53, 0.35 and -1.88
    assert pisot_check([1, -3, 0, 1]).reason == "2 root(s) outside the open unit disk"
    assert not pisot_check([-1, 0, 2]).is_pisot  # not monic
    assert pisot_check([-1, 1]).reason == "no real root greater than 1"
    with pytest.raises(monomial.Uncertifiable):
        pisot_check([1, -1, -1, -1, 1])  # Salem: two conjugates on the unit circle


@given(st.lists(st.integers(-4, 4), min_size=2, max_size=4))
def test_pisot_matches_numeric_definition(low):
    p = [*low, 1]
    try:
        v = pisot_check(p)
    except monomial.Uncertifiable:
        return
    roots = numeric_roots(p)
    real_above = [r for r in roots if abs(r.imag) < 1e-20 and r.real > 1]
    t = sympy.Symbol("t")
    _, factors = sympy.factor_list(sympy.Poly(list(reversed(p)), t))
    irreducible = len(factors) == 1 and factors[0][1] == 1
    expected = irreducible and len(real_above) == 1 and sum(1 for r in roots if abs(r) < 1) == len(roots) - 1
    assert v.is_pisot is expected


@pytest.mark.parametrize("rows, expected", [
    (((1, 2), (-2, 1)), False),
    (((2, 1), (1, 1)), True),
    (((1, 0), (0, 1)), False),
    (((-2, -1), (-1, -1)), True),  # dominant eigenvalue negative
])
def test_coh_hyp_examples(rows, expected):
    r = is_1_coh_hyp_monomial(MonomialMap(rows))
    assert r.pisot_verdict is expected and r.delta_verdict is expected and r.agree


@given(any_matrix)
def test_coh_hyp_verdicts_agree(rows):
    r = is_1_coh_hyp_monomial(MonomialMap(rows))
    if r.pisot_verdict is not None:
        assert r.agree


def test_monomial_report_json():
    rep = monomial_report(MonomialMap.from_zeta(-3, 4), J=3)
    doc = rep.to_json()
    assert doc["degrees"][0] == 8 and doc["char_poly"] == [25, 6, 1]
    assert doc["coh_hyp_p"] == 2 and doc["pisot"] is False
    assert classify(rep.dyn_degrees).p == 2
    # companion matrix of t^3 - t^2 - t - 1
    rep3 = monomial_report(MonomialMap(((0, 1, 0), (0, 0, 1), (1, 1, 1))))
    assert rep3.degrees is None and rep3.coh_hyp_p == 1 and rep3.coh_hyp.pisot_verdict
    # block sum with a fixed direction: delta_1 = delta_2, no dominant index
    assert monomial_report(MonomialMap(((2, 1, 0), (1, 1, 0), (0, 0, 1)))).coh_hyp_p is None

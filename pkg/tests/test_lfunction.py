from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from klfrob import finite_field as ff
from klfrob.cyclotomic import CycInt, lambda_valuation
from klfrob.expsums import LaurentPoly, toric_sum_Sm
from klfrob.lfunction import (PowerSumSeq, charpoly_from_power_sums, companion_power_sums,
                              frobenius_charpoly, frobenius_power_sums, hodge_polygon_preset,
                              lpoly_from_sums, newton_polygon, ordinarity_check, unit_root)
from klfrob.padic import PadicCfg


def Z(n, m=2):
    return CycInt.from_int(m, n)


def test_single_eigenvalue():
    c = 7
    poly = charpoly_from_power_sums(PowerSumSeq([Z(c), Z(c**2), Z(c**3)], 2), 1)
    assert poly == [Z(-c), Z(1)]


def test_two_eigenvalues():
    a, b = 3, 5
    poly = charpoly_from_power_sums(PowerSumSeq([Z(a + b), Z(a * a + b * b)], 2), 2)
    assert poly == [Z(a * b), Z(-(a + b)), Z(1)]
    assert poly[0] == Z(((a + b) ** 2 - (a * a + b * b)) // 2)


def test_inexact_division_is_rejected():
    with pytest.raises(ArithmeticError):
        charpoly_from_power_sums(PowerSumSeq([Z(1), Z(2)], 2), 2)


def test_kl2_constant_term():
    f3 = ff.make_field(3, 1)
    poly = frobenius_charpoly("kl", 2, f3, 1)
    assert len(poly) == 3
    assert lambda_valuation(poly[0]) == 1


def test_toy_one_variable_lpoly():
    f3 = ff.make_field(3, 1)
    x1 = LaurentPoly(1, {(1,): 1})
    ts = PowerSumSeq([toric_sum_Sm(x1, f3, m) for m in range(1, 4)], 3)
    assert ts.values == [CycInt.from_int(3, -1)] * 3
    assert lpoly_from_sums(ts, 1) == [CycInt.from_int(3, 1), CycInt.from_int(3, -1)]


def test_f1_lpoly_degree_three():
    rows = ordinarity_check("f_d", 3, 1, 1, 1, extra_sums=2)
    assert all(r.ordinary for r in rows)
    assert all(len(r.newton) == 3 for r in rows)


def test_wrong_degree_is_rejected():
    from klfrob.lfunction import f_d_power_sums

    ts = f_d_power_sums(ff.make_field(3, 1), 1, 1, 1, 5)
    with pytest.raises(ArithmeticError):
        lpoly_from_sums(ts, 2)


def test_polygon_of_known_roots():
    q = 3
    poly = [Z(q, 3), Z(-(1 + q), 3), Z(1, 3)]  # (X - 1)(X - q)
    assert newton_polygon(poly, 1, "charpoly").slopes == [0, 1]


def test_hodge_presets():
    assert hodge_polygon_preset("f_d", 1, 1) == [0, 1, 2]
    assert hodge_polygon_preset("f_d", 1, 2) == [Fraction(k, 2) for k in range(6)]
    assert hodge_polygon_preset("hyp", 1) == [Fraction(1, 2), Fraction(3, 2), Fraction(5, 2)]
    assert hodge_polygon_preset("kl", 3) == [0, 1, 2]
    assert hodge_polygon_preset("so", 2) == [0, 1, 2, 3, 4]


def test_kl3_slopes():
    poly = frobenius_charpoly("kl", 3, ff.make_field(2, 1), 1)
    assert poly == [Z(-8), Z(-2), Z(1), Z(1)]
    assert newton_polygon(poly, 1).slopes == [0, 1, 2]
    for row in ordinarity_check("kl", 2, 2, 3):
        assert row.newton == [0, 1, 2]


def test_hypergeometric_slopes():
    for row in ordinarity_check("hyp", 3, 1, 1):
        assert row.newton == [Fraction(1, 2), Fraction(3, 2), Fraction(5, 2)]


def test_so5_slopes_p3():
    for row in ordinarity_check("so", 3, 1, 2):
        assert row.ordinary and row.newton == [0, 1, 2, 3, 4]


def test_unit_root_of_kl3():
    cfg = PadicCfg(2, 20)
    poly = frobenius_charpoly("kl", 3, ff.make_field(2, 1), 1)
    root = unit_root(poly, cfg)
    assert root.is_unit()
    # root of X^3 + X^2 - 2X - 8 to 20 digits
    assert int(root.coords[0]) % 2**20 == 811097
    assert (root**3 + root**2 - root * 2 - 8).valuation() >= 20


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-30, 30), min_size=1, max_size=5), st.sampled_from([2, 3, 5]))
def test_newton_identities_roundtrip(roots, m):
    # build prod (X - r_i), take power sums, and recover the polynomial
    poly = [CycInt.one(m)]
    for r in roots:
        new = [CycInt.zero(m)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i + 1] = new[i + 1] + c
            new[i] = new[i] - c * r
        poly = new
    ts = companion_power_sums(poly, len(roots))
    assert ts == [CycInt.from_int(m, sum(r**k for r in roots)) for k in range(1, len(roots) + 1)]
    assert charpoly_from_power_sums(PowerSumSeq(ts, 1), len(roots)) == poly


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.sampled_from([1, 2, 4, 5, 7])), min_size=1, max_size=5))
def test_newton_polygon_reads_root_valuations(spec):
    # roots 3^k u with u prime to 3 have valuation k
    roots = [3**k * u for k, u in spec]
    poly = [CycInt.one(3)]
    for r in roots:
        new = [CycInt.zero(3)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i + 1] = new[i + 1] + c
            new[i] = new[i] - c * r
        poly = new
    assert newton_polygon(poly, 1, "charpoly").slopes == sorted(Fraction(k) for k, _ in spec)

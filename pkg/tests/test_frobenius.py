import math
from fractions import Fraction

import pytest

from klfrob import finite_field as ff
from klfrob.dwork import bessel_sequence, so_sequence
from klfrob.frobenius import (connection_preset, frobenius_at_point, ode_solution_series,
                              residual_check, slope_set_at_point, solve_frobenius, trace_check)
from klfrob.padic import PiRational, dwork_exponential_coeffs, vp


@pytest.fixture(scope="module")
def solved():
    cache = {}

    def get(label, n, p, M=24, D=64):
        key = (label, n, p, M, D)
        if key not in cache:
            cache[key] = solve_frobenius(connection_preset(label, n, p), M, D)
        return cache[key]

    return get


def test_gl2_preset_shape():
    spec = connection_preset("GLn", 2, 3)
    assert spec.dense("A0") == [[0, 1], [0, 0]]
    assert spec.dense("A1") == [[0, 0], [1, 0]]
    # lambda^h = (-pi)^2 = pi^2
    assert spec.lam_h == PiRational.pi_power(3, 2)


def test_so3_preset_shape():
    spec = connection_preset("SO2n1", 1, 2)
    assert spec.r == 3
    a1 = spec.dense("A1")
    assert a1[1][0] == 2 and a1[2][1] == 2
    assert sum(x != 0 for row in a1 for x in row) == 2


def test_unknown_preset():
    with pytest.raises(ValueError):
        connection_preset("E8", 1, 2)


def test_bessel_solution_coefficients():
    spec = connection_preset("GLn", 3, 2)
    ser = ode_solution_series(spec, 20)
    F = bessel_sequence(1, sign=1)  # lambda = -pi = 2 at p = 2
    assert [c.coords[0] for c in ser.exact] == [F(r) for r in range(21)]
    assert ser.exact[0] == PiRational.from_rational(2, 1)
    spec3 = connection_preset("GLn", 2, 3)
    ser3 = ode_solution_series(spec3, 10)
    lam2 = PiRational.pi_power(3, 2)
    acc = PiRational.from_rational(3, 1)
    for r, c in enumerate(ser3.exact):
        assert c == acc * Fraction(1, math.factorial(r) ** 2)
        acc = acc * lam2


def test_so_solution_coefficients_are_integral():
    ser = ode_solution_series(connection_preset("SO2n1", 1, 2), 40)
    G = so_sequence(1)
    assert [c.coords[0] for c in ser.exact] == [G(r) for r in range(41)]
    assert all(vp(G(r), 2) >= 0 for r in range(41))


def test_rank_one_is_the_dwork_exponential():
    for p in (2, 3):
        fs = solve_frobenius(connection_preset("GLn", 1, p), 24, 32)
        exp = dwork_exponential_coeffs(p, 33)
        assert [m[0][0] for m in fs.phi] == exp


def test_initial_term_gl3_p2(solved):
    fs = solved("GLn", 3, 2)
    diag = [fs.phi0[i][i].coords[0] for i in range(3)]
    lower = [fs.phi0[i][j] for i in range(3) for j in range(3) if i > j]
    assert diag == [4, 2, 1]
    # the degree-0 term is diag(p^{r-1}, ..., 1) times a unipotent polynomial in A0
    assert not any(lower)


def test_residual_gl2_p3():
    fs = solve_frobenius(connection_preset("GLn", 2, 3), 24, 60)
    assert fs.residual_zero
    assert residual_check(fs.spec, fs.phi, 24)


@pytest.mark.parametrize("label,n,p", [("GLn", 2, 2), ("GLn", 2, 3), ("GLn", 3, 2), ("SO2n1", 1, 3)])
def test_trace_matches_sums(solved, label, n, p):
    fs = solved(label, n, p)
    rows = trace_check(fs, 16)
    assert rows and all(r.passed for r in rows)
    assert fs.growth_slope > 0
    assert min(fs.coeff_valuations) >= 0


def test_determinant_valuation(solved):
    # det phi(a) has valuation r(r-1)/2 in units v(p) = 1
    for label, n, p, r in (("GLn", 3, 2, 3), ("GLn", 2, 3, 2)):
        pv = frobenius_at_point(solved(label, n, p), 1)
        e = p - 1
        assert pv.det_valuation == e * r * (r - 1) // 2


def test_plain_rational_pipeline_gl2_p2(solved):
    # with p = 2 everything is rational (pi = -2); redo the defining equation and the
    # trace with plain Fractions
    fs = solved("GLn", 2, 2)
    D = fs.D
    phi = [[[x.coords[0] for x in row] for row in m] for m in fs.phi]
    A0 = [[Fraction(0), Fraction(1)], [Fraction(0), Fraction(0)]]
    A1 = [[Fraction(0), Fraction(0)], [Fraction(4), Fraction(0)]]  # (-pi)^2 = 4

    def mm(a, b):
        return [[sum(a[i][t] * b[t][j] for t in range(2)) for j in range(2)] for i in range(2)]

    def add(a, b, c=1):
        return [[a[i][j] + c * b[i][j] for j in range(2)] for i in range(2)]

    zero = [[Fraction(0)] * 2 for _ in range(2)]
    # coefficient of x^k in delta(phi) + phi A(x) - 2 A(x^2) phi
    for k in range(D + 1):
        res = add([[k * x for x in row] for row in phi[k]], mm(phi[k], A0))
        res = add(res, mm(A0, phi[k]), -2)
        if k >= 1:
            res = add(res, mm(phi[k - 1], A1))
        if k >= 2:
            res = add(res, mm(A1, phi[k - 2]), -2)
        assert res == zero, k
    trace = sum((phi[k][0][0] + phi[k][1][1] for k in range(D + 1)), Fraction(0))
    # teichmuller(1) = 1; S_2(1) over F_2 is 1, so the trace is -1
    assert vp(trace + 1, 2) >= 16


def test_slopes_at_points():
    assert slope_set_at_point(connection_preset("GLn", 3, 2), ff.make_field(2, 1), 1) == [0, 1, 2]
    assert sorted(slope_set_at_point(connection_preset("SO2n1", 2, 3), ff.make_field(3, 1), 1)) == [0, 1, 2, 3, 4]
    f4 = ff.make_field(2, 2)
    sets = {tuple(slope_set_at_point(connection_preset("GLn", 2, 2), f4, a)) for a in range(1, 4)}
    assert sets == {(0, 1)}


def test_hypergeometric_preset_solves():
    fs = solve_frobenius(connection_preset("scalar-hypergeometric", 2, 3), 16, 32)
    assert min(fs.coeff_valuations) >= 0
    assert fs.growth_slope > 0

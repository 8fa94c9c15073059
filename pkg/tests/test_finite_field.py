import pytest
from hypothesis import given, settings, strategies as st

from klfrob import finite_field as ff


def test_prime_field_modulus():
    assert ff.make_field(2, 1).modulus == (0, 1)
    assert ff.make_field(3, 1).q == 3


def test_default_moduli():
    # lexicographically least irreducible moduli, found by an independent search
    assert ff.make_field(2, 2).modulus == (1, 1, 1)
    assert ff.make_field(2, 3).modulus == (1, 1, 0, 1)
    assert ff.make_field(2, 4).modulus == (1, 1, 0, 0, 1)
    assert ff.make_field(3, 2).modulus == (1, 0, 1)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        ff.make_field(4, 1)
    with pytest.raises(ValueError):
        ff.make_field(2, 2, (1, 0, 1))  # x^2 + 1 = (x + 1)^2 over F_2
    with pytest.raises(ValueError):
        ff.make_field(2, 0)


def test_trace_examples():
    f4 = ff.make_field(2, 2)
    g = 2  # the class of t
    assert ff.trace(f4, 1) == 0
    assert ff.trace(f4, g) == 1
    assert ff.trace(ff.make_field(3, 1), 2) == 2


@pytest.mark.parametrize("p,s,table", [
    (2, 2, [0, 0, 1, 1]),
    (3, 2, [0, 2, 1, 0, 2, 1, 0, 2, 1]),
    (2, 3, [0, 1, 0, 1, 0, 1, 0, 1]),
])
def test_trace_tables_frozen(p, s, table):
    f = ff.make_field(p, s)
    assert [ff.trace(f, x) for x in range(f.q)] == table


def test_norm_examples():
    f4 = ff.make_field(2, 2)
    assert ff.norm(f4, 2) == 1
    assert ff.norm(f4, 1) == 1
    assert ff.norm(f4, 0) == 0
    f16 = ff.make_field(2, 4)
    with pytest.raises(ValueError):
        ff.norm(f16, 3, 3)
    # the norm to F_4 lands in the subfield: it is fixed by x -> x^4
    n = ff.norm(f16, 3, 2)
    assert ff.power(f16, n, 4) == n


def test_units_enumeration():
    assert [x.value for x in ff.units_iter(ff.make_field(2, 1))] == [1]
    assert len(list(ff.units_iter(ff.make_field(2, 2)))) == 3
    f9 = ff.make_field(3, 2)
    us = list(ff.units_iter(f9))
    assert len(us) == 8
    assert all(u**8 == f9(1) for u in us)


def test_element_wrapper():
    f4 = ff.make_field(2, 2)
    g = f4(2)
    assert g * g == g + 1
    assert (g / g) == f4(1)
    assert g.trace() == 1
    assert f4([0, 1]) == g


def test_extension_embedding_is_a_ring_map():
    base = ff.make_field(2, 2)
    ext = ff.extension(base, 3)
    for x in range(base.q):
        for y in range(base.q):
            assert ext.embed(ff.mul(base, x, y)) == ff.mul(ext.big, ext.embed(x), ext.embed(y))
            assert ext.embed(ff.add(base, x, y)) == ff.add(ext.big, ext.embed(x), ext.embed(y))


def test_tables_roundtrip():
    f = ff.make_field(3, 2)
    t = ff.field_tables(f)
    for x in range(1, f.q):
        assert int(t.exp[int(t.log[x])]) == x


FIELDS = [(2, 1), (2, 3), (3, 1), (3, 2), (5, 1), (2, 4), (7, 1)]


@st.composite
def field_and_elems(draw, k=3):
    p, s = draw(st.sampled_from(FIELDS))
    f = ff.make_field(p, s)
    return f, [draw(st.integers(0, f.q - 1)) for _ in range(k)]


@settings(max_examples=300, deadline=None)
@given(field_and_elems())
def test_field_axioms(data):
    f, (x, y, z) = data
    assert ff.mul(f, x, ff.add(f, y, z)) == ff.add(f, ff.mul(f, x, y), ff.mul(f, x, z))
    assert ff.mul(f, ff.mul(f, x, y), z) == ff.mul(f, x, ff.mul(f, y, z))
    assert ff.add(f, x, ff.neg(f, x)) == 0
    if x:
        assert ff.mul(f, x, ff.inv(f, x)) == 1
        assert ff.power(f, x, f.q - 1) == 1


@settings(max_examples=300, deadline=None)
@given(field_and_elems())
def test_trace_and_norm_homomorphisms(data):
    f, (x, y, _) = data
    assert ff.trace(f, ff.add(f, x, y)) == (ff.trace(f, x) + ff.trace(f, y)) % f.p
    assert ff.norm(f, ff.mul(f, x, y)) == ff.mul(f, ff.norm(f, x), ff.norm(f, y)) % f.p
    assert ff.trace(f, ff.frobenius(f, x)) == ff.trace(f, x)

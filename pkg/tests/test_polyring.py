from math import prod

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicmoments.field import make_field
from cubicmoments.polyring import (
    Poly,
    decode_poly,
    descend,
    divisor_count,
    encode_poly,
    enumerate_monic,
    enumerate_squarefree,
    factorize,
    frobenius_conjugate,
    gcd,
    inverse_mod,
    irreducible_count,
    is_irreducible,
    lift,
    mobius,
    monic_count,
    monic_table,
    squarefree_count,
    xgcd,
)

F5, F25 = make_field(5, 1), make_field(5, 2)


def polys(F, max_degree=5):
    return st.lists(st.integers(0, F.q - 1), max_size=max_degree + 1).map(lambda c: Poly(F, tuple(c)))


@settings(max_examples=80, deadline=None)
@given(polys(F25), polys(F25), polys(F25))
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Poly.zero(F25)


@settings(max_examples=80, deadline=None)
@given(polys(F25, 7), polys(F25, 4))
def test_division_with_remainder(a, b):
    if b.is_zero():
        return
    quo, rem = divmod(a, b)
    assert quo * b + rem == a
    assert rem.is_zero() or rem.degree < b.degree


@settings(max_examples=60, deadline=None)
@given(polys(F25, 4), polys(F25, 4))
def test_bezout(a, b):
    if a.is_zero() and b.is_zero():
        return
    d, s, t = xgcd(a, b)
    assert s * a + t * b == d
    assert d.divides(a) and d.divides(b)
    assert gcd(a, b) == d


def test_inverse_mod():
    m = Poly.from_ints(F25, [2, 0, 1, 1])
    for a in list(enumerate_monic(F25, 2))[:50]:
        if gcd(a, m).is_one():
            assert (a * inverse_mod(a, m)) % m == Poly.one(F25)


@pytest.mark.parametrize("F", [F5, F25], ids=["F5", "F25"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_irreducible_counts_match_enumeration(F, n):
    found = sum(is_irreducible(f) for f in enumerate_monic(F, n))
    assert found == irreducible_count(F.q, n)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_squarefree_counts(n):
    assert sum(1 for _ in enumerate_squarefree(F5, n)) == squarefree_count(5, n)
    assert monic_count(5, n) == 5**n


def test_factorization_round_trip():
    for f in list(enumerate_monic(F25, 4))[::997] + list(enumerate_monic(F5, 6))[::311]:
        fac = factorize(f)
        assert fac.expand(f.spec) == f
        assert all(is_irreducible(p) for p, _ in fac.factors)


def test_factorization_of_repeated_and_inseparable_factors():
    x = Poly.T(F5)
    f = (x + Poly.one(F5)) ** 7 * (x**2 + Poly.const(F5, 2)) ** 2
    assert factorize(f).expand(F5) == f


def test_mobius_and_divisor_functions():
    T = Poly.T(F5)
    assert mobius(Poly.one(F5)) == 1
    assert mobius(T * (T + Poly.one(F5))) == 1
    assert mobius(T**2) == 0
    assert divisor_count(T**3, 2) == 4
    assert divisor_count(T**3, 3) == 10


def test_monic_table_matches_pointwise_functions():
    table = monic_table(F5, 4)
    mu, d2, d3 = table.mobius, table.divisor_counts(2), table.divisor_counts(3)
    for idx in range(0, len(mu), 37):
        f = table.poly(idx)
        assert table.index_of(f) == idx
        assert mu[idx] == mobius(f)
        assert d2[idx] == divisor_count(f, 2)
        assert d3[idx] == divisor_count(f, 3)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_mobius_sums_vanish(n):
    table = monic_table(F5, 4)
    assert table.mobius[table.layer(n)].sum() == (-5 if n == 1 else 0)


def test_d2_layer_sums():
    table = monic_table(F5, 4)
    d2 = table.divisor_counts(2)
    for n in range(5):
        assert d2[table.layer(n)].sum() == (n + 1) * 5**n


def test_encode_decode_round_trip():
    for f in list(enumerate_monic(F25, 3))[::501] + [Poly.one(F25), Poly.zero(F25)]:
        assert decode_poly(F25, encode_poly(f)) == f


def test_frobenius_conjugation_is_an_involution():
    for f in list(enumerate_monic(F25, 3))[::211]:
        g = frobenius_conjugate(f)
        assert frobenius_conjugate(g) == f
        assert descend(f * g, F5) is not None


def test_lift_and_descend():
    for f in enumerate_monic(F5, 2):
        assert descend(lift(f, F25), F5) == f
    outside = next(a for a in range(F25.q) if not F25.in_subfield(a, 1))
    assert descend(Poly(F25, (outside, 1)), F5) is None


def test_product_of_all_monic_irreducibles_of_degree_dividing_n():
    # T^(q^n) - T is the product of monic irreducibles with degree dividing n
    n = 2
    T = Poly.T(F5)
    target = T ** (5**n) - T
    primes = [f for d in (1, 2) for f in enumerate_monic(F5, d) if is_irreducible(f)]
    assert prod(primes[1:], start=primes[0]) == target
    assert len(primes) == sum(irreducible_count(5, d) for d in (1, 2))

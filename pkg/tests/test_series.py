from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicmoments.characters import FamilySpec, family_members, member_char
from cubicmoments.cyclo import QuadExtNumber
from cubicmoments.field import make_field
from cubicmoments.polyring import Poly, enumerate_monic, is_irreducible, lift
from cubicmoments.series import (
    TruncSeries1,
    TruncSeries2,
    a_q_partial,
    a_q_series,
    a_q_value,
    arithmetic_direct,
    arithmetic_series,
    b2_identity_check,
    character_series,
    family_count_genfun_check,
    family_count_lhs,
    perron_extract,
    tail_bound,
    zeta_series,
    zeta_value,
)

N = 5
fracs = st.fractions(min_value=-9, max_value=9, max_denominator=6)
series1 = st.lists(fracs, min_size=N + 1, max_size=N + 1).map(lambda c: TruncSeries1(c, N))
units1 = st.tuples(st.sampled_from([Fraction(1), Fraction(-2), Fraction(1, 3)]), st.lists(fracs, min_size=N, max_size=N)).map(
    lambda t: TruncSeries1([t[0], *t[1]], N)
)
series2 = st.lists(st.lists(fracs, min_size=4, max_size=4), min_size=3, max_size=3).map(lambda c: TruncSeries2(c, 2, 3))


@settings(max_examples=60, deadline=None)
@given(series1, series1, series1)
def test_one_variable_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * TruncSeries1.one(N) == a


@settings(max_examples=40, deadline=None)
@given(units1)
def test_one_variable_inverse_and_powers(a):
    assert a * a.inverse() == TruncSeries1.one(N)
    assert a**-2 == (a * a).inverse()
    assert a**3 == a * a * a


@settings(max_examples=40, deadline=None)
@given(series2, series2, series2)
def test_two_variable_ring_axioms(a, b, c):
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    unit = TruncSeries2.one(2, 3) + a * TruncSeries2.monomial(Fraction(1), 1, 0, 2, 3)
    assert unit * unit.inverse() == TruncSeries2.one(2, 3)


def test_zeta_series_and_values():
    z = zeta_series(5, 4)
    assert [z[n] for n in range(5)] == [1, 5, 25, 125, 625]
    assert zeta_value(5, 3) == Fraction(25, 24)
    half = zeta_value(5, Fraction(3, 2))
    assert isinstance(half, QuadExtNumber)
    assert abs(half.to_complex() - 1 / (1 - 5**-0.5)) < 1e-12
    with pytest.raises(ZeroDivisionError):
        zeta_value(5, 1)


def test_perron_modes():
    z = zeta_series(5, 4)
    assert perron_extract(z, 3) == 125
    assert perron_extract(z, 2, "up-to-n") == 31
    with pytest.raises(ValueError):
        perron_extract(z, 5)


@pytest.mark.parametrize("name", ["one", "d2", "d3", "mobius"])
def test_perron_matches_enumeration(name):
    series = arithmetic_series(5, name, 4)
    direct = arithmetic_direct(5, name, 4)
    for n in range(5):
        assert perron_extract(series, n) == direct[n]
        assert perron_extract(series, n, "up-to-n") == sum(direct[: n + 1])


def test_character_weighted_perron_matches_enumeration():
    spec = FamilySpec(5, 2)
    chi = member_char(spec, family_members(spec)[17])
    small, big = spec.base_field, spec.char_field
    prime_codes = {}
    for d in range(1, 5):
        for R in enumerate_monic(small, d):
            if is_irreducible(R):
                prime_codes[R.key] = chi.value(lift(R, big)).code
    series = character_series(5, prime_codes, 4)
    for n in range(5):
        direct = QuadExtNumber(5)
        for f in enumerate_monic(small, n):
            v = chi.value(lift(f, big))
            if not v.is_zero():
                direct = direct + QuadExtNumber.omega(5, v.exponent)
        assert perron_extract(series, n) == direct


def test_a_q_is_one_at_the_origin():
    assert a_q_series(5, 3, 3)[0, 0] == 1


def test_b2_identity_small_grid():
    assert b2_identity_check(5, 2, 2)


def test_family_generating_function():
    F5 = make_field(5, 1)
    T = Poly.T(F5)
    assert family_count_lhs(5, Poly.one(F5), 3) == [1, 20, 480, 12120]
    for l in (Poly.one(F5), T):
        assert family_count_genfun_check(5, l, 3)


def test_a_q_enclosure():
    enc = a_q_value(5, 1e-8)
    assert enc.width < 1e-8
    assert all(b <= a for a, b in zip(enc.widths, enc.widths[1:]))
    assert abs(float(enc.value) - 0.7022459578) < 1e-8
    with pytest.raises(ValueError):
        a_q_value(5, 0)


def test_a_q_truncations_converge():
    z = QuadExtNumber(5, Fraction(1, 25))
    u = QuadExtNumber.s(5) ** 3
    D = a_q_value(5, 1e-8).truncation_degree
    lo, hi = a_q_partial(5, D, z, u), a_q_partial(5, D + 2, z, u)
    assert abs(float(lo.mid) - float(hi.mid)) < 1e-8
    assert abs(float(lo.mid) - float(hi.mid)) <= tail_bound(5, D) * 2

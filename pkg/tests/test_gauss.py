import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicmoments.characters import cubic_symbol
from cubicmoments.cyclo import CycloNumber
from cubicmoments.field import make_field, make_omega_map
from cubicmoments.gauss import (
    char_sum_via_gauss,
    gauss_average_direct,
    gen_gauss,
    gen_gauss_closed_form,
    gen_gauss_prime_power_collapsed,
    hayes_e,
    multiplicativity_check,
    twisted_relation_check,
)
from cubicmoments.polyring import Poly, enumerate_monic, enumerate_squarefree, factorize, gcd, is_irreducible, lift

F5, F25 = make_field(5, 1), make_field(5, 2)
OMEGA = make_omega_map(F25)
ONE = Poly.one(F25)


def polys(max_degree):
    return st.lists(st.integers(0, 24), max_size=max_degree + 1).map(lambda c: Poly(F25, tuple(c)))


moduli = polys(3).filter(lambda h: not h.is_zero() and h.degree >= 1)


@settings(max_examples=80, deadline=None)
@given(polys(5), polys(5), moduli)
def test_hayes_exponential_is_additive(a, b, h):
    assert hayes_e(a + b, h) == hayes_e(a, h) * hayes_e(b, h)


@settings(max_examples=80, deadline=None)
@given(polys(5), polys(2), moduli)
def test_hayes_exponential_is_periodic(a, k, h):
    assert hayes_e(a + k * h, h) == hayes_e(a, h)


def slow_gauss(V, f):
    total = CycloNumber.zero(5)
    factors = factorize(f).factors
    for coeffs in itertools.product(range(25), repeat=f.degree):
        u = Poly(F25, coeffs)
        exponent = 0
        for P, a in factors:
            c = cubic_symbol(P, u, OMEGA)
            if c.is_zero():
                break
            exponent += a * c.exponent
        else:
            total = total + CycloNumber.omega_power(5, exponent % 3) * hayes_e(u * V, f)
    return total


VS = [ONE, Poly.T(F25), Poly.from_ints(F25, [3, 7, 1]), Poly.zero(F25)]


@pytest.mark.parametrize("f", list(enumerate_monic(F25, 2))[::97], ids=repr)
def test_vectorized_gauss_sum_matches_slow_sum(f):
    for V in VS:
        assert gen_gauss(V, f, OMEGA).value == slow_gauss(V, f)


PRIMES1 = [P for P in enumerate_monic(F25, 1)][:6]
PRIMES2 = [P for P in enumerate_monic(F25, 2) if is_irreducible(P)][:3]


@pytest.mark.parametrize("P", PRIMES1 + PRIMES2, ids=repr)
def test_closed_form_prime_powers(P):
    others = [Poly.from_ints(F25, [2, 1]), Poly.from_ints(F25, [3, 0, 0, 1])]
    for i in range(1, 5):
        for V in [ONE, P, P**2, P**3, P * others[0], others[1], Poly.zero(F25)]:
            closed = gen_gauss_closed_form(V, P, i, OMEGA)
            if P.degree * i <= 4:
                ref = gen_gauss(V, P**i, OMEGA)
                assert ref.value == gen_gauss_prime_power_collapsed(V, P, i, OMEGA).value
            else:
                ref = gen_gauss_prime_power_collapsed(V, P, i, OMEGA)
            assert closed.exact_equals(ref)


def test_multiplicativity_and_twisted_relation():
    deg1 = list(enumerate_monic(F25, 1))
    deg2 = list(enumerate_monic(F25, 2))
    for f1 in deg1[:4]:
        for f2 in deg1[:6] + deg2[::120]:
            if gcd(f1, f2).is_one():
                for V in VS:
                    assert multiplicativity_check(V, f1, f2, OMEGA)
    for f in deg1[::6] + deg2[::80]:
        for a in [Poly.const(F25, k) for k in (1, 6, 11)] + deg1[::10]:
            if gcd(a, f).is_one():
                for V in VS:
                    assert twisted_relation_check(a, V, f, OMEGA)


@pytest.mark.parametrize("d", [0, 1, 2, 3])
def test_gauss_sum_of_rational_squarefree_modulus(d):
    for F in enumerate_squarefree(F5, d):
        assert gen_gauss(ONE, lift(F, F25), OMEGA).value == CycloNumber.rational(5, 5**d)


def test_character_sum_via_gauss_sums():
    for f in list(enumerate_monic(F25, 2))[::50]:
        for m in (0, 1):
            lhs, rhs = char_sum_via_gauss(f, m, OMEGA)
            assert lhs == rhs
    for f in list(enumerate_monic(F25, 3))[::3000]:
        lhs, rhs = char_sum_via_gauss(f, 1, OMEGA)
        assert lhs == rhs


def test_gauss_average_base_cases():
    assert gauss_average_direct(ONE, 0, OMEGA) == CycloNumber.rational(5, 1)
    assert gauss_average_direct(ONE, 1, OMEGA) == CycloNumber.rational(5, 125)


def test_requires_cube_roots_in_the_base():
    with pytest.raises(ValueError):
        gen_gauss(Poly.one(F5), Poly.T(F5), OMEGA)

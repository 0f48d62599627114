from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import primerange

from darmonlab.numberfield import (
    RealPlace,
    UnsupportedField,
    ideal_exponent,
    ideal_gcd,
    ideal_of,
    parse_element,
    parse_field,
    valuation,
)

from conftest import FIELDS, elements, field_specs


# parsing ------------------------------------------------------------------

def test_rational_field(QQ):
    assert (QQ.degree, QQ.discriminant, QQ.real_place_count, QQ.complex_place_count) == (1, 1, 1, 0)


def test_gaussian_minus_five(Qm5):
    assert Qm5.poly == (5, 0, 1)
    assert Qm5.discriminant == -20
    assert (Qm5.real_place_count, Qm5.complex_place_count) == (0, 1)


def test_cubic_signature(cubic):
    assert (cubic.real_place_count, cubic.complex_place_count) == (1, 1)


@pytest.mark.parametrize("spec", ["poly:[3,0,1]", "poly:[-5,0,1]", "poly:[-8,0,0,1,0]"])
def test_non_maximal_power_basis_rejected(spec):
    with pytest.raises(UnsupportedField):
        parse_field(spec)


def test_one_mod_four_uses_half_integral_generator():
    K = parse_field("Q(sqrt,-3)")
    assert K.poly == (1, -1, 1)
    assert K.discriminant == -3


def test_reducible_rejected():
    with pytest.raises(ValueError):
        parse_field("poly:[-1,0,1]")


def test_parse_element(Qm5, QQ):
    assert parse_element(QQ, "5/8").as_rational() == Fraction(5, 8)
    x = parse_element(Qm5, "[1,1]")
    assert x == 1 + Qm5.theta
    with pytest.raises(ValueError):
        parse_element(Qm5, "[1,2,3]")


# prime factorisation --------------------------------------------------------

def test_ramified_two_in_minus_five(Qm5):
    (P, e), = Qm5.factor_rational_prime(2)
    assert (e, P.f) == (2, 1)
    assert P.label() == "(2, t + 1)"


def test_rational_prime_seven(QQ):
    (P, e), = QQ.factor_rational_prime(7)
    assert (e, P.f) == (1, 1)


def test_eleven_is_inert_in_minus_five(Qm5):
    # -5 = 6 mod 11 is not a square mod 11 (squares: 1, 3, 4, 5, 9), so x^2 + 5 stays irreducible.
    (P, e), = Qm5.factor_rational_prime(11)
    assert (e, P.f) == (1, 2)


def test_three_splits_in_minus_five(Qm5):
    fac = Qm5.factor_rational_prime(3)
    assert [(e, P.f) for P, e in fac] == [(1, 1), (1, 1)]


@given(field_specs, st.sampled_from(list(primerange(2, 51))))
def test_sum_ef_equals_degree(spec, p):
    K = FIELDS[spec]
    assert sum(e * P.f for P, e in K.factor_rational_prime(p)) == K.degree


# valuations ------------------------------------------------------------------

def test_valuation_examples(QQ, Qm5):
    assert valuation(QQ.rational(Fraction(5, 8)), QQ.prime(2)) == -3
    assert valuation(1 + Qm5.theta, Qm5.prime(2)) == 1
    for K in (QQ, Qm5):
        for P in K.primes_up_to(30):
            assert valuation(K.one, P) == 0


@given(st.data())
def test_valuation_homomorphism(data):
    K = FIELDS[data.draw(field_specs)]
    x, y = data.draw(elements(K)), data.draw(elements(K))
    for p in (2, 3, 5, 7):
        for P in K.primes_above(p):
            vx, vy = valuation(x, P), valuation(y, P)
            assert valuation(x * y, P) == vx + vy
            s = x + y
            if not s.is_zero():
                vs = valuation(s, P)
                assert vs >= min(vx, vy)
                if vx != vy:
                    assert vs == min(vx, vy)


@given(st.data())
def test_ideal_of_multiplicative(data):
    K = FIELDS[data.draw(field_specs)]
    x, y = data.draw(elements(K)), data.draw(elements(K))
    assert ideal_of(x * y) == ideal_of(x) * ideal_of(y)
    g = ideal_gcd(ideal_of(x), ideal_of(y))
    for P in set(ideal_of(x).exponents) | set(ideal_of(y).exponents):
        assert ideal_exponent(g, P) == min(valuation(x, P), valuation(y, P))


@given(st.data())
def test_norm_sign_matches_real_signs(data):
    K = FIELDS[data.draw(field_specs)]
    x = data.draw(elements(K))
    prod = 1
    for s in K.real_signs(x):
        prod *= s
    # complex places contribute |sigma(x)|^2 > 0
    assert (x.norm() > 0) == (prod > 0)


# real places ---------------------------------------------------------------

def test_real_signs_examples(Qr2, Qm5):
    # real places are ordered by the embedded value of theta: -sqrt2 first
    assert Qr2.real_signs(1 - Qr2.theta) == (1, -1)
    assert Qr2.real_signs(Qr2.theta) == (-1, 1)
    for K in FIELDS.values():
        assert all(s == 1 for s in K.real_signs(K.rational(4)))
    assert Qm5.real_signs(1 + Qm5.theta) == ()


# weak approximation ----------------------------------------------------------

def test_weak_approximation_examples(QQ, Qr2):
    y = QQ.weak_approximate([(QQ.prime(2), QQ.rational(2), 3)], [(0, 1)])
    assert (y - 2).is_zero() or valuation(y - 2, QQ.prime(2)) >= 3
    assert y.as_rational() > 0
    z = Qr2.weak_approximate([], [(0, -1), (1, 1)])
    assert Qr2.real_signs(z) == (-1, 1)
    assert QQ.weak_approximate() == QQ.one


@given(st.data())
def test_weak_approximation_verified(data):
    K = FIELDS[data.draw(field_specs)]
    ps = data.draw(st.lists(st.sampled_from([2, 3, 5, 7, 11]), min_size=1, max_size=3, unique=True))
    congr = []
    for p in ps:
        P = data.draw(st.sampled_from(K.primes_above(p)))
        t = data.draw(elements(K, height=9, nonzero=False))
        t = K.element([Fraction(c.numerator) for c in t.coordinates])
        congr.append((P, t, data.draw(st.integers(1, 4))))
    signs = [(i, data.draw(st.sampled_from([-1, 1]))) for i in range(K.real_place_count)]
    y = K.weak_approximate(congr, signs)
    for P, t, k in congr:
        d = y - t
        assert d.is_zero() or valuation(d, P) >= k
    if signs:
        assert K.real_signs(y) == tuple(s for _, s in signs)


# squares and powers -----------------------------------------------------------

def test_nonsquare_integer(QQ, Qr2):
    assert QQ.find_nonsquare_integer() == 2
    assert Qr2.find_nonsquare_integer() == 3
    for K in FIELDS.values():
        assert K.is_global_square(K.rational(4))


@given(st.data())
def test_global_root_of_power(data):
    K = FIELDS[data.draw(field_specs)]
    x = data.draw(elements(K, height=6))
    k = data.draw(st.integers(2, 3))
    r = K.global_root(x ** k, k)
    assert r is not None and r ** k == x ** k


def test_places_listing(Qr2, cubic):
    assert [type(v) for v in Qr2.places() if not hasattr(v, "prime")] == [RealPlace, RealPlace]
    assert len(cubic.places()) == 2

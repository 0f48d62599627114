from fractions import Fraction
from itertools import islice

import pytest
from hypothesis import given
from hypothesis import strategies as st

from darmonlab.checks import brute_force_hilbert
from darmonlab.localsymbols import (
    archimedean_box,
    candidate_places,
    delta,
    delta_upper,
    hilbert,
    local_square,
    omega,
    reciprocity_check,
    symbol_table,
)
from darmonlab.numberfield import FinitePlace, RealPlace

from conftest import FIELDS, elements, field_specs


def places_of(K, *xs):
    return candidate_places(*xs) + [FinitePlace(P) for p in (3, 5) for P in K.primes_above(p)]


# examples ---------------------------------------------------------------

def test_local_square_examples(QQ):
    assert local_square(QQ.rational(17), FinitePlace(QQ.prime(2)))
    assert local_square(QQ.rational(2), FinitePlace(QQ.prime(7)))
    assert not local_square(QQ.rational(-1), RealPlace(0))
    assert not local_square(QQ.rational(5), FinitePlace(QQ.prime(2)))


def test_hamilton_symbol_table(QQ):
    m = QQ.rational(-1)
    table = {v.label(): s for v, s in symbol_table(m, m)}
    assert table == {"2": -1, "real[0]": -1}
    assert reciprocity_check(m, m)


def test_trivial_first_argument(Qm5):
    for b in (Qm5.rational(7), 1 + Qm5.theta, Qm5.theta):
        assert delta(Qm5.one, b) == []
        assert reciprocity_check(Qm5.one, b)


def test_archimedean_box_examples(QQ, Qr2):
    assert archimedean_box(QQ.rational(4), RealPlace(0))
    assert not archimedean_box(QQ.rational(Fraction(9, 2)), RealPlace(0))
    x = Qr2.theta + 3
    assert archimedean_box(x, RealPlace(0))
    assert not archimedean_box(x, RealPlace(1))


def test_delta_upper_and_omega(QQ):
    a, b = QQ.rational(2), QQ.rational(3)
    assert [v.label() for v in delta(a, b)] == ["2", "3"]
    assert [v.label() for v in delta_upper(a, b)] == ["2", "3"]
    m = QQ.rational(-1)
    assert delta_upper(m, m) == []
    assert [v.label() for v in omega(a, b, QQ.rational(-1), QQ.rational(3))] == ["3"]


def test_zero_rejected(QQ):
    with pytest.raises(ValueError):
        hilbert(QQ.zero, QQ.one, RealPlace(0))


# properties ---------------------------------------------------------------

@given(st.data())
def test_bimultiplicative_and_symmetric(data):
    K = FIELDS[data.draw(field_specs)]
    a, b, c = (data.draw(elements(K, 12)) for _ in range(3))
    for v in places_of(K, a, b, c):
        assert hilbert(a, b * c, v) == hilbert(a, b, v) * hilbert(a, c, v)
        assert hilbert(a, b, v) == hilbert(b, a, v)


@given(st.data())
def test_steinberg_relations(data):
    K = FIELDS[data.draw(field_specs)]
    a = data.draw(elements(K, 15))
    for v in places_of(K, a):
        assert hilbert(a, -a, v) == 1
        if not (1 - a).is_zero():
            assert hilbert(a, 1 - a, v) == 1


@given(st.data())
def test_local_square_pairs_trivially(data):
    K = FIELDS[data.draw(field_specs)]
    a = data.draw(elements(K, 15))
    bs = data.draw(st.lists(elements(K, 15), min_size=50, max_size=50))
    for v in places_of(K, a):
        if local_square(a, v):
            assert all(hilbert(a, b, v) == 1 for b in bs)


@given(st.data())
def test_nonsquare_has_nontrivial_partner(data):
    K = FIELDS[data.draw(field_specs)]
    a = data.draw(elements(K, 15))
    sweep = [K.rational(s) for s in (-1, 2, -2, 3, -3, 5, -5, 6, -6, 7, -7, 10, -10, 11, 13, 17)]
    sweep += [K.theta + k for k in range(-3, 4) if not (K.theta + k).is_zero()]
    for v in places_of(K, a):
        if not local_square(a, v):
            partners = list(sweep)
            if isinstance(v, FinitePlace):
                pi = K.uniformizer(v.prime)
                partners += [pi * s for s in sweep] + [pi]
                # small residues supply a unit that is a nonsquare mod P
                reps = islice(K.residue_representatives(v.prime, 1), 200)
                partners += [K.element(list(r)) for r in reps if any(r)]
            assert any(hilbert(a, b, v) == -1 for b in partners if not b.is_zero())


@given(st.data())
def test_reciprocity_and_even_delta(data):
    K = FIELDS[data.draw(field_specs)]
    a, b = data.draw(elements(K)), data.draw(elements(K))
    assert reciprocity_check(a, b)
    assert len(delta(a, b)) % 2 == 0


@given(st.data())
def test_square_class_invariance(data):
    K = FIELDS[data.draw(field_specs)]
    a, b, x = (data.draw(elements(K, 12)) for _ in range(3))
    assert delta(a, b * x * x) == delta(a, b)


@given(st.integers(-50, 50).filter(bool), st.integers(-50, 50).filter(bool), st.sampled_from([3, 5, 7, 11, 13]))
def test_tame_symbol_matches_search(a, b, p):
    K = FIELDS["Q"]
    assert hilbert(K.rational(a), K.rational(b), FinitePlace(K.prime(p))) == brute_force_hilbert(a, b, p)


def test_brute_force_oracle_known_values():
    assert brute_force_hilbert(-1, -1, 2) == -1
    assert brute_force_hilbert(2, 3, 3) == -1
    assert brute_force_hilbert(2, 5, 5) == -1
    assert brute_force_hilbert(-1, -1, None) == -1
    assert brute_force_hilbert(-1, 3, 7) == 1


def test_even_places_can_ramify_with_unit_entries(QQ):
    # taken literally, "ramified finite places have a or b of nonzero valuation" fails at 2
    m = QQ.rational(-1)
    v2 = FinitePlace(QQ.prime(2))
    assert hilbert(m, m, v2) == -1
    assert QQ.valuation(m, v2.prime) == 0
    assert v2 in delta(m, m) and v2 not in delta_upper(m, m)
    # odd places never do: a unit pair has trivial tame symbol
    for a, b in [(-1, 3), (2, 5), (-3, 7)]:
        for v in candidate_places(QQ.rational(a), QQ.rational(b)):
            if isinstance(v, FinitePlace) and v.prime.p != 2 and hilbert(QQ.rational(a), QQ.rational(b), v) == -1:
                assert valuation_nonzero(QQ, a, b, v)


def valuation_nonzero(K, a, b, v):
    return K.valuation(K.rational(a), v.prime) != 0 or K.valuation(K.rational(b), v.prime) != 0

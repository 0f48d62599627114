"""Quadratic Hilbert symbols, local squares and ramification sets.

Every finite place P carries a finite F_2-vector space K_P^*/K_P^*2 together
with the symmetric pairing matrix of the Hilbert symbol on a fixed basis.
At odd places the tame formula is used directly.  At dyadic places the
square classes are tabulated on residues modulo P^(2e+1) and the pairing is
computed from norm groups z^2 - a x^2, so no global reciprocity is assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from . import _arith as A
from .numberfield import (
    ComplexPlace,
    FieldElement,
    FinitePlace,
    NumberField,
    Place,
    PrimeIdeal,
    RealPlace,
    place_sort_key,
)

PlaceSet = list  # ordered list of distinct places


def _nonzero(*xs: FieldElement) -> None:
    for x in xs:
        if x.is_zero():
            raise ValueError("Hilbert symbols need nonzero arguments")


# --------------------------------------------------------------------------
# odd places
# --------------------------------------------------------------------------

def _unit_part(x: FieldElement, P: PrimeIdeal) -> tuple[int, FieldElement]:
    K = x.field
    v = K.valuation(x, P)
    if v == 0:
        return 0, x
    return v, x * K.uniformizer(P) ** (-v)


def _odd_symbol(a: FieldElement, b: FieldElement, P: PrimeIdeal) -> int:
    K = a.field
    alpha, ua = _unit_part(a, P)
    beta, ub = _unit_part(b, P)
    # tame symbol: (-1)^(alpha beta) a^beta / b^alpha, a unit at P
    t = ua ** beta * ub ** (-alpha)
    if (alpha * beta) % 2 and P.norm % 4 == 3:
        t = -t
    return 1 if K.residue_is_power(t, P, 2) else -1


# --------------------------------------------------------------------------
# dyadic places
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _DyadicData:
    level: int                       # 2e + 1
    unit_class: dict                 # residue mod P^level -> bit vector (units)
    unit_basis: tuple                # residue representatives of the unit basis
    dim: int                         # dimension of K_P^* / K_P^*2
    pairing: tuple                   # rows as bit masks, index 0 is the uniformizer


def _unit_table(K: NumberField, P: PrimeIdeal, level: int):
    reps = [r for r in K.residue_representatives(P, level) if any(K.reduce_mod(K.element(list(r)), P, 1))]
    one = K.reduce_mod(K.one, P, level)
    squares = {K.residue_mul(r, r, P, level) for r in reps}
    table = {s: 0 for s in squares}
    basis = []
    for r in reps:
        if r in table:
            continue
        bit = 1 << len(basis)
        basis.append(r)
        for s, vec in list(table.items()):
            table[K.residue_mul(r, s, P, level)] = vec | bit
    assert table[one] == 0
    return table, tuple(basis)


def _dyadic_class_unit(K: NumberField, u: FieldElement, P: PrimeIdeal, data: _DyadicData) -> int:
    return data.unit_class[K.reduce_mod(u, P, data.level)]


def _dyadic_class(K: NumberField, x: FieldElement, P: PrimeIdeal, data: _DyadicData) -> int:
    v, u = _unit_part(x, P)
    return (v & 1) | (_dyadic_class_unit(K, u, P, data) << 1)


@lru_cache(maxsize=None)
def _dyadic_data(K: NumberField, P: PrimeIdeal) -> _DyadicData:
    level = 2 * P.e + 1
    table, basis = _unit_table(K, P, level)
    dim = 1 + len(basis)
    if dim != 2 + P.e * P.f:
        raise AssertionError(f"square class rank {dim} != {2 + P.e * P.f} at {P}")
    pre = _DyadicData(level, table, basis, dim, ())
    gens = [K.uniformizer(P)] + [K.element(list(r)) for r in basis]
    rows = []
    for a in gens:
        span = _norm_span(K, a, P, pre)
        row = 0
        for j, g in enumerate(gens):
            if not span.contains(_dyadic_class(K, g, P, pre)):
                row |= 1 << j
        rows.append(row)
    for i in range(dim):
        for j in range(dim):
            if ((rows[i] >> j) & 1) != ((rows[j] >> i) & 1):
                raise AssertionError(f"asymmetric Hilbert pairing at {P}")
    return _DyadicData(level, table, basis, dim, tuple(rows))


def _norm_span(K: NumberField, a: FieldElement, P: PrimeIdeal, data: _DyadicData) -> A.GF2Span:
    """Span of the classes of z^2 - a x^2; rank dim - 1 since a is not a square."""
    span = A.GF2Span()
    target = data.dim - 1
    bound = 1
    while span.rank < target:
        pool = [K.element(list(v)) for v in A.integer_vectors_by_height(K.degree, bound)]
        for z in pool:
            for x in pool:
                n = z * z - a * x * x
                if n.is_zero():
                    continue
                span.add(_dyadic_class(K, n, P, data))
                if span.rank == target:
                    return span
        bound += 1
        if bound > 12:
            raise RuntimeError(f"norm group search did not converge at {P}")
    return span


def _dyadic_symbol(a: FieldElement, b: FieldElement, P: PrimeIdeal) -> int:
    K = a.field
    data = _dyadic_data(K, P)
    ca = _dyadic_class(K, a, P, data)
    cb = _dyadic_class(K, b, P, data)
    acc = 0
    for i in range(data.dim):
        if (ca >> i) & 1:
            acc ^= data.pairing[i]
    return -1 if A.bits_dot(acc, cb) else 1


def square_class(x: FieldElement, P: PrimeIdeal) -> int:
    """Bit vector of x in K_P^*/K_P^*2 (bit 0 is the valuation parity)."""
    _nonzero(x)
    K = x.field
    if P.p == 2:
        return _dyadic_class(K, x, P, _dyadic_data(K, P))
    v, u = _unit_part(x, P)
    return (v & 1) | ((0 if K.residue_is_power(u, P, 2) else 1) << 1)


def square_class_rank(K: NumberField, P: PrimeIdeal) -> int:
    if P.p == 2:
        return _dyadic_data(K, P).dim
    return 2


# --------------------------------------------------------------------------
# public symbols
# --------------------------------------------------------------------------

def local_square(x: FieldElement, v: Place) -> bool:
    """Whether x is a square in the completion K_v."""
    _nonzero(x)
    K = x.field
    if isinstance(v, ComplexPlace):
        return True
    if isinstance(v, RealPlace):
        return K.real_sign(x, v.index) > 0
    P = v.prime
    if P.p == 2:
        return square_class(x, P) == 0
    val, u = _unit_part(x, P)
    return val % 2 == 0 and K.residue_is_power(u, P, 2)


def hilbert(a: FieldElement, b: FieldElement, v: Place) -> int:
    """The quadratic Hilbert symbol (a, b)_v in {+1, -1}."""
    _nonzero(a, b)
    if isinstance(v, ComplexPlace):
        return 1
    K = a.field
    if isinstance(v, RealPlace):
        return -1 if K.real_sign(a, v.index) < 0 and K.real_sign(b, v.index) < 0 else 1
    P = v.prime
    if P.p == 2:
        return _dyadic_symbol(a, b, P)
    return _odd_symbol(a, b, P)


def candidate_places(*elements: FieldElement) -> list[Place]:
    """Real places, every place over 2, and the finite support of the elements."""
    K = elements[0].field
    ps = {2}
    for x in elements:
        ps.update(K.support_primes(x))
    places: list[Place] = []
    for p in sorted(ps):
        places.extend(FinitePlace(P) for P in K.primes_above(p))
    places.extend(RealPlace(i) for i in range(K.real_place_count))
    return places


def symbol_table(a: FieldElement, b: FieldElement) -> list[tuple[Place, int]]:
    _nonzero(a, b)
    return [(v, hilbert(a, b, v)) for v in candidate_places(a, b)]


def delta(a: FieldElement, b: FieldElement) -> PlaceSet:
    """Places where the quaternion algebra (a, b) ramifies."""
    return [v for v, s in symbol_table(a, b) if s == -1]


def _odd_valuation_somewhere(a: FieldElement, b: FieldElement, P: PrimeIdeal) -> bool:
    K = a.field
    return K.valuation(a, P) % 2 == 1 or K.valuation(b, P) % 2 == 1


def delta_upper(a: FieldElement, b: FieldElement) -> PlaceSet:
    """Finite ramified places where a or b has odd valuation."""
    return [
        v for v in delta(a, b)
        if isinstance(v, FinitePlace) and _odd_valuation_somewhere(a, b, v.prime)
    ]


def omega(a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement) -> PlaceSet:
    second = set(delta_upper(c, d))
    return [v for v in delta_upper(a, b) if v in second]


def reciprocity_check(a: FieldElement, b: FieldElement) -> bool:
    prod = 1
    for _, s in symbol_table(a, b):
        prod *= s
    return prod == 1


def archimedean_box(x: FieldElement, sigma: RealPlace | int) -> bool:
    """-4 <= sigma(x) <= 4, decided exactly."""
    K = x.field
    idx = sigma.index if isinstance(sigma, RealPlace) else int(sigma)
    hi = x - 4
    lo = x + 4
    if hi.is_zero() or lo.is_zero():
        return True
    return K.real_sign(hi, idx) < 0 and K.real_sign(lo, idx) > 0


def sorted_places(places: Iterable[Place]) -> list[Place]:
    return sorted(set(places), key=place_sort_key)


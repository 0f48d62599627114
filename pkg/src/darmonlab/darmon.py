"""Darmon sets D_{K,S,n} and Darmon points on the projective line."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from . import _arith as A
from .localsymbols import omega
from .numberfield import FieldElement, FinitePlace, NumberField, PrimeIdeal

INFINITY = math.inf
Weight = Union[int, float]  # a positive integer or math.inf


def _check_weight(n: Weight) -> None:
    if n == INFINITY:
        return
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"weight must be a positive integer or infinity, got {n!r}")


def _primes(S: Iterable) -> frozenset[PrimeIdeal]:
    out = set()
    for v in S:
        if isinstance(v, FinitePlace):
            out.add(v.prime)
        elif isinstance(v, PrimeIdeal):
            out.add(v)
        else:
            raise ValueError("S may only contain finite places")
    return frozenset(out)


@dataclass(frozen=True)
class DarmonQuery:
    field: NumberField
    n: Weight
    r: FieldElement
    places: tuple = ()
    params: Optional[tuple[FieldElement, FieldElement, FieldElement, FieldElement]] = None

    def excluded_primes(self) -> frozenset[PrimeIdeal]:
        if self.params is not None:
            a, b, c, d = self.params
            for x in self.params:
                if x.is_zero():
                    raise ValueError("parameters must be nonzero")
            return _primes(omega(a, b, c, d))
        return _primes(self.places)


def _valuation_ok(v: int, n: Weight) -> bool:
    if v >= 0:
        return True
    return n != INFINITY and v % n == 0


def in_darmon(q: DarmonQuery) -> bool:
    """r = 0, or nu_P(r) is nonnegative or divisible by n at every P outside S."""
    _check_weight(q.n)
    if q.r.is_zero():
        return True
    S = q.excluded_primes()
    ideal = q.field.ideal_of(q.r)
    return all(_valuation_ok(v, q.n) for P, v in ideal.exponents.items() if P not in S)


def darmon_member(K: NumberField, r: FieldElement, n: Weight, places: Sequence = (), params=None) -> bool:
    return in_darmon(DarmonQuery(K, n, r, tuple(places), params))


# --------------------------------------------------------------------------
# points of P^1
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    x0: FieldElement
    x1: FieldElement

    def __post_init__(self):
        if self.x0.is_zero() and self.x1.is_zero():
            raise ValueError("(0 : 0) is not a point")

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return self.x0 * other.x1 == self.x1 * other.x0

    def __hash__(self):
        if self.x1.is_zero():
            return hash(("inf",))
        return hash(self.x0 / self.x1)

    def __repr__(self):
        return f"({self.x0} : {self.x1})"


def _val(x: FieldElement, P: PrimeIdeal) -> float:
    return INFINITY if x.is_zero() else x.field.valuation(x, P)


def _check_s_integral(pt: ProjectivePoint, S: frozenset) -> None:
    for x in (pt.x0, pt.x1):
        if x.is_zero():
            continue
        for P, v in x.field.ideal_of(x).exponents.items():
            if v < 0 and P not in S:
                raise ValueError("coordinates must be S-integral")


def intersection_multiplicity(pt: ProjectivePoint, P: PrimeIdeal, divisor: int = 1, S: Sequence = ()) -> Weight:
    """Exponent of P in (x_i)(x0, x1)^-1 for the divisor {x_i = 0}; infinity on it."""
    if divisor not in (0, 1):
        raise ValueError("divisor must be 0 or 1")
    S = _primes(S)
    if P in S:
        raise ValueError("P must lie outside S")
    _check_s_integral(pt, S)
    xi = pt.x1 if divisor == 1 else pt.x0
    if xi.is_zero():
        return INFINITY
    return int(_val(xi, P) - min(_val(pt.x0, P), _val(pt.x1, P)))


def _relevant_primes(pt: ProjectivePoint) -> set[PrimeIdeal]:
    out = set()
    for x in (pt.x0, pt.x1):
        if not x.is_zero():
            out.update(x.field.ideal_of(x).exponents)
    return out


def is_darmon_point(pt: ProjectivePoint, n0: Weight, n1: Weight, S: Sequence = ()) -> bool:
    """Multiplicities with {x0 = 0} (weight n0) and {x1 = 0} (weight n1) outside S.

    A multiplicity passes if it is infinite or divisible by the weight; an
    infinite weight only accepts multiplicity 0 (or an infinite one).
    """
    _check_weight(n0)
    _check_weight(n1)
    Sp = _primes(S)
    _check_s_integral(pt, Sp)
    for P in _relevant_primes(pt):
        if P in Sp:
            continue
        for divisor, n in ((0, n0), (1, n1)):
            m = intersection_multiplicity(pt, P, divisor, ())
            if m == INFINITY:
                continue
            if n == INFINITY:
                if m != 0:
                    return False
            elif m % n:
                return False
    return True


def rational_power_oracle(r, n: Weight) -> bool:
    """r = a / b^n in lowest terms, by gcd and integer roots only."""
    _check_weight(n)
    if isinstance(r, FieldElement):
        if r.field.degree != 1:
            raise ValueError("rational_power_oracle is defined over Q only")
        r = r.as_rational()
    r = Fraction(r)
    if r == 0:
        return True
    den = r.denominator
    if n == INFINITY:
        return den == 1
    return A.integer_nth_root(den, n)[1]

"""Membership oracles for the sets T, J, J4, J42, K^sf and friends.

The primary deciders read off valuation conditions at the ramified places of
the quaternion algebra (a, b).  Independent oracles based on the
local-global principle for quadratic forms are provided for cross-checking.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from sympy.solvers.diophantine.diophantine import sum_of_four_squares

from .localsymbols import (
    archimedean_box,
    candidate_places,
    delta,
    delta_upper,
    hilbert,
    local_square,
    omega,
)
from .numberfield import (
    FieldElement,
    FinitePlace,
    RealPlace,
    SearchExhausted,
)


def _check(*xs: FieldElement) -> None:
    for x in xs:
        if x.is_zero():
            raise ValueError("parameters must be nonzero")


# --------------------------------------------------------------------------
# valuation characterizations
# --------------------------------------------------------------------------

def in_T(a: FieldElement, b: FieldElement, r: FieldElement) -> bool:
    """r is integral at finite ramified places and in [-4, 4] at real ones."""
    _check(a, b)
    K = a.field
    for v in delta(a, b):
        if isinstance(v, FinitePlace):
            if not r.is_zero() and K.valuation(r, v.prime) < 0:
                return False
        elif isinstance(v, RealPlace):
            if not archimedean_box(r, v):
                return False
    return True


def _min_valuation(places, r: FieldElement, k: int) -> bool:
    if r.is_zero():
        return True
    K = r.field
    return all(K.valuation(r, v.prime) >= k for v in places)


def in_J(a: FieldElement, b: FieldElement, r: FieldElement) -> bool:
    _check(a, b)
    return _min_valuation(delta_upper(a, b), r, 1)


def in_J4(a, b, c, d, r: FieldElement) -> bool:
    _check(a, b, c, d)
    return _min_valuation(omega(a, b, c, d), r, 1)


def in_J42(a, b, c, d, r: FieldElement) -> bool:
    _check(a, b, c, d)
    return _min_valuation(omega(a, b, c, d), r, 2)


def in_Ksf(a: FieldElement, b: FieldElement, r: FieldElement) -> bool:
    _check(a, b)
    if r.is_zero():
        raise ValueError("valuation of 0 is undefined; 0 is not in K^sf")
    K = a.field
    return all(abs(K.valuation(r, v.prime)) <= 1 for v in delta_upper(a, b))


# --------------------------------------------------------------------------
# sums of four squares
# --------------------------------------------------------------------------

def is_sum_of_four_squares(lam: FieldElement) -> bool:
    return lam.field.is_totally_nonnegative(lam)


def _four_squares_int(n: int) -> tuple[int, int, int, int] | None:
    """x1 >= x2 >= x3 >= x4 >= 0 with n = x1^2 + x2^2 + x3^2 + x4^2."""
    if n < 0:
        return None
    return tuple(int(x) for x in sorted(sum_of_four_squares(n), reverse=True))


def four_square_witness(lam: FieldElement, height_bound: int = 50) -> Optional[tuple[FieldElement, ...]]:
    """Bounded search for lam = x1^2 + x2^2 + x3^2 + x4^2; None if not found."""
    K = lam.field
    if not is_sum_of_four_squares(lam):
        return None
    if K.degree == 1:
        r = lam.as_rational()
        n = r.numerator * r.denominator
        sol = _four_squares_int(n)
        if sol is None:
            return None
        return tuple(K.rational(Fraction(x, r.denominator)) for x in sol)
    cands = list(K.elements_by_height(height_bound))
    for x1 in cands:
        r1 = lam - x1 * x1
        for x2 in cands:
            r2 = r1 - x2 * x2
            for x3 in cands:
                r3 = r2 - x3 * x3
                if r3.is_zero():
                    return x1, x2, x3, K.zero
                if not K.is_totally_nonnegative(r3):
                    continue
                x4 = K.global_root(r3, 2)
                if x4 is not None:
                    return x1, x2, x3, x4
    return None


# --------------------------------------------------------------------------
# archimedean ramification
# --------------------------------------------------------------------------

def arcplaces_certificate(a: FieldElement, b: FieldElement, height_bound: int = 50) -> FieldElement:
    """Search c in T_{a,b} with c - 5 totally nonnegative."""
    K = a.field
    for n in range(5, 5 + height_bound):
        c = K.rational(n)
        if in_T(a, b, c):
            return c
    raise SearchExhausted("no certificate c found", bound=height_bound)


def arcplaces_condition(a: FieldElement, b: FieldElement, height_bound: int = 50) -> bool:
    """No real place ramifies; when real places exist, a certificate is also found."""
    _check(a, b)
    K = a.field
    if any(isinstance(v, RealPlace) for v in delta(a, b)):
        return False
    if K.real_place_count:
        c = arcplaces_certificate(a, b, height_bound)
        if not (K.is_totally_nonnegative(c - 5) and in_T(a, b, c)):
            raise AssertionError("arcplaces certificate failed verification")
    return True


# --------------------------------------------------------------------------
# local-global oracles
# --------------------------------------------------------------------------

def _quaternary_isotropic(coeffs: list[FieldElement], v) -> bool:
    """Isotropy of the diagonal form <c1, c2, c3, c4> over K_v."""
    K = coeffs[0].field
    if isinstance(v, RealPlace):
        signs = {K.real_sign(c, v.index) for c in coeffs}
        return len(signs) == 2
    if not isinstance(v, FinitePlace):
        return True
    disc = coeffs[0] * coeffs[1] * coeffs[2] * coeffs[3]
    if not local_square(disc, v):
        return True
    eps = 1
    for i in range(4):
        for j in range(i + 1, 4):
            eps *= hilbert(coeffs[i], coeffs[j], v)
    minus_one = -K.one
    return eps == hilbert(minus_one, minus_one, v)


def in_S_oracle(a: FieldElement, b: FieldElement, c: FieldElement) -> bool:
    """Is c the reduced trace of a norm-one element of the quaternion algebra (a, b)?"""
    _check(a, b)
    m = 1 - c * c / 4
    if m.is_zero():
        return True
    coeffs = [-a, -b, a * b, -m]
    return all(_quaternary_isotropic(coeffs, v) for v in candidate_places(*coeffs))


def in_T_oracle(a: FieldElement, b: FieldElement, t: FieldElement, height_bound: int = 20) -> dict:
    """Three-valued search for t = s + (t - s) with both summands in S."""
    _check(a, b)
    if not in_T(a, b, t):
        return {"status": "false", "witness": None}
    K = a.field
    for s in K.elements_by_height(height_bound):
        if in_S_oracle(a, b, s) and in_S_oracle(a, b, t - s):
            return {"status": "true", "witness": [s, t - s]}
    return {"status": "unknown", "witness": None}


def disjoint_via_unit(a, b, c, d, a2, b2, c2, d2) -> bool:
    """Omega and Omega' are disjoint iff 1 = x + (1 - x) with x in J4, 1 - x in J4'."""
    _check(a, b, c, d, a2, b2, c2, d2)
    K = a.field
    first = omega(a, b, c, d)
    second = omega(a2, b2, c2, d2)
    direct = not (set(first) & set(second))
    witness = None
    if direct:
        congr = [(v.prime, K.zero, 1) for v in first] + [(v.prime, K.one, 1) for v in second]
        x = K.weak_approximate(congr)
        if in_J4(a, b, c, d, x) and in_J4(a2, b2, c2, d2, 1 - x):
            witness = x
    if direct != (witness is not None):
        raise AssertionError("disjointness and unit decomposition disagree")
    return direct

"""Exact arithmetic in monogenic number fields K = Q(theta).

Elements are stored as an integer numerator vector over the power basis
1, theta, ..., theta^(d-1) together with a positive common denominator.
Only fields whose ring of integers equals Z[theta] are accepted; this is
certified with the Dedekind criterion when the field is built.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from math import gcd, lcm
from typing import Iterable, Iterator, Sequence, Union

import mpmath
import sympy

from . import _arith as A


class UnsupportedField(ValueError):
    """The requested field is outside the supported (monogenic) class."""


class SearchExhausted(RuntimeError):
    """A bounded search ran out of budget; ``bound`` records what was tried."""

    def __init__(self, message: str, bound=None, state=None):
        super().__init__(message)
        self.bound = bound
        self.state = state


Rational = Union[int, Fraction]


# --------------------------------------------------------------------------
# places and primes
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimeIdeal:
    """P = (p, g(theta)) for a monic irreducible factor g of f mod p."""

    field: "NumberField" = dc_field(repr=False, compare=False, hash=False)
    p: int
    generator: tuple[int, ...]  # monic, coefficients in [0, p), low degree first
    e: int
    f: int
    _key: tuple = dc_field(default=(), repr=False)

    @property
    def residue_characteristic(self) -> int:
        return self.p

    @property
    def ramification_index(self) -> int:
        return self.e

    @property
    def residue_degree(self) -> int:
        return self.f

    @property
    def norm(self) -> int:
        return self.p ** self.f

    @property
    def two_generators(self) -> tuple[int, "FieldElement"]:
        return self.p, self.field.poly_element(self.generator)

    def label(self) -> str:
        K = self.field
        if len(K.primes_above(self.p)) == 1 and self.e == 1:
            return str(self.p)
        return f"({self.p}, {_poly_str(self.generator, 't')})"

    def __str__(self) -> str:
        return self.label()


@dataclass(frozen=True)
class FinitePlace:
    prime: PrimeIdeal

    def label(self) -> str:
        return self.prime.label()


@dataclass(frozen=True)
class RealPlace:
    index: int

    def label(self) -> str:
        return f"real[{self.index}]"


@dataclass(frozen=True)
class ComplexPlace:
    index: int

    def label(self) -> str:
        return f"complex[{self.index}]"


Place = Union[FinitePlace, RealPlace, ComplexPlace]


def place_sort_key(v: Place) -> tuple:
    if isinstance(v, FinitePlace):
        P = v.prime
        return (0, P.p, P.f, P.generator)
    if isinstance(v, RealPlace):
        return (1, v.index)
    return (2, v.index)


def _poly_str(coeffs: Sequence, var: str) -> str:
    terms = []
    for i in reversed(range(len(coeffs))):
        c = coeffs[i]
        if c == 0:
            continue
        mon = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mon and c == 1:
            s = mon
        elif mon and c == -1:
            s = "-" + mon
        else:
            s = f"{c}*{mon}" if mon else str(c)
        terms.append(s)
    if not terms:
        return "0"
    return " + ".join(terms).replace("+ -", "- ")


# --------------------------------------------------------------------------
# elements
# --------------------------------------------------------------------------

class FieldElement:
    """Immutable element num/den of K, num an integer coordinate vector."""

    __slots__ = ("field", "num", "den", "_hash")

    def __init__(self, K: "NumberField", num: Sequence[int], den: int = 1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = [-c for c in num], -den
        g = reduce(gcd, num, den)
        if g > 1:
            num = [c // g for c in num]
            den //= g
        object.__setattr__(self, "field", K)
        object.__setattr__(self, "num", tuple(num))
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, key, value):
        raise AttributeError("FieldElement is immutable")

    @property
    def coordinates(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.num[0], self.den)

    def is_integral(self) -> bool:
        return self.den == 1

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.rational(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        den = lcm(self.den, o.den)
        a, b = den // self.den, den // o.den
        return FieldElement(self.field, [a * x + b * y for x, y in zip(self.num, o.num)], den)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, [-c for c in self.num], self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field._mul_vec(self.num, o.num), self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        K = self.field
        if self.is_rational():
            return FieldElement(K, [self.den] + [0] * (K.degree - 1), self.num[0])
        sol = _solve_fraction(K._mult_matrix(self.num), [1] + [0] * (K.degree - 1))
        den = reduce(lcm, (c.denominator for c in sol), 1)
        vec = [int(c * den) * self.den for c in sol]
        return FieldElement(K, vec, den)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.rational(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field == other.field and self.num == other.num and self.den == other.den

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.field.poly, self.num, self.den))
            object.__setattr__(self, "_hash", h)
        return h

    # invariants -----------------------------------------------------------
    def norm(self) -> Fraction:
        d = self.field.degree
        return Fraction(_det_int(self.field._mult_matrix(self.num)), self.den ** d)

    def __repr__(self) -> str:
        body = _poly_str(self.num, "t")
        if self.den != 1:
            return f"({body})/{self.den}"
        return body

    __str__ = __repr__


def _det_int(m: list[list[int]]) -> int:
    """Bareiss fraction-free determinant."""
    n = len(m)
    a = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _solve_fraction(m: list[list[int]], rhs: list) -> list[Fraction]:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(m)]
    for col in range(n):
        piv = next(i for i in range(col, n) if a[i][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                fct = a[i][col]
                a[i] = [x - fct * y for x, y in zip(a[i], a[col])]
    return [a[i][n] for i in range(n)]


# --------------------------------------------------------------------------
# the field
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _PrimeData:
    """Auxiliary elements attached to a prime P above p."""

    beta: tuple[int, ...]      # nu_P = e-1, nu_Q >= e_Q at the other Q | p
    h: tuple[int, ...]         # unit at P, in every other Q | p
    uniformizer: tuple[int, ...]
    alone: bool                # P is the only prime above p


class NumberField:
    """A monogenic number field given by a monic irreducible integer polynomial."""

    def __init__(self, poly: Sequence[int], spec: str | None = None):
        poly = [int(c) for c in poly]
        A.trim(poly)
        if len(poly) < 2 or poly[-1] != 1:
            raise ValueError("minimal polynomial must be monic of degree >= 1")
        if len(poly) > 2 and not A.is_irreducible_over_q(poly):
            raise UnsupportedField(f"polynomial {poly} is reducible over Q")
        self.poly = tuple(poly)
        self.degree = len(poly) - 1
        self.spec = spec or "poly:[" + ",".join(str(c) for c in poly) + "]"
        self.discriminant = 1 if self.degree == 1 else A.discriminant(poly)
        self.monogenic_certificate = self._dedekind_certificate()
        self.real_places = A.isolate_real_roots(poly)
        self.complex_place_count = (self.degree - len(self.real_places)) // 2
        self._prime_cache: dict[int, list[PrimeIdeal]] = {}
        self._prime_data: dict[PrimeIdeal, _PrimeData] = {}

    # identity -------------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, NumberField) and self.poly == other.poly

    def __hash__(self):
        return hash(("NumberField", self.poly))

    def __repr__(self):
        return f"NumberField({self.spec!r})"

    # Dedekind criterion ----------------------------------------------------
    def _dedekind_certificate(self) -> dict[int, bool]:
        cert: dict[int, bool] = {}
        if self.degree == 1:
            return cert
        for p, k in sympy.factorint(abs(self.discriminant)).items():
            if k < 2:
                continue
            ok = _dedekind_p_maximal(self.poly, p)
            cert[int(p)] = ok
            if not ok:
                raise UnsupportedField(
                    f"unsupported field: Z[theta] is not maximal at p={p} for {self.spec}"
                )
        return cert

    # constructors -----------------------------------------------------------
    def element(self, coords: Sequence[Rational]) -> FieldElement:
        coords = [Fraction(c) for c in coords]
        if len(coords) > self.degree:
            raise ValueError("too many coordinates")
        coords += [Fraction(0)] * (self.degree - len(coords))
        den = reduce(lcm, (c.denominator for c in coords), 1)
        return FieldElement(self, [int(c * den) for c in coords], den)

    __call__ = element

    def rational(self, r: Rational) -> FieldElement:
        r = Fraction(r)
        return FieldElement(self, [r.numerator] + [0] * (self.degree - 1), r.denominator)

    @cached_property
    def zero(self) -> FieldElement:
        return self.rational(0)

    @cached_property
    def one(self) -> FieldElement:
        return self.rational(1)

    @cached_property
    def theta(self) -> FieldElement:
        if self.degree == 1:
            return self.rational(-self.poly[0])
        return self.element([0, 1])

    def poly_element(self, coeffs: Sequence[int]) -> FieldElement:
        """g(theta) for an integer polynomial g."""
        return FieldElement(self, self._reduce_poly(list(coeffs)), 1)

    # internal vector arithmetic ------------------------------------------
    def _reduce_poly(self, c: list) -> list:
        d = self.degree
        f = self.poly
        c = list(c)
        for i in range(len(c) - 1, d - 1, -1):
            t = c[i]
            if t:
                for j in range(d):
                    c[i - d + j] -= t * f[j]
            c[i] = 0
        c = c[:d]
        return c + [0] * (d - len(c))

    def _mul_vec(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        d = self.degree
        if d == 1:
            return [a[0] * b[0]]
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return self._reduce_poly(prod)

    def _mulmod(self, a: Sequence[int], b: Sequence[int], m: int) -> list[int]:
        return [c % m for c in self._mul_vec(a, b)]

    def _powmod(self, a: Sequence[int], k: int, m: int) -> list[int]:
        result = [1 % m] + [0] * (self.degree - 1)
        base = [c % m for c in a]
        while k:
            if k & 1:
                result = self._mulmod(result, base, m)
            base = self._mulmod(base, base, m)
            k >>= 1
        return result

    def _mult_matrix(self, a: Sequence[int]) -> list[list[int]]:
        """Matrix of multiplication by a (columns are a*theta^j)."""
        d = self.degree
        cols = []
        for j in range(d):
            e = [0] * d
            e[j] = 1
            cols.append(self._mul_vec(a, e))
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    # primes ----------------------------------------------------------------
    def primes_above(self, p: int) -> list[PrimeIdeal]:
        p = int(p)
        cached = self._prime_cache.get(p)
        if cached is not None:
            return cached
        if not sympy.isprime(p):
            raise ValueError(f"{p} is not prime")
        facs = A.factor_mod_p(self.poly, p)
        primes = []
        datas = []
        for i, (g, e) in enumerate(facs):
            P = PrimeIdeal(self, p, tuple(g), e, len(g) - 1, _key=(self.poly, p, tuple(g)))
            h = [1]
            for j, (g2, e2) in enumerate(facs):
                if j != i:
                    for _ in range(e2):
                        h = A.fp_mul(h, g2, p)
            hvec = tuple(self._reduce_poly(h))
            gvec = self._reduce_poly(list(g))
            beta = list(hvec)
            for _ in range(e - 1):
                beta = self._mul_vec(beta, gvec)
            primes.append(P)
            datas.append((P, hvec, tuple(beta), tuple(gvec), len(facs) == 1))
        # publish primes before computing uniformizers (valuation needs beta)
        for P, hvec, beta, gvec, alone in datas:
            self._prime_data[P] = _PrimeData(beta, hvec, (), alone)
        self._prime_cache[p] = primes
        for P, hvec, beta, gvec, alone in datas:
            if P.e >= 2:
                unif = gvec
            else:
                gel = FieldElement(self, gvec, 1)
                if not gel.is_zero() and self.valuation(gel, P) == 1:
                    unif = gvec
                else:
                    unif = tuple(c + (p if i == 0 else 0) for i, c in enumerate(gvec))
            self._prime_data[P] = _PrimeData(beta, hvec, tuple(unif), alone)
        return primes

    def factor_rational_prime(self, p: int) -> list[tuple[PrimeIdeal, int]]:
        return [(P, P.e) for P in self.primes_above(p)]

    def prime(self, p: int, index: int = 0) -> PrimeIdeal:
        return self.primes_above(p)[index]

    def prime_by_generator(self, p: int, generator: Sequence[int]) -> PrimeIdeal:
        g = tuple(int(c) % p for c in generator)
        for P in self.primes_above(p):
            if P.generator == g:
                return P
        raise ValueError(f"no prime above {p} with generator {list(generator)}")

    def uniformizer(self, P: PrimeIdeal) -> FieldElement:
        return FieldElement(self, self._data(P).uniformizer, 1)

    def _data(self, P: PrimeIdeal) -> _PrimeData:
        if P not in self._prime_data:
            self.primes_above(P.p)
        return self._prime_data[P]

    def primes_up_to(self, bound: int) -> Iterator[PrimeIdeal]:
        for p in sympy.primerange(2, bound + 1):
            yield from self.primes_above(int(p))

    # valuations -------------------------------------------------------------
    def _valuation_integral(self, a: Sequence[int], P: PrimeIdeal) -> int:
        p = P.p
        content = reduce(gcd, a, 0)
        v = 0
        while content % p == 0:
            content //= p
            v += 1
        k = v * P.e
        a = [c // (p ** v) for c in a]
        data = self._data(P)
        if data.alone and P.e == 1:
            return k
        while True:
            b = self._mul_vec(a, data.beta)
            if any(c % p for c in b):
                return k
            a = [c // p for c in b]
            k += 1

    def valuation(self, x: FieldElement, P: PrimeIdeal) -> int:
        if x.is_zero():
            raise ValueError("valuation of zero is undefined")
        vden = 0
        den = x.den
        while den % P.p == 0:
            den //= P.p
            vden += 1
        return self._valuation_integral(x.num, P) - P.e * vden

    def support_primes(self, x: FieldElement) -> list[int]:
        """Rational primes below every P with nu_P(x) != 0."""
        if x.is_zero():
            raise ValueError("support of zero is undefined")
        n = abs(_det_int(self._mult_matrix(x.num)))
        ps = set(sympy.factorint(n)) | set(sympy.factorint(x.den))
        return sorted(int(p) for p in ps if p > 1)

    def ideal_of(self, x: FieldElement) -> "FractionalIdeal":
        if x.is_zero():
            raise ValueError("the zero ideal is not a fractional ideal")
        exps = {}
        for p in self.support_primes(x):
            for P in self.primes_above(p):
                v = self.valuation(x, P)
                if v:
                    exps[P] = v
        return FractionalIdeal(self, exps)

    # reductions modulo prime powers --------------------------------------
    def _power_modulus(self, P: PrimeIdeal, k: int) -> int:
        return P.p ** (-(-k // P.e))

    @lru_cache(maxsize=None)
    def _power_lattice(self, P: PrimeIdeal, k: int) -> list[list[int]]:
        d = self.degree
        m = self._power_modulus(P, k)
        g = self._reduce_poly(list(P.generator))
        gens = []
        gpow = [1] + [0] * (d - 1)
        for i in range(k + 1):
            scale = P.p ** (k - i)
            for j in range(d):
                e = [0] * d
                e[j] = 1
                gens.append([scale * c for c in self._mul_vec(gpow, e)])
            gpow = self._mul_vec(gpow, g)
        return A.hnf_modular(gens, d, m)

    def _idempotent(self, P: PrimeIdeal, k: int, m: int) -> list[int]:
        """epsilon = 1 mod P^k and 0 mod every other Q | p, coordinates mod m."""
        data = self._data(P)
        if data.alone:
            return [1 % m] + [0] * (self.degree - 1)
        q = P.p ** P.f
        exp = q ** (k - 1) * (q - 1)
        return self._powmod(data.h, exp, m)

    def reduce_mod(self, x: FieldElement, P: PrimeIdeal, k: int) -> tuple[int, ...]:
        """Canonical representative of x in O/P^k; x must be P-integral."""
        p = P.p
        if x.is_zero():
            return (0,) * self.degree
        m = self._power_modulus(P, k)
        den = x.den
        j = 0
        while den % p == 0:
            den //= p
            j += 1
        if j == 0:
            inv = pow(den, -1, m)
            vec = [c * inv % m for c in x.num]
            return A.hnf_reduce(vec, self._power_lattice(P, k))
        if self.valuation(x, P) < 0:
            raise ValueError("element is not P-integral")
        data = self._data(P)
        gamma = FieldElement(self, data.beta, p)
        shift = gamma ** (P.e * j)
        numer = FieldElement(self, x.num, 1) * shift
        denom = self.rational(den * p ** j) * shift
        assert numer.den == 1 and denom.den == 1
        eps = FieldElement(self, self._idempotent(P, k, m), 1)
        dprime = denom * eps + (self.one - eps)
        dinv = dprime.inverse()
        inv = pow(dinv.den, -1, m)
        dvec = [c * inv % m for c in dinv.num]
        vec = self._mulmod(numer.num, dvec, m)
        return A.hnf_reduce(vec, self._power_lattice(P, k))

    def residue_mul(self, a: Sequence[int], b: Sequence[int], P: PrimeIdeal, k: int) -> tuple[int, ...]:
        m = self._power_modulus(P, k)
        return A.hnf_reduce(self._mulmod(a, b, m), self._power_lattice(P, k))

    def residue_pow(self, a: Sequence[int], n: int, P: PrimeIdeal, k: int) -> tuple[int, ...]:
        result = self.reduce_mod(self.one, P, k)
        base = tuple(a)
        while n:
            if n & 1:
                result = self.residue_mul(result, base, P, k)
            base = self.residue_mul(base, base, P, k)
            n >>= 1
        return result

    def residue_representatives(self, P: PrimeIdeal, k: int) -> Iterator[tuple[int, ...]]:
        return A.hnf_representatives(self._power_lattice(P, k))

    def residue_is_power(self, u: FieldElement, P: PrimeIdeal, n: int) -> bool:
        """Whether the residue of the P-unit u is an n-th power in O/P."""
        q = P.norm
        g = gcd(n, q - 1)
        r = self.reduce_mod(u, P, 1)
        return self.residue_pow(r, (q - 1) // g, P, 1) == self.reduce_mod(self.one, P, 1)

    # real embeddings ----------------------------------------------------------
    @property
    def real_place_count(self) -> int:
        return len(self.real_places)

    def real_signs(self, x: FieldElement) -> tuple[int, ...]:
        if x.is_zero():
            raise ValueError("sign of zero is undefined")
        out = []
        for lo, hi in self.real_places:
            s, _, _ = A.sign_at_root(list(x.num), self.poly, lo, hi)
            out.append(s)
        return tuple(out)

    def real_sign(self, x: FieldElement, index: int) -> int:
        if x.is_zero():
            return 0
        lo, hi = self.real_places[index]
        return A.sign_at_root(list(x.num), self.poly, lo, hi)[0]

    def is_totally_nonnegative(self, x: FieldElement) -> bool:
        if x.is_zero():
            return True
        return all(s > 0 for s in self.real_signs(x))

    def real_embedding_interval(self, x: FieldElement, index: int, width: Fraction = Fraction(1, 10**6)):
        """Rational enclosure of sigma_index(x); diagnostics only."""
        lo, hi = self.real_places[index]
        while hi - lo > width:
            lo, hi = A.refine(self.poly, lo, hi)
        vals = [A.peval([Fraction(c, x.den) for c in x.num], t) for t in (lo, hi)]
        return min(vals), max(vals)

    def places(self) -> list[Place]:
        return [RealPlace(i) for i in range(self.real_place_count)] + [
            ComplexPlace(i) for i in range(self.complex_place_count)
        ]

    # global powers -----------------------------------------------------------
    def is_global_power(self, x: FieldElement, k: int) -> bool:
        """Exact test whether x is a k-th power in K."""
        if x.is_zero():
            return True
        if k == 1:
            return True
        if self.degree == 1:
            r = x.as_rational()
            if r < 0 and k % 2 == 0:
                return False
            n_ok = A.integer_nth_root(abs(r.numerator), k)[1]
            d_ok = A.integer_nth_root(r.denominator, k)[1]
            return n_ok and d_ok
        if self._power_root_candidate(x, k) is not None:
            return True
        if self._power_obstruction(x, k) is not None:
            return False
        raise RuntimeError(f"could not decide whether {x} is a {k}-th power")

    def global_root(self, x: FieldElement, k: int) -> FieldElement | None:
        if x.is_zero():
            return self.zero
        if self.degree == 1:
            if not self.is_global_power(x, k):
                return None
            r = x.as_rational()
            num = A.integer_nth_root(abs(r.numerator), k)[0] * (-1 if r < 0 else 1)
            return self.rational(Fraction(num, A.integer_nth_root(r.denominator, k)[0]))
        return self._power_root_candidate(x, k)

    def is_global_square(self, x: FieldElement) -> bool:
        return self.is_global_power(x, 2)

    def _power_root_candidate(self, x: FieldElement, k: int) -> FieldElement | None:
        d = self.degree
        den = x.den
        target = FieldElement(self, [c * den ** (k - 1) for c in x.num], 1)  # (den*y)^k
        size = max(abs(c) for c in target.num) + 2
        mpmath.mp.dps = 40 + len(str(size))
        roots = mpmath.polyroots(list(reversed(self.poly)), maxsteps=200, extraprec=200)
        vals = [sum(mpmath.mpf(c) * r ** i for i, c in enumerate(target.num)) for r in roots]
        zeta = [mpmath.exp(2j * mpmath.pi * t / k) for t in range(k)]
        base = [mpmath.root(v, k) for v in vals]
        vander = mpmath.matrix([[r ** j for j in range(d)] for r in roots])
        vinv = mpmath.inverse(vander)
        import itertools

        for choice in itertools.product(range(k), repeat=d):
            rhs = mpmath.matrix([base[i] * zeta[choice[i]] for i in range(d)])
            sol = vinv * rhs
            coords = []
            ok = True
            for i in range(d):
                c = sol[i]
                if abs(mpmath.im(c)) > 0.25:
                    ok = False
                    break
                coords.append(int(mpmath.nint(mpmath.re(c))))
            if not ok:
                continue
            Y = FieldElement(self, coords, 1)
            if Y ** k == target:
                return Y / den
        return None

    def _power_obstruction(self, x: FieldElement, k: int, bound: int = 3000):
        """A place where x is not a local k-th power, or None."""
        if k % 2 == 0:
            for i, s in enumerate(self.real_signs(x)):
                if s < 0:
                    return RealPlace(i)
        for p in sympy.primerange(2, bound):
            p = int(p)
            for P in self.primes_above(p):
                v = self.valuation(x, P)
                if v % k:
                    return FinitePlace(P)
                if k % p == 0:
                    continue
                u = x * self.uniformizer(P) ** (-v) if v else x
                if not self.residue_is_power(u, P, k):
                    return FinitePlace(P)
        return None

    def find_nonsquare_integer(self) -> int:
        n = 2
        while self.is_global_square(self.rational(n)):
            n += 1
        return n

    # enumeration -------------------------------------------------------------
    def elements_by_height(self, bound: int) -> Iterator[FieldElement]:
        """Elements whose coordinates have height <= bound, by increasing height.

        The height of p/q is max(|p|, q); the height of an element is the
        largest coordinate height.  Order within a height is deterministic.
        """
        if self.degree == 1:
            for r in A.rationals_by_height(bound):
                yield self.rational(r)
            return
        levels: list[list[Fraction]] = []
        for r in A.rationals_by_height(bound):
            h = max(abs(r.numerator), r.denominator) if r else 0
            while len(levels) <= h:
                levels.append([])
            levels[h].append(r)
        upto: list[Fraction] = []
        for h, exact in enumerate(levels):
            upto.extend(exact)
            yield from self._vectors_with_level(exact, upto)

    def _vectors_with_level(self, exact, upto) -> Iterator[FieldElement]:
        d = self.degree

        def rec(i: int, prefix: list, hit: bool):
            if i == d:
                if hit:
                    yield self.element(prefix)
                return
            for c in upto:
                yield from rec(i + 1, prefix + [c], hit or c in exact_set)

        exact_set = set(exact)
        yield from rec(0, [], False)

    # weak approximation ------------------------------------------------------
    def weak_approximate(
        self,
        congruences: Iterable[tuple[PrimeIdeal, FieldElement, int]] = (),
        sign_constraints: Iterable[tuple[int, int]] = (),
        rounds: int = 8,
    ) -> FieldElement:
        """y with nu_P(y - t) >= k for each (P, t, k) and sign(sigma_i(y)) = s.

        Targets must be P-integral.  Real places are given by index.
        """
        congruences = [(P, self._as_element(t), int(k)) for P, t, k in congruences]
        signs = [(int(i), 1 if s > 0 else -1) for i, s in sign_constraints]
        primes = [P for P, _, _ in congruences]
        if len(set(primes)) != len(primes):
            raise ValueError("congruence primes must be pairwise distinct")
        if len({i for i, _ in signs}) != len(signs):
            raise ValueError("duplicate real place in sign constraints")
        for i, _ in signs:
            if not 0 <= i < self.real_place_count:
                raise ValueError(f"no real place with index {i}")
        if not congruences and not signs:
            return self.one
        d = self.degree
        by_p: dict[int, list] = {}
        for P, t, k in congruences:
            if k <= 0:
                continue
            by_p.setdefault(P.p, []).append((P, t, k))
        residues = []
        for p, items in sorted(by_p.items()):
            kmax = max(k for _, _, k in items)
            emin = min(P.e for P, _, _ in items)
            m = p ** (-(-kmax // emin))
            acc = [0] * d
            for P, t, k in items:
                if not t.is_zero() and self.valuation(t, P) < 0:
                    raise ValueError("weak approximation targets must be P-integral")
                r = self.reduce_mod(t, P, k)
                if len(items) == 1 and len(self.primes_above(p)) == 1:
                    eps = [1] + [0] * (d - 1)
                else:
                    eps = self._separating_idempotent(P, kmax, m)
                acc = [(a + b) % m for a, b in zip(acc, self._mulmod(r, eps, m))]
            residues.append((acc, m))
        modulus = 1
        coords = [0] * d
        for acc, m in residues:
            for i in range(d):
                coords[i] = _crt_pair(coords[i], modulus, acc[i], m)
            modulus *= m
        y0 = FieldElement(self, coords, 1)
        y = y0
        if signs and not self._signs_ok(y, signs):
            L = self._sign_pattern_element(signs)
            t = 1
            for _ in range(rounds):
                y = y0 + L * (modulus * t)
                if self._signs_ok(y, signs):
                    break
                t *= 16
            else:
                raise SearchExhausted(
                    "weak approximation could not fix real signs", bound=modulus * t
                )
        # mandatory verification pass
        for P, t, k in congruences:
            diff = y - t
            if not diff.is_zero() and self.valuation(diff, P) < k:
                raise RuntimeError("weak approximation verification failed (congruence)")
        if not self._signs_ok(y, signs):
            raise RuntimeError("weak approximation verification failed (sign)")
        return y

    def _separating_idempotent(self, P: PrimeIdeal, k: int, m: int) -> list[int]:
        data = self._data(P)
        if data.alone:
            return [1 % m] + [0] * (self.degree - 1)
        q = P.p ** P.f
        exp = q ** (k - 1) * (q - 1)
        while exp < k:
            exp *= 2
        return self._powmod(data.h, exp, m)

    def _signs_ok(self, y: FieldElement, signs) -> bool:
        if not signs:
            return True
        if y.is_zero():
            return False
        return all(self.real_sign(y, i) == s for i, s in signs)

    def _sign_pattern_element(self, signs) -> FieldElement:
        signs = sorted(signs)
        poly = [Fraction(1)]
        for (i, s), (j, s2) in zip(signs, signs[1:]):
            if s != s2:
                hi_i = self.real_places[i][1]
                lo_next = self.real_places[i + 1][0]
                cut = hi_i if hi_i == lo_next else (hi_i + lo_next) / 2
                poly = A.pmul(poly, [-cut, Fraction(1)])
        L = self.element(poly + [0] * (self.degree - len(poly)))
        i0, s0 = signs[0]
        if self.real_sign(L, i0) != s0:
            L = -L
        return L

    # helpers -------------------------------------------------------------------
    def _as_element(self, t) -> FieldElement:
        if isinstance(t, FieldElement):
            return t
        return self.rational(t)


def _crt_pair(a: int, m: int, b: int, n: int) -> int:
    g, s, _ = A._xgcd(m, n)
    assert g == 1
    x = a + (b - a) * s % n * m
    return x % (m * n)


def _dedekind_p_maximal(f: Sequence[int], p: int) -> bool:
    facs = A.factor_mod_p(f, p)
    g = [1]
    h = [1]
    for gi, e in facs:
        g = A.pmul(g, gi)
        for _ in range(e - 1):
            h = A.pmul(h, gi)
    gh = A.pmul(g, h)
    diff = A.psub(list(f), gh)
    if any(c % p for c in diff):
        raise AssertionError("lifted factorization mismatch")
    F = [c // p for c in diff]
    if not A.fp_trim(F, p):
        return False
    common = A.fp_gcd(A.fp_gcd(F, g, p), h, p)
    return len(common) == 1


# --------------------------------------------------------------------------
# fractional ideals
# --------------------------------------------------------------------------

class FractionalIdeal:
    """Factored fractional ideal: prime -> nonzero exponent."""

    def __init__(self, K: NumberField, exponents: dict[PrimeIdeal, int]):
        self.field = K
        self.exponents = {P: e for P, e in exponents.items() if e}

    def exponent(self, P: PrimeIdeal) -> int:
        return self.exponents.get(P, 0)

    def __mul__(self, other: "FractionalIdeal") -> "FractionalIdeal":
        exps = dict(self.exponents)
        for P, e in other.exponents.items():
            exps[P] = exps.get(P, 0) + e
        return FractionalIdeal(self.field, exps)

    def inverse(self) -> "FractionalIdeal":
        return FractionalIdeal(self.field, {P: -e for P, e in self.exponents.items()})

    def __truediv__(self, other: "FractionalIdeal") -> "FractionalIdeal":
        return self * other.inverse()

    def gcd(self, other: "FractionalIdeal") -> "FractionalIdeal":
        keys = set(self.exponents) | set(other.exponents)
        return FractionalIdeal(self.field, {P: min(self.exponent(P), other.exponent(P)) for P in keys})

    def __eq__(self, other):
        return isinstance(other, FractionalIdeal) and self.exponents == other.exponents

    def __hash__(self):
        return hash(frozenset(self.exponents.items()))

    def is_integral(self) -> bool:
        return all(e > 0 for e in self.exponents.values())

    def __repr__(self):
        if not self.exponents:
            return "(1)"
        parts = sorted(self.exponents.items(), key=lambda t: (t[0].p, t[0].generator))
        return "*".join(f"{P.label()}^{e}" for P, e in parts)


def ideal_of(x: FieldElement) -> FractionalIdeal:
    return x.field.ideal_of(x)


def ideal_gcd(I: FractionalIdeal, J: FractionalIdeal) -> FractionalIdeal:
    return I.gcd(J)


def ideal_exponent(I: FractionalIdeal, P: PrimeIdeal) -> int:
    return I.exponent(P)


def valuation(x: FieldElement, P: PrimeIdeal) -> int:
    return x.field.valuation(x, P)


# --------------------------------------------------------------------------
# field specs
# --------------------------------------------------------------------------

_SQRT = re.compile(r"^Q\(sqrt,\s*(-?\d+)\)$")
_POLY = re.compile(r"^poly:\[([-\d,\s]+)\]$")


@lru_cache(maxsize=64)
def parse_field(spec: str) -> NumberField:
    """Build a NumberField from "Q", "Q(sqrt,d)" or "poly:[c0,...,1]"."""
    s = spec.strip()
    if s == "Q":
        return NumberField([0, 1], spec="Q")
    m = _SQRT.match(s)
    if m:
        d = int(m.group(1))
        if d in (0, 1):
            raise ValueError("d must be a squarefree integer different from 0 and 1")
        if any(k > 1 for k in sympy.factorint(abs(d)).values()):
            raise ValueError(f"{d} is not squarefree")
        if d % 4 == 1:
            poly = [(1 - d) // 4, -1, 1]
        else:
            poly = [-d, 0, 1]
        return NumberField(poly, spec=f"Q(sqrt,{d})")
    m = _POLY.match(s)
    if m:
        coeffs = [int(c) for c in m.group(1).split(",") if c.strip()]
        return NumberField(coeffs, spec="poly:[" + ",".join(str(c) for c in coeffs) + "]")
    raise ValueError(f"unrecognised field spec {spec!r}")


def parse_element(K: NumberField, text: str) -> FieldElement:
    """Parse "p/q", an integer, or "[c0,c1,...]" with rational coordinates."""
    s = text.strip()
    if s.startswith("[") and s.endswith("]"):
        parts = [c for c in s[1:-1].split(",") if c.strip()]
        return K.element([Fraction(c.strip()) for c in parts])
    return K.rational(Fraction(s))

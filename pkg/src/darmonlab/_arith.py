"""Small exact-arithmetic helpers shared by the number-field code.

Univariate polynomials are plain lists of coefficients, lowest degree first.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Sequence

import sympy
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_gcd, gf_mul, gf_strip

_X = sympy.Symbol("x")


# --------------------------------------------------------------------------
# univariate polynomials over Z / Q
# --------------------------------------------------------------------------

def trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def pdeg(p: Sequence) -> int:
    return len(p) - 1


def padd(p: Sequence, q: Sequence) -> list:
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def psub(p: Sequence, q: Sequence) -> list:
    return padd(p, [-c for c in q])


def pmul(p: Sequence, q: Sequence) -> list:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def pdivmod(p: Sequence, q: Sequence) -> tuple[list, list]:
    """Division with remainder over Q (Fractions)."""
    r = [Fraction(c) for c in p]
    trim(r)
    lq = Fraction(q[-1])
    out = [Fraction(0)] * max(len(r) - len(q) + 1, 0)
    while len(r) >= len(q) and r:
        c = r[-1] / lq
        k = len(r) - len(q)
        out[k] = c
        for i, b in enumerate(q):
            r[i + k] -= c * b
        r.pop()
        trim(r)
    return trim(out), r


def peval(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def pderiv(p: Sequence) -> list:
    return trim([i * p[i] for i in range(1, len(p))])


def to_sympy(p: Sequence) -> sympy.Poly:
    return sympy.Poly(list(reversed([int(c) for c in p])) or [0], _X)


def is_irreducible_over_q(p: Sequence) -> bool:
    return bool(to_sympy(p).is_irreducible)


def discriminant(p: Sequence) -> int:
    return int(sympy.discriminant(to_sympy(p).as_expr(), _X))


def factor_over_q(p: Sequence) -> list[tuple[list[int], int]]:
    _, facs = to_sympy(p).factor_list()
    return [([int(c) for c in reversed(f.all_coeffs())], e) for f, e in facs]


# --------------------------------------------------------------------------
# polynomials over F_p
# --------------------------------------------------------------------------

def fp_trim(p: list, m: int) -> list:
    return trim([c % m for c in p])


def fp_mul(p: Sequence, q: Sequence, m: int) -> list:
    r = gf_mul([int(c) % m for c in reversed(p)], [int(c) % m for c in reversed(q)], m, ZZ)
    return list(reversed([int(c) for c in r]))


def fp_gcd(p: Sequence, q: Sequence, m: int) -> list:
    """Monic gcd over F_m (m prime); ascending coefficients."""
    a = gf_strip([int(c) % m for c in reversed(p)])
    b = gf_strip([int(c) % m for c in reversed(q)])
    return list(reversed([int(c) for c in gf_gcd(a, b, m, ZZ)]))


def factor_mod_p(f: Sequence[int], p: int) -> list[tuple[list[int], int]]:
    """Monic irreducible factors of f modulo p with multiplicities, sorted."""
    poly = sympy.Poly(list(reversed([int(c) for c in f])), _X, modulus=p)
    _, facs = poly.factor_list()
    out = []
    for g, e in facs:
        coeffs = [int(c) % p for c in reversed(g.all_coeffs())]
        inv = pow(coeffs[-1], -1, p)
        out.append(([c * inv % p for c in coeffs], e))
    out.sort(key=lambda t: (len(t[0]), t[0][::-1], t[1]))
    return out


# --------------------------------------------------------------------------
# real root isolation (exact rational intervals, via sympy)
# --------------------------------------------------------------------------

def _qq_poly(p: Sequence) -> sympy.Poly:
    coeffs = [sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) for c in reversed(list(p))]
    return sympy.Poly(coeffs or [0], _X, domain="QQ")


def _frac(r) -> Fraction:
    r = sympy.Rational(r)
    return Fraction(int(r.p), int(r.q))


def count_roots(p: Sequence, lo: Fraction, hi: Fraction) -> int:
    """Distinct real roots of p in the closed interval [lo, hi]."""
    P = _qq_poly(p)
    return int(P.count_roots(sympy.Rational(lo.numerator, lo.denominator),
                             sympy.Rational(hi.numerator, hi.denominator)))


def isolate_real_roots(p: Sequence) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals [lo, hi], ascending, each holding exactly one root.

    Endpoints are never roots unless the interval is degenerate (lo == hi),
    which only happens for rational roots.
    """
    out = [(_frac(a), _frac(b)) for (a, b), _ in _qq_poly(p).intervals()]
    out.sort()
    return out


def refine(p: Sequence, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Halve an isolating interval of a simple root of p."""
    if lo == hi:
        return lo, hi
    mid = (lo + hi) / 2
    vm = peval(p, mid)
    if vm == 0:
        return mid, mid
    if (peval(p, lo) > 0) != (vm > 0):
        return lo, mid
    return mid, hi


def sign_at_root(h: Sequence, f: Sequence, lo: Fraction, hi: Fraction) -> tuple[int, Fraction, Fraction]:
    """Exact sign of h at the unique root of f in [lo, hi]; h must not vanish there.

    Returns the sign and the (possibly refined) interval.
    """
    h = trim([Fraction(c) for c in h])
    if not h:
        raise ValueError("zero polynomial has no sign")
    if lo == hi:
        v = peval(h, lo)
        return (1 if v > 0 else -1), lo, hi
    if len(h) == 1:
        return (1 if h[0] > 0 else -1), lo, hi
    for _ in range(10_000):
        vlo, vhi = peval(h, lo), peval(h, hi)
        if vlo != 0 and vhi != 0 and count_roots(h, lo, hi) == 0:
            return (1 if vlo > 0 else -1), lo, hi
        lo, hi = refine(f, lo, hi)
        if lo == hi:
            v = peval(h, lo)
            return (1 if v > 0 else -1), lo, hi
    raise RuntimeError("sign determination did not converge")


# --------------------------------------------------------------------------
# integer lattices (row Hermite normal form)
# --------------------------------------------------------------------------

def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hnf_modular(rows: Iterable[Sequence[int]], dim: int, modulus: int) -> list[list[int]]:
    """Upper-triangular HNF of the lattice spanned by rows plus modulus*Z^dim."""
    work = [[c % modulus for c in r] for r in rows]
    work += [[modulus if i == j else 0 for i in range(dim)] for j in range(dim)]
    basis: list[list[int]] = []
    for col in range(dim):
        pivot = None
        rest = []
        for r in work:
            if r[col] == 0:
                rest.append(r)
                continue
            if pivot is None:
                pivot = r
                continue
            g, s, t = _xgcd(pivot[col], r[col])
            a, b = pivot[col] // g, r[col] // g
            new_pivot = [s * x + t * y for x, y in zip(pivot, r)]
            new_pivot = new_pivot[: col + 1] + [c % modulus for c in new_pivot[col + 1 :]]
            other = [b * x - a * y for x, y in zip(pivot, r)]
            pivot = new_pivot
            rest.append([c % modulus for c in other])
        if pivot[col] < 0:
            pivot = [-c for c in pivot]
        basis.append(pivot)
        work = rest
    # reduce entries above pivots
    for i in range(dim):
        for k in range(i):
            q = basis[k][i] // basis[i][i]
            if q:
                basis[k] = [x - q * y for x, y in zip(basis[k], basis[i])]
    return basis


def hnf_reduce(v: Sequence[int], basis: list[list[int]]) -> tuple[int, ...]:
    v = list(v)
    for i, row in enumerate(basis):
        q = v[i] // row[i]
        if q:
            v = [x - q * y for x, y in zip(v, row)]
    return tuple(v)


def hnf_representatives(basis: list[list[int]]) -> Iterator[tuple[int, ...]]:
    """All canonical residues of Z^dim modulo the lattice."""
    dim = len(basis)

    def rec(i: int, prefix: list[int]) -> Iterator[tuple[int, ...]]:
        if i == dim:
            yield tuple(prefix)
            return
        for c in range(basis[i][i]):
            yield from rec(i + 1, prefix + [c])

    for v in rec(0, []):
        yield hnf_reduce(v, basis)


# --------------------------------------------------------------------------
# linear algebra over GF(2), vectors as int bitmasks
# --------------------------------------------------------------------------

class GF2Span:
    """Incrementally maintained span of bit vectors with combination tracking."""

    def __init__(self) -> None:
        self._rows: dict[int, tuple[int, int]] = {}  # pivot bit -> (vector, combination)
        self.count = 0

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, v: int) -> tuple[int, int]:
        combo = 0
        while v:
            top = v.bit_length() - 1
            if top not in self._rows:
                break
            rv, rc = self._rows[top]
            v ^= rv
            combo ^= rc
        return v, combo

    def _fully_reduce(self, v: int) -> tuple[int, int]:
        combo = 0
        changed = True
        while changed and v:
            changed = False
            for top in sorted(self._rows, reverse=True):
                if v >> top & 1:
                    rv, rc = self._rows[top]
                    v ^= rv
                    combo ^= rc
                    changed = True
        return v, combo

    def add(self, v: int) -> bool:
        """Add generator number ``self.count``; True if it enlarged the span."""
        idx = self.count
        self.count += 1
        r, combo = self._fully_reduce(v)
        if r == 0:
            return False
        self._rows[r.bit_length() - 1] = (r, combo ^ (1 << idx))
        return True

    def solve(self, target: int) -> int | None:
        """Bitmask of generators summing to target, or None."""
        r, combo = self._fully_reduce(target)
        return combo if r == 0 else None

    def contains(self, v: int) -> bool:
        return self._fully_reduce(v)[0] == 0


def bits_dot(u: int, v: int) -> int:
    return bin(u & v).count("1") & 1


# --------------------------------------------------------------------------
# enumeration
# --------------------------------------------------------------------------

def rationals_by_height(bound: int) -> Iterator[Fraction]:
    """0, then p/q with max(|p|, q) increasing, positive before negative."""
    yield Fraction(0)
    for h in range(1, bound + 1):
        seen = []
        for q in range(1, h + 1):
            for p in range(0, h + 1):
                if max(p, q) != h or p == 0 or gcd(p, q) != 1:
                    continue
                seen.append(Fraction(p, q))
        seen.sort(key=lambda r: (r.denominator, r.numerator))
        for r in seen:
            yield r
            yield -r


def integer_vectors_by_height(dim: int, bound: int) -> Iterator[tuple[int, ...]]:
    """Integer vectors with sup-norm <= bound, by increasing sup-norm."""
    yield (0,) * dim
    for h in range(1, bound + 1):
        vals = sorted(range(-h, h + 1), key=lambda c: (abs(c), c < 0))

        def rec(i: int, prefix: tuple, hit: bool) -> Iterator[tuple[int, ...]]:
            if i == dim:
                if hit:
                    yield prefix
                return
            for c in vals:
                yield from rec(i + 1, prefix + (c,), hit or abs(c) == h)

        yield from rec(0, (), False)


def integer_nth_root(n: int, k: int) -> tuple[int, bool]:
    r, exact = sympy.integer_nthroot(n, k)
    return int(r), bool(exact)

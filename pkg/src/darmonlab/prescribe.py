"""Constructing quaternion algebras with a prescribed set of ramified places.

``prescribe_symbols`` finds x with prescribed Hilbert symbols (a_i, x)_v by
linear algebra over GF(2): x is sought as a product of elements from a pool
(-1 followed by uniformizers of primes of increasing norm) and the pool grows
until the symbol system becomes solvable.  ``realize_finite`` and
``realize_with_real`` build a by weak approximation and b by that search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import sympy

from . import _arith as A
from .localsymbols import candidate_places, delta, delta_upper, hilbert, local_square
from .numberfield import (
    ComplexPlace,
    FieldElement,
    FinitePlace,
    NumberField,
    Place,
    RealPlace,
    SearchExhausted,
    place_sort_key,
)


class Unsatisfiable(ValueError):
    """The requested symbols violate a necessary condition."""

    def __init__(self, condition: str, detail: str):
        super().__init__(f"unsatisfiable({condition}): {detail}")
        self.condition = condition
        self.detail = detail


@dataclass
class PrescriptionResult:
    a: FieldElement
    b: FieldElement
    realized_delta: list
    realized_delta_upper: list
    search_log: dict = field(default_factory=dict)


# --------------------------------------------------------------------------
# prescribed symbols
# --------------------------------------------------------------------------

def _precheck(a_list: Sequence[FieldElement], targets: Mapping[tuple[int, Place], int]) -> None:
    n = len(a_list)
    for (i, v), s in targets.items():
        if not 0 <= i < n:
            raise Unsatisfiable("a", f"index {i} out of range")
        if s not in (1, -1):
            raise Unsatisfiable("a", f"symbol value {s} is not +-1")
        if isinstance(v, ComplexPlace) and s == -1:
            raise Unsatisfiable("c", f"symbol -1 requested at complex place {v.label()}")
    for i in range(n):
        minus = sum(1 for (j, _), s in targets.items() if j == i and s == -1)
        if minus % 2:
            raise Unsatisfiable("b", f"odd number of -1 symbols for index {i}")
    places = {v for (_, v) in targets}
    for v in places:
        eps = [targets.get((i, v), 1) for i in range(n)]
        if all(e == 1 for e in eps):
            continue
        for size in range(1, n + 1):
            for subset in combinations(range(n), size):
                prod = a_list[subset[0]]
                for j in subset[1:]:
                    prod = prod * a_list[j]
                if local_square(prod, v):
                    sign = 1
                    for j in subset:
                        sign *= eps[j]
                    if sign == -1:
                        raise Unsatisfiable(
                            "c",
                            f"product of a_i for i in {list(subset)} is a square at {v.label()}",
                        )


def _pool(K: NumberField, start_prime: int = 2) -> Iterable[tuple[FieldElement, str]]:
    yield -K.one, "-1"
    for p in sympy.primerange(start_prime, 10**6):
        for P in K.primes_above(int(p)):
            yield K.uniformizer(P), f"z{P.label()}"


def prescribe_symbols(
    a_list: Sequence[FieldElement],
    targets: Mapping[tuple[int, Place], int],
    max_pool: int = 200,
    log: dict | None = None,
) -> FieldElement:
    """x with (a_i, x)_v = targets[(i, v)] (default +1) at every place."""
    if not a_list:
        raise ValueError("a_list must be nonempty")
    for a in a_list:
        if a.is_zero():
            raise ValueError("a_i must be nonzero")
    _precheck(a_list, targets)
    K = a_list[0].field
    n = len(a_list)
    fixed = set(candidate_places(*a_list)) | {v for (_, v) in targets if not isinstance(v, ComplexPlace)}
    pool: list[FieldElement] = []
    names: list[str] = []
    places: list[Place] = sorted(fixed, key=place_sort_key)
    known = set(places)
    cache: dict = {}

    def symbol(i: int, j: int, v: Place) -> int:
        key = (i, j, v)
        if key not in cache:
            cache[key] = hilbert(a_list[i], pool[j], v)
        return cache[key]

    gen = _pool(K)
    batch = 1
    attempts = 0
    while True:
        for _ in range(batch):
            x, name = next(gen)
            pool.append(x)
            names.append(name)
            for v in candidate_places(x):
                if v not in known:
                    known.add(v)
                    places.append(v)
        attempts += 1
        rows = [(i, v) for v in places for i in range(n)]
        target = 0
        for r, (i, v) in enumerate(rows):
            if targets.get((i, v), 1) == -1:
                target |= 1 << r
        span = A.GF2Span()
        for j in range(len(pool)):
            col = 0
            for r, (i, v) in enumerate(rows):
                if symbol(i, j, v) == -1:
                    col |= 1 << r
            span.add(col)
        combo = span.solve(target)
        if combo is not None:
            x = K.one
            used = []
            for j in range(len(pool)):
                if (combo >> j) & 1:
                    x = x * pool[j]
                    used.append(names[j])
            _verify_symbols(a_list, targets, x)
            if log is not None:
                log.update(attempts=attempts, pool_size=len(pool), factors=used, places=len(places))
            return x
        if len(pool) >= max_pool:
            raise SearchExhausted(
                "bound exceeded: symbol system unsolvable over the current pool",
                bound=max_pool,
                state={"pool": names},
            )
        batch = min(batch * 2, 16)


def _verify_symbols(a_list, targets, x: FieldElement) -> None:
    for i, a in enumerate(a_list):
        for v in candidate_places(a, x):
            want = targets.get((i, v), 1)
            if hilbert(a, x, v) != want:
                raise AssertionError(f"symbol verification failed at {v.label()}")
    for (i, v), s in targets.items():
        if hilbert(a_list[i], x, v) != s:
            raise AssertionError(f"symbol verification failed at {v.label()}")


# --------------------------------------------------------------------------
# ramification sets
# --------------------------------------------------------------------------

def _reduce_squarefree(b: FieldElement, primes, rounds: int = 8) -> FieldElement:
    """b / x^2 with nu_P(b / x^2) in {0, 1} at the given primes."""
    K = b.field
    up, down = [], []
    for P in primes:
        f = K.valuation(b, P) // 2
        if f > 0:
            up.append((P, K.uniformizer(P) ** f, f + 1))
            down.append((P, K.one, 1))
        elif f < 0:
            up.append((P, K.one, 1))
            down.append((P, K.uniformizer(P) ** (-f), -f + 1))
        else:
            up.append((P, K.one, 1))
            down.append((P, K.one, 1))
    if not any(K.valuation(b, P) // 2 for P in primes):
        return b
    x1 = K.weak_approximate(up, rounds=rounds)
    x2 = K.weak_approximate(down, rounds=rounds)
    x = x1 / x2
    return b / (x * x)


def _realize(K: NumberField, S: Sequence[Place], allow_real: bool, rounds: int = 8) -> PrescriptionResult:
    S = list(dict.fromkeys(S))
    for v in S:
        if isinstance(v, ComplexPlace):
            raise ValueError("complex places never ramify")
        if isinstance(v, RealPlace) and not allow_real:
            raise ValueError("realize_finite takes finite places only")
    if len(S) % 2:
        raise ValueError("odd cardinality: impossible by Hilbert reciprocity")
    if not S:
        return PrescriptionResult(K.one, K.one, [], [], {"attempts": 0})
    finite = [v.prime for v in S if isinstance(v, FinitePlace)]
    real = {v.index for v in S if isinstance(v, RealPlace)}
    congr = [(P, K.uniformizer(P), 2) for P in finite]
    signs = [(i, -1 if i in real else 1) for i in range(K.real_place_count)] if real else []
    a = K.weak_approximate(congr, signs, rounds=rounds)
    log: dict = {}
    targets = {(0, v): -1 for v in S}
    b = prescribe_symbols([a], targets, log=log)
    b = _reduce_squarefree(b, finite, rounds)
    d = sorted(delta(a, b), key=place_sort_key)
    du = sorted(delta_upper(a, b), key=place_sort_key)
    want = sorted(S, key=place_sort_key)
    if d != want:
        raise AssertionError("realized ramification set differs from the request")
    for v in du:
        if abs(K.valuation(a, v.prime)) > 1 or abs(K.valuation(b, v.prime)) > 1:
            raise AssertionError("squarefree bound violated")
    return PrescriptionResult(a, b, d, du, log)


def realize_finite(K: NumberField, S: Sequence[Place], rounds: int = 8) -> PrescriptionResult:
    """(a, b) whose ramification set is exactly the finite set S (|S| even)."""
    result = _realize(K, S, allow_real=False, rounds=rounds)
    want = sorted(dict.fromkeys(S), key=place_sort_key)
    if result.realized_delta_upper != want:
        raise AssertionError("realized set of odd-valuation places differs from the request")
    return result


def realize_with_real(K: NumberField, S: Sequence[Place], rounds: int = 8) -> PrescriptionResult:
    """(a, b) ramified exactly at S, which may contain real places."""
    return _realize(K, S, allow_real=True, rounds=rounds)

"""Seeded property suites shared by ``darmonlab verify`` and the test suite.

Each suite returns a plain dict with its counters, the seed and the
wall-clock time, so results can be logged and compared run to run.
"""

from __future__ import annotations

import random
import time
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Optional

import sympy

from .darmon import darmon_member, rational_power_oracle
from .definable_sets import in_T, in_T_oracle
from .formula import Atom, Exists, Forall, Or, bounded_search, decide
from .formula_compiler import (
    assemble_empty,
    assemble_main,
    budget_ledger,
    combine_expr,
    combination_bound,
    definition,
    ledger_summary,
    rewrite_existsforall_or_exists,
    rewrite_universal_or_exists,
)
from .localsymbols import delta, hilbert, reciprocity_check
from .numberfield import FieldElement, FinitePlace, NumberField, RealPlace, parse_field
from .polynomial import Leaf, Polynomial


def random_rational(rng: random.Random, height: int, nonzero: bool = True) -> Fraction:
    while True:
        x = Fraction(rng.randint(-height, height), rng.randint(1, height))
        if x or not nonzero:
            return x


def random_element(rng: random.Random, K: NumberField, height: int) -> FieldElement:
    while True:
        x = K.element([random_rational(rng, height, nonzero=False) for _ in range(K.degree)])
        if not x.is_zero():
            return x


# --------------------------------------------------------------------------
# Hilbert symbols
# --------------------------------------------------------------------------

def reciprocity_suite(K: NumberField, count: int, seed: int = 0, height: int = 100) -> dict:
    rng = random.Random(seed)
    t0 = time.perf_counter()
    failures, odd = [], []
    for _ in range(count):
        a, b = random_element(rng, K, height), random_element(rng, K, height)
        if not reciprocity_check(a, b):
            failures.append((str(a), str(b)))
        if len(delta(a, b)) % 2:
            odd.append((str(a), str(b)))
    return {"field": K.spec, "pairs": count, "seed": seed, "failures": failures, "odd_delta": odd,
            "seconds": time.perf_counter() - t0}


def _square_class_rep(a: int, p: int) -> int:
    """p^(v mod 2) * (unit class representative) for a nonzero integer a."""
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    if p == 2:
        u = a % 8
    else:
        u = 1 if pow(a % p, (p - 1) // 2, p) == 1 else int(sympy.ntheory.residue_ntheory.primitive_root(p))
    return p ** (v % 2) * u


@lru_cache(maxsize=None)
def _solvable_mod(a: int, b: int, p: int) -> int:
    """Exhaustive search for a primitive solution of z^2 = a x^2 + b y^2 mod p^k.

    a, b have valuation <= 1, so any primitive solution has a partial
    derivative of valuation <= v(2) + 1 and Hensel's lemma lifts solutions
    modulo p^(2 v(2) + 3): k = 3 for odd p and k = 5 for p = 2.
    """
    k = 5 if p == 2 else 3
    mod = p ** k
    unit_squares = set()
    all_squares = set()
    for z in range(mod):
        s = z * z % mod
        all_squares.add(s)
        if z % p:
            unit_squares.add(s)
    for x in range(mod):
        for y in range(mod):
            s = (a * x * x + b * y * y) % mod
            if x % p or y % p:
                if s in all_squares:
                    return 1
            elif s in unit_squares:
                return 1
    return -1


def brute_force_hilbert(a: int, b: int, p: int | None) -> int:
    """(a, b) over Q_p (p None: the reals) by exhaustive local solvability search."""
    if a == 0 or b == 0:
        raise ValueError("symbols need nonzero arguments")
    if p is None:
        return -1 if a < 0 and b < 0 else 1
    return _solvable_mod(_square_class_rep(a, p), _square_class_rep(b, p), p)


def brute_force_suite(bound: int = 50, primes=(2, 3, 5, 7)) -> dict:
    K = parse_field("Q")
    t0 = time.perf_counter()
    mismatches = []
    checked = 0
    values = [x for x in range(-bound, bound + 1) if x]
    places = [(p, FinitePlace(K.primes_above(p)[0])) for p in primes] + [(None, RealPlace(0))]
    for a in values:
        A = K.rational(a)
        for b in values:
            B = K.rational(b)
            for p, v in places:
                checked += 1
                if hilbert(A, B, v) != brute_force_hilbert(a, b, p):
                    mismatches.append((a, b, p))
    return {"checked": checked, "mismatches": mismatches, "seconds": time.perf_counter() - t0}


# --------------------------------------------------------------------------
# Darmon sets
# --------------------------------------------------------------------------

def darmon_oracle_suite(height: int = 200, ns=(1, 2, 3, 4)) -> dict:
    K = parse_field("Q")
    t0 = time.perf_counter()
    mismatches = []
    checked = 0
    for q in range(1, height + 1):
        for p in range(-height, height + 1):
            if gcd(p, q) != 1:
                continue
            r = Fraction(p, q)
            x = K.rational(r)
            for n in ns:
                checked += 1
                if darmon_member(K, x, n) != rational_power_oracle(r, n):
                    mismatches.append((str(r), n))
    return {"checked": checked, "mismatches": mismatches, "seconds": time.perf_counter() - t0}


def filtration_suite(K: NumberField, count: int = 500, seed: int = 0,
                     pairs=((1, 2), (2, 4), (3, 6)), height: int = 50) -> dict:
    rng = random.Random(seed)
    violations = []
    for n, m in pairs:
        for _ in range(count):
            r = _power_biased_element(rng, K, height)
            if darmon_member(K, r, m) and not darmon_member(K, r, n):
                violations.append((str(r), n, m))
    return {"field": K.spec, "samples_per_pair": count, "seed": seed, "violations": violations}


def _power_biased_element(rng: random.Random, K: NumberField, height: int) -> FieldElement:
    """Random elements, half of them with denominators that are high powers."""
    x = random_element(rng, K, height)
    if rng.random() < 0.5:
        y = random_element(rng, K, 6)
        x = x / (y ** rng.choice((2, 3, 4, 6, 12)))
    return x


# --------------------------------------------------------------------------
# formulas
# --------------------------------------------------------------------------

def _random_poly(rng: random.Random, names: list[str], height: int) -> Polynomial:
    """Random polynomial that often has rational zeros."""
    kind = rng.random()
    xs = [Polynomial.var(v) for v in names]
    if kind < 0.4:  # product of linear factors
        out = Polynomial.const(rng.choice([c for c in range(-height, height + 1) if c]))
        for _ in range(rng.randint(1, 2)):
            lin = Polynomial.const(rng.randint(-height, height))
            for x in xs:
                lin = lin + rng.randint(-height, height) * x
            if lin.is_constant():
                lin = lin + xs[0]
            out = out * lin
        return out
    if kind < 0.8:  # c x^2 - d (+ linear term in a second variable)
        p = rng.randint(1, height) * xs[0] * xs[0] - rng.randint(-height, height)
        if len(xs) > 1:
            p = p + rng.randint(-height, height) * xs[1]
        return p
    if kind < 0.9:  # constant
        return Polynomial.const(rng.randint(-2, 2))
    p = Polynomial.const(rng.randint(-height, height))
    for x in xs:
        p = p + rng.randint(-height, height) * x * x + rng.randint(-height, height) * x
    return p


def rewrite_suite(rule: int, count: int = 100, seed: int = 0, height: int = 10, search_height: int = 2) -> dict:
    """Compare pre- and post-rewrite truth values on random matrix polynomials."""
    rng = random.Random(seed)
    agree = disagree = inconclusive = 0
    log = []
    for i in range(count):
        if rule == 1:
            xs = [f"x{j}" for j in range(rng.randint(1, 2))]
            zs = [f"z{j}" for j in range(rng.randint(1, 2))]
            P, Q = _random_poly(rng, xs, height), _random_poly(rng, zs, height)
            pre = Or((Forall(tuple(xs), Atom(Leaf(P), "neq")), Exists(tuple(zs), Atom(Leaf(Q), "eq"))))
            post = rewrite_universal_or_exists(pre)
            desc = f"P={P}; Q={Q}"
        else:
            xs, ys, zs = ["x0"], ["y0"], [f"z{j}" for j in range(rng.randint(1, 2))]
            p, q = _random_poly(rng, xs + ys, height), _random_poly(rng, zs, height)
            if rng.random() < 0.5:
                p = _random_poly(rng, ys + xs, height)
            pre = Or((Exists(tuple(xs), Forall(tuple(ys), Atom(Leaf(p), "neq"))),
                      Exists(tuple(zs), Atom(Leaf(q), "eq"))))
            post = rewrite_existsforall_or_exists(pre, 2)
            desc = f"p={p}; q={q}"
        u = decide(pre, height=search_height)
        v = decide(post, height=search_height)
        if u is None or v is None:
            inconclusive += 1
            log.append({"instance": i, "case": desc, "pre": u, "post": v})
        elif u == v:
            agree += 1
        else:
            disagree += 1
            log.append({"instance": i, "case": desc, "pre": u, "post": v, "disagreement": True})
    return {"rule": rule, "instances": count, "seed": seed, "agree": agree, "disagree": disagree,
            "inconclusive": inconclusive, "log": log}


def combiner_suite(points: int = 10_000, seed: int = 0, mode: str = "general", parts: int = 3) -> dict:
    """Zero-set exactness of combine_conjunction on random rational points."""
    rng = random.Random(seed)
    names = ["x", "y", "z"]
    X = [Polynomial.var(v) for v in names]
    zeros = [tuple(random_rational(rng, 5, nonzero=False) for _ in names) for _ in range(4)]
    polys = []
    for _ in range(parts):
        f = Polynomial()
        # vanish on the first two designated points through linear shifts
        z0 = zeros[0]
        for xi, ci in zip(X, z0):
            f = f + (xi - ci) * Polynomial.const(rng.randint(-5, 5)) * (X[rng.randrange(3)] - zeros[1][0] + 1)
        if f.is_zero():
            f = X[0] - z0[0]
        polys.append(f)
    expr = combine_expr([Leaf(p) for p in polys], mode)
    combined = expr.expand()
    bound = combination_bound([Leaf(p) for p in polys], mode)
    bad = 0
    common = 0
    for i in range(points):
        if i % 4 == 0:
            pt = rng.choice(zeros)
        elif i % 4 == 1:
            # points on the zero set of a single input
            pt = tuple(random_rational(rng, 5, nonzero=False) for _ in names)
            pt = (zeros[0][0], pt[1], pt[2]) if rng.random() < 0.5 else pt
        else:
            pt = tuple(random_rational(rng, 20, nonzero=False) for _ in names)
        env = dict(zip(names, pt))
        all_zero = all(p.evaluate(env) == 0 for p in polys)
        common += all_zero
        if (combined.evaluate(env) == 0) != all_zero:
            bad += 1
    return {"mode": mode, "points": points, "seed": seed, "mismatches": bad, "common_zeros": common,
            "degree": combined.degree(), "bound": bound, "input_degree": max(p.degree() for p in polys)}


def t_cross_oracle_suite(count: int = 200, seed: int = 0, height: int = 20, param_height: int = 10) -> dict:
    """in_T_oracle against in_T on random (a, b, t) over Q."""
    K = parse_field("Q")
    rng = random.Random(seed)
    contradictions, true_cases, witnessed, unknown = [], 0, 0, []
    t0 = time.perf_counter()
    for _ in range(count):
        a = K.rational(random_rational(rng, param_height))
        b = K.rational(random_rational(rng, param_height))
        t = K.rational(random_rational(rng, param_height, nonzero=False))
        truth = in_T(a, b, t)
        res = in_T_oracle(a, b, t, height)
        if res["status"] == "true":
            if not truth:
                contradictions.append((str(a), str(b), str(t)))
        elif res["status"] == "false" and truth:
            contradictions.append((str(a), str(b), str(t)))
        if truth:
            true_cases += 1
            if res["status"] == "true":
                witnessed += 1
            else:
                unknown.append((str(a), str(b), str(t)))
    return {"triples": count, "seed": seed, "contradictions": contradictions, "true_cases": true_cases,
            "witnessed": witnessed, "shortfall": unknown, "seconds": time.perf_counter() - t0}


def t_template_suite(count: int = 200, seed: int = 0, search_height: int = 1) -> dict:
    """bounded_search on the T template against in_T."""
    K = parse_field("Q")
    rng = random.Random(seed)
    T = definition("T").formula()
    violations, found = [], 0
    for _ in range(count):
        a, b = random_rational(rng, 5), random_rational(rng, 5)
        t = random_rational(rng, 5, nonzero=False)
        w = bounded_search(T, {"a": a, "b": b, "r": t}, height=search_height)
        truth = in_T(K.rational(a), K.rational(b), K.rational(t))
        if w is not None:
            found += 1
            if not truth:
                violations.append((str(a), str(b), str(t)))
    return {"triples": count, "seed": seed, "witnesses": found, "violations": violations}


def budget_suite(ns=(1, 2, 10, 100)) -> dict:
    summary = ledger_summary(budget_ledger(ns=ns))
    assemblies = []
    for n in ns:
        for name, fn in (("main", assemble_main), ("empty", assemble_empty)):
            _, budget = fn(n)
            assemblies.append({"name": name, "n": n, "match": budget.matches()})
    return {"mismatches": summary["mismatches"], "counts": summary["counts"], "assemblies": assemblies}

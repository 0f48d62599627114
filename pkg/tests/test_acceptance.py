"""Acceptance suite: one test per criterion, tolerances as stated there."""

import random
import time
import warnings
from fractions import Fraction

import pytest

from darmonlab import checks
from darmonlab.formula import quantifier_shape
from darmonlab.formula_compiler import assemble_empty, assemble_main, budget_ledger, ledger_summary
from darmonlab.localsymbols import delta, delta_upper
from darmonlab.numberfield import FinitePlace, parse_field, valuation
from darmonlab.prescribe import realize_finite

SEED = 20240601

_pairs_tested: list = []


def _collect_pairs(K, count, seed, height=100):
    rng = random.Random(seed)
    return [(checks.random_element(rng, K, height), checks.random_element(rng, K, height)) for _ in range(count)]


def test_hilbert_reciprocity():
    t0 = time.perf_counter()
    plan = [("Q", 1000), ("Q(sqrt,-1)", 200), ("Q(sqrt,2)", 200), ("Q(sqrt,-5)", 200)]
    failures = []
    for spec, count in plan:
        K = parse_field(spec)
        res = checks.reciprocity_suite(K, count, SEED, height=100)
        failures += res["failures"]
        _pairs_tested.extend(_collect_pairs(K, count, SEED))
    elapsed = time.perf_counter() - t0
    print(f"reciprocity: {sum(c for _, c in plan)} pairs in {elapsed:.1f}s")
    assert failures == []
    assert elapsed < 300


def test_brute_force_symbol_agreement():
    res = checks.brute_force_suite(bound=50, primes=(2, 3, 5, 7))
    print(f"brute force: {res['checked']} symbols in {res['seconds']:.1f}s")
    assert res["checked"] == 100 * 100 * 5
    assert res["mismatches"] == []


def test_even_ramification_cardinality():
    if not _pairs_tested:
        for spec, count in [("Q", 1000), ("Q(sqrt,-1)", 200), ("Q(sqrt,2)", 200), ("Q(sqrt,-5)", 200)]:
            _pairs_tested.extend(_collect_pairs(parse_field(spec), count, SEED))
    odd = [(str(a), str(b)) for a, b in _pairs_tested if len(delta(a, b)) % 2]
    QQ = parse_field("Q")
    grid = [x for x in range(-50, 51) if x]
    odd += [(a, b) for a in grid for b in grid if len(delta(QQ.rational(a), QQ.rational(b))) % 2]
    assert len(_pairs_tested) == 1600
    assert odd == []


@pytest.mark.parametrize("spec", ["Q", "Q(sqrt,-5)"])
def test_prescription_roundtrip(spec):
    K = parse_field(spec)
    pool = [FinitePlace(P) for P in K.primes_up_to(50)]
    rng = random.Random(SEED)
    slowest = 0.0
    for _ in range(30):
        S = rng.sample(pool, rng.choice([0, 2, 2, 4, 4, 6, 8]))
        t0 = time.perf_counter()
        res = realize_finite(K, S)
        elapsed = time.perf_counter() - t0
        slowest = max(slowest, elapsed)
        assert set(delta_upper(res.a, res.b)) == set(S)
        for v in S:
            assert abs(valuation(res.a, v.prime)) <= 1
            assert abs(valuation(res.b, v.prime)) <= 1
        assert elapsed < 60
    print(f"prescription over {spec}: slowest instance {slowest:.2f}s")


def test_darmon_oracle_equivalence():
    res = checks.darmon_oracle_suite(height=200, ns=(1, 2, 3, 4))
    print(f"darmon oracle: {res['checked']} comparisons in {res['seconds']:.1f}s")
    assert res["mismatches"] == []


@pytest.mark.parametrize("spec", ["Q", "Q(sqrt,-5)"])
def test_filtration(spec):
    res = checks.filtration_suite(parse_field(spec), 500, SEED, pairs=((1, 2), (2, 4), (3, 6)))
    assert res["violations"] == []


LEDGER_VALUES = {
    "phi.quantifiers": 32,
    "ND.quantifiers": 417,
    "Ksf.exists": 418,
    "sim.quantifiers": 429,
    "J42.quantifiers": 556,
    "Inv.quantifiers": 557,
    "Union.quantifiers": 1113,
    "Ksf.forall": 1117,
    "arcplaces.quantifiers": 13,
    "ND.degree": 1536,
    "ZND.degree": 1542,
    "J42.degree": 2304,
    "Inv.degree": 4608,
    "sim.degree": 4608,
    "Union.degree": 6912,
    "Ksf.degree": 8455,
    "ND.degree.real": 128,
    "ZND.degree.real": 134,
    "J42.degree.real": 256,
    "sim.degree.real": 256,
    "Inv.degree.real": 512,
    "Union.degree.real": 768,
    "Ksf.degree.real": 903,
}
ASSEMBLY_VALUES = {
    "empty.n{n}.forall": 15,
    "empty.n{n}.exists": 33,
    "main.n{n}.exists": 2266,
    "main.n{n}.forall_inner": 1266,
    "main.n{n}.W": 25365,
    "main.n{n}.degree": 50730,
    "main.n{n}.W.real": 1806,
    "main.n{n}.degree.real": 3612,
}


def test_budget_ledger():
    ns = (1, 2, 10, 100)
    rows = {r.id: r for r in budget_ledger(ns=ns)}
    for key, value in LEDGER_VALUES.items():
        assert rows[key].computed == value and rows[key].status == "pass", key
    for n in ns:
        for key, value in ASSEMBLY_VALUES.items():
            row = rows[key.format(n=n)]
            assert row.computed == value and row.status == "pass", row.id
    for n in ns:
        f, budget = assemble_main(n)
        assert quantifier_shape(f) == [("forall", 2), ("exists", 2266), ("forall", 1266)]
        assert budget.degree_bound == max(50730, 12 * n + 14)
        assert budget.real_subfield_variant["degree_bound"] == max(3612, 4 * n + 6)
        g, eb = assemble_empty(n)
        assert quantifier_shape(g) == [("forall", 15), ("exists", 33)]
        assert eb.degree_bound == max(6 * n + 31, 73)
        assert eb.real_subfield_variant["degree_bound"] == max(2 * n + 19, 33)
    summary = ledger_summary(list(rows.values()))
    assert summary["mismatches"] == []
    for n in ns:
        flagged = rows[f"second_goal.n{n}.forall"]
        assert flagged.status == "flagged" and (flagged.computed, flagged.claimed) == (15, 22)
        deg = rows[f"second_goal.n{n}.degree"]
        assert deg.status == "flagged" and deg.claimed == max(6 * n + 55, 97)
        real = rows[f"second_goal.n{n}.degree.real"]
        assert real.status == "flagged" and real.claimed == max(2 * n + 35, 49)


@pytest.mark.parametrize("mode", ["general", "real"])
def test_single_polynomial_combiner(mode):
    res = checks.combiner_suite(points=10_000, seed=SEED, mode=mode)
    assert res["mismatches"] == 0
    if mode == "real":
        assert res["degree"] == 2 * res["input_degree"]
    else:
        assert res["degree"] <= res["bound"]


@pytest.mark.parametrize("rule", [1, 2])
def test_rewrite_rule_semantics(rule):
    res = checks.rewrite_suite(rule, count=100, seed=SEED, height=10)
    for entry in res["log"]:
        print(f"rule {rule} inconclusive: {entry}")
    print(f"rule {rule}: agree {res['agree']}, disagree {res['disagree']}, inconclusive {res['inconclusive']}")
    assert res["agree"] + res["disagree"] + res["inconclusive"] == 100
    assert res["disagree"] == 0


def test_T_membership_cross_oracle():
    res = checks.t_cross_oracle_suite(count=200, seed=SEED, height=20, param_height=30)
    rate = res["witnessed"] / res["true_cases"] if res["true_cases"] else 1.0
    print(f"T cross-oracle: {res['witnessed']}/{res['true_cases']} witnessed ({rate:.1%})")
    if rate < 0.95:
        warnings.warn(f"witness shortfall: {res['shortfall']}")
    assert res["contradictions"] == []

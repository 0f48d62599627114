from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from darmonlab.formula import (
    And,
    Atom,
    Exists,
    Forall,
    Not,
    Or,
    bounded_search,
    check_variables,
    decide,
    evaluate_qf,
    implies,
    matrix_of,
    prenex,
    quantifier_shape,
    shape_string,
    standardize_apart,
    to_json,
    to_sexp,
)
from darmonlab.numberfield import parse_field
from darmonlab.polynomial import Add, Combine, Leaf, Mul, Polynomial, Pow, const, var

from conftest import rationals

x, y, z = (Polynomial.var(v) for v in "xyz")


def eq(p):
    return Atom(Leaf(p), "eq")


def neq(p):
    return Atom(Leaf(p), "neq")


# polynomials -----------------------------------------------------------------

small = st.integers(-5, 5)


@st.composite
def polys(draw):
    p = Polynomial()
    for _ in range(draw(st.integers(0, 4))):
        term = Polynomial.const(draw(small))
        for v in (x, y, z):
            term = term * v ** draw(st.integers(0, 2))
        p = p + term
    return p


points = st.fixed_dictionaries({v: rationals(10, nonzero=False) for v in "xyz"})


@given(polys(), polys(), points)
def test_polynomial_ring_operations(p, q, pt):
    assert (p * q).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt)
    assert (p + q).evaluate(pt) == p.evaluate(pt) + q.evaluate(pt)
    assert (p - p).is_zero()
    if not p.is_zero() and not q.is_zero():
        assert (p * q).degree() == p.degree() + q.degree()


@given(polys(), points)
def test_substitute_then_evaluate(p, pt):
    partial = p.substitute({"x": pt["x"]})
    assert "x" not in partial.variables()
    assert partial.evaluate(pt) == p.evaluate(pt)


@given(polys())
def test_coefficients_in_reassemble(p):
    cs = p.coefficients_in("x")
    back = Polynomial()
    for k, c in enumerate(cs):
        back = back + c * x ** k
    assert back == p


def test_polynomial_sexp_and_json():
    p = 3 * x * x * y - 2 * y + 1
    assert p.to_sexp() == "(poly ((3 ((x 2) (y 1))) (-2 ((y 1))) (1 ())))"
    assert p.to_json()["poly"][0] == {"coeff": "3", "monomial": [["x", 2], ["y", 1]]}
    assert p.degree() == 3 and p.degree_in("x") == 2


@given(polys(), polys(), points)
def test_expression_nodes_expand_consistently(p, q, pt):
    e = Add((Mul((Leaf(p), Leaf(q))), Pow(Leaf(p), 2)))
    assert e.expand().evaluate(pt) == e.evaluate(pt)
    assert e.expand().degree() <= e.degree()
    for mode, kind in (("real", ("sos",)), ("general", ("pair", 2))):
        c = Combine((Leaf(p), Leaf(q)), kind)
        assert c.expand().evaluate(pt) == c.evaluate(pt)
        assert c.expand().degree() <= c.degree(mode)


# formulas -----------------------------------------------------------------------

def test_sexp_export():
    f = Forall(("x",), Exists(("y",), eq(x * y - 1)))
    assert to_sexp(f) == "(forall (x) (exists (y) (eq (poly ((1 ((x 1) (y 1))) (-1 ()))) 0)))"
    j = to_json(f)
    assert j["forall"] == ["x"] and j["body"]["exists"] == ["y"]
    assert j["body"]["body"]["atom"] == "eq"


def test_prenex_renames_clashes():
    f = And((Exists(("x",), eq(x)), Forall(("x",), neq(x * x + 1))))
    with pytest.raises(ValueError):
        check_variables(f)
    g = prenex(f)
    check_variables(g)
    assert to_sexp(g).startswith("(exists (x) (forall (x_1) (and")


def test_standardize_apart_avoids_capture():
    # x is free on the left and bound on the right: the bound one is renamed
    f = And((eq(x - 1), Exists(("x",), eq(x * y))))
    g = standardize_apart(f)
    assert g.parts[0] == f.parts[0]
    assert g.parts[1].vars == ("x_1",)
    assert g.free_variables() == {"x", "y"}


def test_quantifier_shape_merges_blocks():
    f = And((Forall(("a1",), Exists(("b1",), eq(x))), Forall(("a2",), Exists(("b2", "b3"), eq(y)))))
    assert quantifier_shape(f) == [("forall", 2), ("exists", 3)]
    assert shape_string(quantifier_shape(f)) == "A2 E3"
    assert isinstance(matrix_of(f), And)
    neg = Not(Forall(("u",), eq(x)))
    assert quantifier_shape(neg) == [("exists", 1)]
    assert shape_string([]) == "qf"


def test_prenex_keeps_truth():
    f = Or((Forall(("x",), neq(x * x + 1)), Exists(("z",), eq(z))))
    assert decide(f) is True and decide(prenex(f)) is True


def test_evaluate_qf():
    f = And((eq(x - y), Not(eq(x))))
    assert evaluate_qf(f, {"x": 2, "y": 2})
    assert not evaluate_qf(f, {"x": 0, "y": 0})
    assert evaluate_qf(implies(eq(x), eq(x * y)), {"x": 0, "y": 5})
    with pytest.raises(ValueError):
        evaluate_qf(f, {"x": 1})
    with pytest.raises(ValueError):
        evaluate_qf(Exists(("x",), eq(x)), {})


def test_decide_examples():
    assert decide(Exists(("x",), eq(x * x - 2))) is False
    assert decide(Exists(("x",), eq(x * x - 2)), field=parse_field("Q(sqrt,2)")) is True
    assert decide(Forall(("x",), Exists(("y",), eq(x * y - 1)))) is False
    assert decide(Forall(("x",), Or((eq(x), Exists(("y",), eq(x * y - 1)))))) is True
    assert decide(Forall(("x",), neq(x * x + 1))) is True
    with pytest.raises(ValueError):
        decide(Exists(("x",), eq(x - y)))


@given(rationals(30, nonzero=False))
def test_decide_rational_squares(c):
    f = Exists(("x",), eq(x * x - Polynomial.const(c)))
    is_square = c >= 0 and all(int(round(abs(t) ** 0.5)) ** 2 == abs(t) for t in (c.numerator, c.denominator))
    assert decide(f) is is_square


@given(rationals(20, nonzero=False), rationals(20, nonzero=False))
def test_linear_elimination(c, d):
    # exists v (c v + d = 0) iff c != 0 or d = 0
    f = Exists(("v",), eq(Polynomial.const(c) * Polynomial.var("v") + Polynomial.const(d)))
    assert decide(f) is (c != 0 or d == 0)


def test_bounded_search_verifies_witness():
    f = Exists(("x", "y"), And((eq(x + y - 3), eq(x - y - 1))))
    w = bounded_search(f, height=3)
    assert w == {"x": 2, "y": 1}
    assert bounded_search(Exists(("x",), eq(x * x - 3)), height=5) is None
    with pytest.raises(ValueError):
        bounded_search(Forall(("x",), eq(x)))

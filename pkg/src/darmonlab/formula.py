"""First-order formulas over polynomial atoms.

Formulas are immutable trees of ``Atom`` (expr = 0 or expr != 0), ``And``,
``Or``, ``Not``, ``Forall`` and ``Exists``.  Besides prenex normalization,
quantifier counting and export, this module contains a small three-valued
decision procedure used for semantic spot checks: it eliminates
quantifiers exactly where that is easy (linear variables, non-vanishing
conditions, finitely many roots of a univariate equation) and falls back to
height-bounded enumeration elsewhere, reporting ``None`` when the bounded
search cannot settle the question.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import sympy

from . import _arith as A
from .numberfield import FieldElement, NumberField, parse_field
from .polynomial import Combine, Expr, Leaf, Mul, Polynomial, Pow, as_expr


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------

class Formula:
    def free_variables(self) -> frozenset[str]:
        raise NotImplementedError


@dataclass(frozen=True)
class Atom(Formula):
    expr: Expr
    rel: str = "eq"  # "eq" or "neq"

    def __post_init__(self):
        if self.rel not in ("eq", "neq"):
            raise ValueError("relation must be 'eq' or 'neq'")

    def free_variables(self):
        return self.expr.variables()


@dataclass(frozen=True)
class And(Formula):
    parts: tuple

    def free_variables(self):
        return frozenset().union(*(p.free_variables() for p in self.parts))


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple

    def free_variables(self):
        return frozenset().union(*(p.free_variables() for p in self.parts))


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def free_variables(self):
        return self.body.free_variables()


@dataclass(frozen=True)
class Forall(Formula):
    vars: tuple
    body: Formula

    def free_variables(self):
        return self.body.free_variables() - frozenset(self.vars)


@dataclass(frozen=True)
class Exists(Formula):
    vars: tuple
    body: Formula

    def free_variables(self):
        return self.body.free_variables() - frozenset(self.vars)


def implies(a: Formula, b: Formula) -> Formula:
    return Or((Not(a), b))


def bound_variables(f: Formula) -> list[str]:
    if isinstance(f, (Forall, Exists)):
        return list(f.vars) + bound_variables(f.body)
    if isinstance(f, (And, Or)):
        return [v for p in f.parts for v in bound_variables(p)]
    if isinstance(f, Not):
        return bound_variables(f.body)
    return []


def check_variables(f: Formula) -> None:
    """Bound variables are pairwise distinct and disjoint from free ones."""
    bound = bound_variables(f)
    if len(bound) != len(set(bound)):
        raise ValueError("bound variables are not distinct")
    if set(bound) & f.free_variables():
        raise ValueError("a variable occurs both bound and free")


# --------------------------------------------------------------------------
# prenex form and quantifier shape
# --------------------------------------------------------------------------

def _split_prefix(f: Formula) -> tuple[list[tuple[str, tuple]], Formula]:
    """Pull quantifiers out of f; returns (blocks, quantifier-free matrix)."""
    if isinstance(f, Atom):
        return [], f
    if isinstance(f, (Forall, Exists)):
        q = "forall" if isinstance(f, Forall) else "exists"
        blocks, matrix = _split_prefix(f.body)
        return _merge([(q, tuple(f.vars))] + blocks), matrix
    if isinstance(f, Not):
        blocks, matrix = _split_prefix(f.body)
        flipped = [("exists" if q == "forall" else "forall", vs) for q, vs in blocks]
        return flipped, Not(matrix)
    prefixes = []
    matrices = []
    for p in f.parts:
        b, m = _split_prefix(p)
        prefixes.append(b)
        matrices.append(m)
    blocks = _interleave(prefixes)
    return blocks, type(f)(tuple(matrices))


def _merge(blocks: list[tuple[str, tuple]]) -> list[tuple[str, tuple]]:
    out: list[tuple[str, tuple]] = []
    for q, vs in blocks:
        if not vs:
            continue
        if out and out[-1][0] == q:
            out[-1] = (q, out[-1][1] + tuple(vs))
        else:
            out.append((q, tuple(vs)))
    return out


def _interleave(prefixes: list[list[tuple[str, tuple]]]) -> list[tuple[str, tuple]]:
    """Merge independent prefixes with as few alternations as possible.

    Each prefix keeps its own order; blocks of the same type from different
    conjuncts are merged, taking conjuncts in source order.  Ties between
    the two possible leading types go to the type of the first block.
    """
    prefixes = [list(p) for p in prefixes if p]
    if not prefixes:
        return []

    def run(start: str):
        queues = [list(p) for p in prefixes]
        out: list[tuple[str, tuple]] = []
        q = start
        while any(queues):
            vs: tuple = ()
            for queue in queues:
                if queue and queue[0][0] == q:
                    vs += queue.pop(0)[1]
            if vs:
                out.append((q, vs))
            q = "exists" if q == "forall" else "forall"
        return out

    first = prefixes[0][0][0]
    other = "exists" if first == "forall" else "forall"
    a, b = run(first), run(other)
    return a if len(a) <= len(b) else b


def standardize_apart(f: Formula) -> Formula:
    """Rename bound variables so they are pairwise distinct and never free.

    Renaming is capture-avoiding and deterministic: a clashing ``v`` becomes
    the first unused ``v_1``, ``v_2``, ... in left-to-right source order.
    """
    taken = set(bound_variables(f)) | set(f.free_variables())
    used = set(f.free_variables())

    def fresh(v: str) -> str:
        if v not in used:
            return v
        k = 1
        while f"{v}_{k}" in taken or f"{v}_{k}" in used:
            k += 1
        return f"{v}_{k}"

    def walk(g: Formula, env: dict) -> Formula:
        if isinstance(g, Atom):
            sub = {v: env[v] for v in g.expr.variables() if v in env and env[v] != v}
            return Atom(g.expr.rename(sub), g.rel) if sub else g
        if isinstance(g, (Forall, Exists)):
            inner = dict(env)
            new = []
            for v in g.vars:
                w = fresh(v)
                used.add(w)
                inner[v] = w
                new.append(w)
            return type(g)(tuple(new), walk(g.body, inner))
        if isinstance(g, Not):
            return Not(walk(g.body, env))
        return type(g)(tuple(walk(p, env) for p in g.parts))

    return walk(f, {})


def prenex(f: Formula) -> Formula:
    f = standardize_apart(f)
    check_variables(f)
    blocks, matrix = _split_prefix(f)
    out = matrix
    for q, vs in reversed(blocks):
        out = Forall(vs, out) if q == "forall" else Exists(vs, out)
    return out


def quantifier_shape(f: Formula) -> list[tuple[str, int]]:
    """Alternating (type, count) list of the prenex form of f."""
    blocks, _ = _split_prefix(f)
    return [(q, len(vs)) for q, vs in blocks]


def matrix_of(f: Formula) -> Formula:
    return _split_prefix(f)[1]


def shape_string(shape: Sequence[tuple[str, int]]) -> str:
    sym = {"forall": "A", "exists": "E"}
    return " ".join(f"{sym[q]}{n}" for q, n in shape) or "qf"


# --------------------------------------------------------------------------
# export
# --------------------------------------------------------------------------

def to_sexp(f: Formula) -> str:
    if isinstance(f, Atom):
        return f"({f.rel} {f.expr.to_sexp()} 0)"
    if isinstance(f, (Forall, Exists)):
        q = "forall" if isinstance(f, Forall) else "exists"
        return f"({q} ({' '.join(f.vars)}) {to_sexp(f.body)})"
    if isinstance(f, Not):
        return f"(not {to_sexp(f.body)})"
    tag = "and" if isinstance(f, And) else "or"
    return f"({tag} " + " ".join(to_sexp(p) for p in f.parts) + ")"


def to_json(f: Formula) -> dict:
    if isinstance(f, Atom):
        return {"atom": f.rel, "expr": f.expr.to_json()}
    if isinstance(f, (Forall, Exists)):
        q = "forall" if isinstance(f, Forall) else "exists"
        return {q: list(f.vars), "body": to_json(f.body)}
    if isinstance(f, Not):
        return {"not": to_json(f.body)}
    tag = "and" if isinstance(f, And) else "or"
    return {tag: [to_json(p) for p in f.parts]}


# --------------------------------------------------------------------------
# quantifier-free evaluation
# --------------------------------------------------------------------------

def evaluate_qf(f: Formula, assignment: Mapping[str, object]) -> bool:
    """Exact truth value of a quantifier-free formula."""
    missing = f.free_variables() - set(assignment)
    if missing:
        raise ValueError(f"unassigned variables: {sorted(missing)}")
    return _eval_qf(f, assignment)


def _eval_qf(f: Formula, env) -> bool:
    if isinstance(f, Atom):
        zero = f.expr.evaluate(env) == 0
        return zero if f.rel == "eq" else not zero
    if isinstance(f, Not):
        return not _eval_qf(f.body, env)
    if isinstance(f, And):
        return all(_eval_qf(p, env) for p in f.parts)
    if isinstance(f, Or):
        return any(_eval_qf(p, env) for p in f.parts)
    raise ValueError("formula is not quantifier-free")


# --------------------------------------------------------------------------
# decision procedure (internal normal form)
# --------------------------------------------------------------------------
# Internal nodes: ("eq", poly) / ("neq", poly) literals, ("and", [..]),
# ("or", [..]), ("ex", vars, body), ("all", vars, body), ("const", bool).

TRUE = ("const", True)
FALSE = ("const", False)


class _Ctx:
    def __init__(self, field: NumberField, height: int):
        self.field = field
        self.height = height
        self.values = list(field.elements_by_height(height))
        self.real = field.real_place_count > 0

    def value(self, x):
        if self.field.degree == 1:
            if isinstance(x, FieldElement):
                return x.as_rational()
            return Fraction(x)
        return x if isinstance(x, FieldElement) else self.field.rational(x)

    def values_for(self):
        if self.field.degree == 1:
            return [v.as_rational() for v in self.values]
        return self.values


def _lit_eq(expr: Expr, ctx: _Ctx):
    """expr = 0 as a conjunction/disjunction of polynomial literals."""
    if isinstance(expr, Mul):
        return ("or", [_lit_eq(f, ctx) for f in expr.factors])
    if isinstance(expr, Pow):
        return _lit_eq(expr.base, ctx) if expr.k > 0 else FALSE
    if isinstance(expr, Combine):
        anisotropic = expr.kind in ("norm", "pair") or (expr.kind == "sos" and ctx.real)
        if anisotropic:
            return ("and", [_lit_eq(p, ctx) for p in expr.parts])
    return ("eq", expr.expand())


def _to_internal(f: Formula, ctx: _Ctx):
    if isinstance(f, Atom):
        node = _lit_eq(f.expr, ctx)
        return node if f.rel == "eq" else _neg(node)
    if isinstance(f, Not):
        return _neg(_to_internal(f.body, ctx))
    if isinstance(f, And):
        return ("and", [_to_internal(p, ctx) for p in f.parts])
    if isinstance(f, Or):
        return ("or", [_to_internal(p, ctx) for p in f.parts])
    if isinstance(f, Exists):
        return ("ex", tuple(f.vars), _to_internal(f.body, ctx))
    if isinstance(f, Forall):
        return ("all", tuple(f.vars), _to_internal(f.body, ctx))
    raise TypeError(f)


def _neg(n):
    tag = n[0]
    if tag == "eq":
        return ("neq", n[1])
    if tag == "neq":
        return ("eq", n[1])
    if tag == "const":
        return ("const", not n[1])
    if tag == "and":
        return ("or", [_neg(p) for p in n[1]])
    if tag == "or":
        return ("and", [_neg(p) for p in n[1]])
    if tag == "ex":
        return ("all", n[1], _neg(n[2]))
    if tag == "all":
        return ("ex", n[1], _neg(n[2]))
    raise ValueError(tag)


def _free(n) -> frozenset:
    tag = n[0]
    if tag in ("eq", "neq"):
        return n[1].variables()
    if tag == "const":
        return frozenset()
    if tag in ("and", "or"):
        return frozenset().union(*(_free(p) for p in n[1]))
    return _free(n[2]) - frozenset(n[1])


def _subst(n, env):
    tag = n[0]
    if tag in ("eq", "neq"):
        p = n[1]
        rel = {k: v for k, v in env.items() if k in p.variables()}
        if rel:
            p = p.substitute(rel)
        if p.is_constant():
            z = p.constant_value() == 0
            return ("const", z if tag == "eq" else not z)
        return (tag, p)
    if tag == "const":
        return n
    if tag in ("and", "or"):
        return _simplify((tag, [_subst(p, env) for p in n[1]]))
    inner = {k: v for k, v in env.items() if k not in n[1]}
    return (tag, n[1], _subst(n[2], inner))


def _simplify(n):
    tag = n[0]
    if tag not in ("and", "or"):
        return n
    absorbing = tag == "or"  # True absorbs an or, False absorbs an and
    parts = []
    for p in n[1]:
        p = _simplify(p)
        if p[0] == tag:
            parts.extend(p[1])
        elif p[0] == "const":
            if p[1] == absorbing:
                return ("const", absorbing)
        else:
            parts.append(p)
    if not parts:
        return ("const", not absorbing)
    if len(parts) == 1:
        return parts[0]
    return (tag, parts)


def _qe_exists(vs: tuple, body):
    """Exact elimination steps for an existential block."""
    body = _simplify(body)
    vs = tuple(v for v in vs if v in _free(body))
    if not vs:
        return body
    tag = body[0]
    if tag == "or":
        return _simplify(("or", [_qe_exists(vs, p) for p in body[1]]))
    parts = body[1] if tag == "and" else [body]
    outside = [p for p in parts if not (_free(p) & set(vs))]
    inside = [p for p in parts if _free(p) & set(vs)]
    # connected components of the inside literals through quantified vars
    comps: list[tuple[set, list]] = []
    for p in inside:
        pv = set(_free(p)) & set(vs)
        merged = [c for c in comps if c[0] & pv]
        for c in merged:
            comps.remove(c)
            pv |= c[0]
        comps.append((pv, [q for c in merged for q in c[1]] + [p]))
    results = list(outside)
    for cvars, cparts in comps:
        results.append(_qe_component(tuple(v for v in vs if v in cvars), cparts))
    return _simplify(("and", results))


def _qe(n):
    """Apply the exact elimination steps bottom-up."""
    tag = n[0]
    if tag in ("and", "or"):
        return _simplify((tag, [_qe(p) for p in n[1]]))
    if tag == "ex":
        return _qe_exists(n[1], _qe(n[2]))
    if tag == "all":
        return _neg(_qe_exists(n[1], _neg(_qe(n[2]))))
    return n


def _qe_component(vs: tuple, parts: list):
    changed = True
    while changed and vs:
        changed = False
        for v in vs:
            holders = [i for i, p in enumerate(parts) if v in _free(p)]
            if len(holders) != 1:
                continue
            p = parts[holders[0]]
            repl = _eliminate_single(v, p)
            if repl is None:
                continue
            parts = parts[: holders[0]] + [repl] + parts[holders[0] + 1 :]
            vs = tuple(w for w in vs if w != v)
            changed = True
            break
    body = _simplify(("and", parts))
    if not vs:
        return body
    if body[0] in ("or",):
        return _qe_exists(vs, body)
    vs = tuple(v for v in vs if v in _free(body))
    if not vs:
        return body
    return ("ex", vs, body)


def _eliminate_single(v: str, lit):
    """Quantifier-free equivalent of (exists v) lit, or None."""
    tag = lit[0]
    if tag == "eq":
        coeffs = lit[1].coefficients_in(v)
        if len(coeffs) == 2:
            c, d = coeffs[1], coeffs[0]
            return _simplify(("or", [_lit_neq(c), _lit_eq_poly(d)]))
        return None
    if tag == "neq":
        coeffs = lit[1].coefficients_in(v)
        return _simplify(("or", [_lit_neq(c) for c in coeffs]))
    if tag in ("ex", "all", "and", "or"):
        inner = _qe_exists((v,), lit) if tag in ("and", "or") else None
        if inner is not None and v not in _free(inner):
            return inner
    return None


def _lit_neq(p: Polynomial):
    if p.is_constant():
        return ("const", p.constant_value() != 0)
    return ("neq", p)


def _lit_eq_poly(p: Polynomial):
    if p.is_constant():
        return ("const", p.constant_value() == 0)
    return ("eq", p)


def _roots(p: Polynomial, v: str, ctx: _Ctx) -> Optional[list]:
    """All roots in K of a univariate polynomial, or None if unsupported."""
    coeffs = [c.constant_value() for c in p.coefficients_in(v)]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) <= 1:
        return None
    K = ctx.field
    if K.degree == 1:
        x = sympy.Symbol("x")
        poly = sympy.Poly([sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) for c in reversed(coeffs)], x, domain="QQ")
        out = []
        for fac, _ in poly.factor_list()[1]:
            if fac.degree() == 1:
                a1, a0 = fac.all_coeffs()
                r = -sympy.Rational(a0) / sympy.Rational(a1)
                out.append(Fraction(int(r.p), int(r.q)))
        return sorted(set(out))
    cs = [ctx.value(c) for c in coeffs]
    if len(cs) == 2:
        return [-cs[0] / cs[1]]
    if len(cs) == 3:
        c0, c1, c2 = cs
        disc = c1 * c1 - 4 * c2 * c0
        root = K.global_root(disc, 2) if not disc.is_zero() else K.zero
        if root is None:
            return []
        return list({(-c1 + root) / (2 * c2), (-c1 - root) / (2 * c2)})
    return None


def _decide(n, env, ctx: _Ctx, witness: Optional[dict] = None) -> Optional[bool]:
    n = _subst(n, env)
    tag = n[0]
    if tag == "const":
        return n[1]
    if tag in ("eq", "neq"):
        raise ValueError(f"unassigned variables {sorted(n[1].variables())}")
    if tag == "and":
        result: Optional[bool] = True
        for p in n[1]:
            r = _decide(p, {}, ctx, witness)
            if r is False:
                return False
            if r is None:
                result = None
        return result
    if tag == "or":
        result = False
        for p in n[1]:
            r = _decide(p, {}, ctx, witness)
            if r is True:
                return True
            if r is None:
                result = None
        return result
    if tag == "all":
        r = _decide(("ex", n[1], _neg(n[2])), {}, ctx)
        return None if r is None else not r
    # existential block; witness searches keep every variable explicit
    if witness is not None:
        return _search(n[1], n[2], ctx, witness)
    reduced = _qe(n)
    if reduced[0] == "all":
        reduced = ("ex", reduced[1], _neg(reduced[2]))
        r = _decide(reduced, {}, ctx)
        return None if r is None else not r
    if reduced[0] != "ex":
        return _decide(reduced, {}, ctx)
    return _search(reduced[1], reduced[2], ctx, None)


def _literals(body) -> list:
    if body[0] == "and":
        return body[1]
    return [body]


def _search(vs: tuple, body, ctx: _Ctx, witness: Optional[dict]) -> Optional[bool]:
    vs = tuple(v for v in vs if v in _free(body))
    if not vs:
        return _decide(body, {}, ctx, witness)
    lits = _literals(body)
    # an equation univariate in one quantified variable pins it to finitely many roots
    for lit in lits:
        if lit[0] == "eq":
            fv = lit[1].variables()
            if len(fv) == 1:
                v = next(iter(fv))
                if v in vs:
                    roots = _roots(lit[1], v, ctx)
                    if roots is not None:
                        return _branch(v, roots, vs, body, ctx, witness, exact=True)
    # otherwise enumerate the first variable of the smallest equation
    eqs = [lit for lit in lits if lit[0] == "eq" and lit[1].variables() & set(vs)]
    if eqs:
        lit = min(eqs, key=lambda l: (len(l[1].variables()), sorted(l[1].variables())))
        v = sorted(lit[1].variables() & set(vs))[0]
    else:
        v = vs[0]
    return _branch(v, ctx.values_for(), vs, body, ctx, witness, exact=False)


def _branch(v, values, vs, body, ctx, witness, exact: bool) -> Optional[bool]:
    rest = tuple(w for w in vs if w != v)
    result: Optional[bool] = False if exact else None
    for val in values:
        sub = _subst(body, {v: val})
        local = {} if witness is not None else None
        r = _decide(("ex", rest, sub) if rest else sub, {}, ctx, local)
        if r is True:
            if witness is not None:
                witness[v] = val
                witness.update(local or {})
            return True
        if r is None:
            result = None
    return result


def decide(f: Formula, assignment: Mapping[str, object] | None = None, height: int = 2,
           field: NumberField | None = None) -> Optional[bool]:
    """Three-valued truth of f: True, False, or None when the bounded search is inconclusive."""
    K = field or parse_field("Q")
    ctx = _Ctx(K, height)
    env = {k: ctx.value(v) for k, v in (assignment or {}).items()}
    missing = f.free_variables() - set(env)
    if missing:
        raise ValueError(f"unassigned variables: {sorted(missing)}")
    return _decide(_to_internal(f, ctx), env, ctx)


def bounded_search(f: Formula, assignment: Mapping[str, object] | None = None, height: int = 2,
                   field: NumberField | None = None) -> Optional[dict]:
    """Witness for an existential formula with coordinates of height <= height, or None."""
    if not isinstance(f, Exists):
        raise ValueError("bounded_search expects an existential block")
    K = field or parse_field("Q")
    ctx = _Ctx(K, height)
    env = {k: ctx.value(v) for k, v in (assignment or {}).items()}
    missing = f.free_variables() - set(env)
    if missing:
        raise ValueError(f"unassigned variables: {sorted(missing)}")
    body = _subst(_to_internal(f.body, ctx), env)
    witness: dict = {}
    r = _search(tuple(f.vars), body, ctx, witness)
    if r is not True:
        return None
    for v in f.vars:
        witness.setdefault(v, ctx.value(0))
    # exact re-verification of the witness
    full = dict(env)
    full.update(witness)
    if not evaluate_qf(f.body, full):
        raise AssertionError("bounded search produced an invalid witness")
    return {v: witness[v] for v in f.vars}

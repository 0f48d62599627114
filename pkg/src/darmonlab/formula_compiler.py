"""Defining formulas for the definable sets and their complexity budgets.

Every set is built compositionally as a ``Definition``: a quantifier prefix,
the conjuncts (``parts``) and the single polynomial obtained by combining
them.  A definition used inside another one enters as its combined
polynomial, exactly like a black box; the gcd condition is the one macro
whose conjuncts are spliced into the surrounding conjunction.

Two combination modes are supported.  ``general`` uses the norm form of a
certified irreducible x^n - m (degree n*d for n parts of degree <= d);
``real`` uses a sum of squares (degree 2*d).  Quantifier counts and degrees
in the budgets are read off the assembled trees, never typed in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import sympy

from .formula import And, Atom, Exists, Forall, Formula, Or, quantifier_shape
from .numberfield import NumberField, parse_field
from .polynomial import (
    MODES,
    Add,
    Combine,
    Expr,
    Leaf,
    Mul,
    Opaque,
    Polynomial,
    Pow,
    as_expr,
    const,
    pairing_degree,
    var,
)

# budgets imported from prior work: (quantifiers, degree general, degree real)
IMPORTED = {
    "T": (7, 8, 8),
    "J": (138, 384, 64),
    "J4": (277, 768, 128),
}

# free-variable conventions
PARAMS = ("a", "b", "c", "d")
PRIMED = ("ap", "bp")
SUBJECT = "r"


# --------------------------------------------------------------------------
# single-polynomial combination
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def norm_form(n: int, m: int) -> Polynomial:
    """Norm form N(Y1..Yn) of Q(m^(1/n)) w.r.t. the power basis: det(sum Y_i C^(i-1))."""
    C = sympy.zeros(n, n)
    for i in range(n - 1):
        C[i + 1, i] = 1
    C[0, n - 1] = m
    Y = sympy.symbols(f"Y1:{n + 1}")
    M = sympy.zeros(n, n)
    P = sympy.eye(n)
    for i in range(n):
        M += Y[i] * P
        P = P * C
    det = sympy.Poly(M.det(method="berkowitz"), *Y)
    terms = {}
    for exps, coeff in det.terms():
        mono = tuple((f"Y{i + 1}", e) for i, e in enumerate(exps) if e)
        terms[mono] = int(coeff)
    return Polynomial(terms)


def _prime_divisors(n: int) -> list[int]:
    return [int(p) for p in sympy.primefactors(n)]


def certify_generator(n: int, m: int, K: NumberField) -> Optional[dict]:
    """Capelli certificate that x^n - m is irreducible over K, or None."""
    M = K.rational(m)
    checks = []
    for p in _prime_divisors(n):
        if K.is_global_power(M, p):
            return None
        checks.append(f"{m} is not a {p}-th power")
    if n % 4 == 0:
        if K.is_global_power(K.rational(-m) / 4, 4):
            return None
        checks.append(f"{m} is not in -4K^4")
    return {"n": n, "m": m, "checks": checks}


def find_generator(n: int, K: NumberField, max_m: int = 100) -> Optional[tuple[int, dict]]:
    for m in range(2, max_m + 1):
        cert = certify_generator(n, m, K)
        if cert is not None:
            return m, cert
    return None


def _pair_nested(parts: list[Expr], n_K: int) -> Expr:
    level = list(parts)
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            nxt.append(Combine((level[i], level[i + 1]), ("pair", n_K)))
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def combine_expr(parts: Sequence, mode: str = "general", field: NumberField | None = None,
                 max_m: int = 100) -> Expr:
    """Structural single polynomial whose zeros are the common zeros of parts."""
    parts = [as_expr(p) for p in parts]
    if not parts:
        raise ValueError("combine_conjunction needs at least one polynomial")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if len(parts) == 1:
        return parts[0]
    K = field or parse_field("Q")
    if mode == "real":
        if K.real_place_count == 0:
            raise ValueError("sum-of-squares combination needs a field with a real embedding")
        return Combine(tuple(parts), ("sos",))
    found = find_generator(len(parts), K, max_m)
    if found is None:
        return _pair_nested(parts, K.find_nonsquare_integer())
    m, _cert = found
    return Combine(tuple(parts), ("norm", m, norm_form(len(parts), m)))


def combine_conjunction(polys: Sequence, mode: str = "general", field: NumberField | None = None,
                        max_m: int = 100) -> Polynomial:
    """Expanded single polynomial for a conjunction of polynomial equations."""
    return combine_expr(polys, mode, field, max_m).expand()


def combination_bound(parts: Sequence, mode: str, field: NumberField | None = None, max_m: int = 100) -> int:
    """Degree claimed for the construction combine_expr actually uses."""
    exprs = [as_expr(p) for p in parts]
    d = max(e.degree(mode) for e in exprs)
    if len(exprs) == 1:
        return d
    if mode == "real":
        return 2 * d
    if find_generator(len(exprs), field or parse_field("Q"), max_m) is None:
        return pairing_degree(d, len(exprs))
    return len(exprs) * d


# --------------------------------------------------------------------------
# definitions
# --------------------------------------------------------------------------

@dataclass
class Definition:
    name: str
    blocks: list  # prenex prefix: [(quantifier, vars)]
    expr: Expr
    rel: str = "eq"
    parts: tuple = ()
    mode: str = "general"

    def formula(self) -> Formula:
        out: Formula = Atom(self.expr, self.rel)
        for q, vs in reversed(self.blocks):
            out = Forall(tuple(vs), out) if q == "forall" else Exists(tuple(vs), out)
        return out

    def count(self, q: str) -> int:
        return sum(len(vs) for qq, vs in self.blocks if qq == q)

    @property
    def exists_vars(self) -> tuple:
        assert self.is_existential()
        return tuple(self.blocks[0][1]) if self.blocks else ()

    def is_existential(self) -> bool:
        return all(q == "exists" for q, _ in self.blocks) and self.rel == "eq"

    def degree(self) -> int:
        return self.expr.degree(self.mode)

    def shape(self) -> list[tuple[str, int]]:
        return [(q, len(vs)) for q, vs in self.blocks if vs]


class Builder:
    """Deterministic fresh names plus the combination mode and field."""

    def __init__(self, mode: str = "general", field: NumberField | None = None, own_j: bool = False):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.mode = mode
        self.field = field or parse_field("Q")
        self.own_j = own_j
        self.counters: dict[str, int] = {}

    def fresh(self, hint: str) -> str:
        k = self.counters.get(hint, 0) + 1
        self.counters[hint] = k
        return f"{hint}{k}"

    def fresh_many(self, hint: str, k: int) -> tuple:
        return tuple(self.fresh(hint) for _ in range(k))

    def combine(self, parts: Sequence[Expr]) -> Expr:
        return combine_expr(parts, self.mode, self.field)

    def exists(self, name: str, own_vars: Sequence[str], items: Sequence) -> Definition:
        """Existential definition from polynomial conjuncts and existential definitions."""
        vars_ = list(own_vars)
        parts: list[Expr] = []
        for it in items:
            if isinstance(it, Definition):
                if not it.is_existential():
                    raise ValueError(f"{it.name} is not existential")
                vars_.extend(it.exists_vars)
                parts.append(it.expr)
            elif isinstance(it, _Macro):
                vars_.extend(it.vars)
                parts.extend(it.parts)
            else:
                parts.append(as_expr(it))
        return Definition(name, [("exists", tuple(vars_))], self.combine(parts), "eq", tuple(parts), self.mode)


@dataclass
class _Macro:
    """Conjuncts spliced into the enclosing conjunction."""
    vars: tuple
    parts: tuple


def _v(x) -> Expr:
    return var(x) if isinstance(x, str) else as_expr(x)


def _prod(*xs) -> Expr:
    p = Polynomial.const(1)
    for x in xs:
        p = p * _v(x).expand()
    return Leaf(p)


# -- the sets ---------------------------------------------------------------

def build_S(B: Builder, a, b, r) -> Definition:
    a, b, r = _v(a), _v(b), _v(r)
    x = B.fresh_many("x", 4)
    X = [var(v) for v in x]
    q = X[0] ** 2 - a * X[1] ** 2 - b * X[2] ** 2 + a * b * X[3] ** 2 - 1
    return B.exists("S", x, [_flatten(q), _flatten(r - 2 * X[0])])


def build_T(B: Builder, a, b, r) -> Definition:
    """S + S with the second trace variable eliminated: 7 variables."""
    a, b, r = _v(a), _v(b), _v(r)
    x = B.fresh_many("x", 4)
    y = B.fresh_many("y", 3)
    X = [var(v) for v in x]
    Y = [var(v) for v in y]
    q1 = X[0] ** 2 - a * X[1] ** 2 - b * X[2] ** 2 + a * b * X[3] ** 2 - 1
    q2 = (r - 2 * X[0]) ** 2 - 4 * a * Y[0] ** 2 - 4 * b * Y[1] ** 2 + 4 * a * b * Y[2] ** 2 - 4
    return B.exists("T", x + y, [_flatten(q1), _flatten(q2)])


def _flatten(e: Expr) -> Expr:
    return Leaf(e.expand()) if e.is_expandable() else e


def build_Tx(B: Builder, a, b, r) -> Definition:
    v = B.fresh("v")
    return B.exists("T×", (v,), [build_T(B, a, b, r), build_T(B, a, b, v), _flatten(_v(r) * var(v) - 1)])


def build_cK2Tx(B: Builder, a, b, c, r) -> Definition:
    w, u = B.fresh("w"), B.fresh("u")
    lin = _v(r) - _v(c) * var(w) ** 2 * var(u)
    return B.exists("cK²T×", (w, u), [_flatten(lin), build_Tx(B, a, b, u)])


def build_Ic(B: Builder, a, b, c, r) -> Definition:
    return B.exists("I^c", (), [build_cK2Tx(B, a, b, c, r), build_cK2Tx(B, a, b, 1, _flatten(1 - _v(r)))])


def build_Isum(B: Builder, a, b, c, r) -> Definition:
    x = B.fresh("s")
    return B.exists("I^c+I^c", (x,), [build_Ic(B, a, b, c, x), build_Ic(B, a, b, c, _flatten(_v(r) - var(x)))])


def build_J_own(B: Builder, a, b, r) -> Definition:
    return B.exists("J", (), [build_Isum(B, a, b, a, r), build_Isum(B, a, b, b, r)])


def build_J_imported(B: Builder, a, b, r) -> Definition:
    q, dg, dr = IMPORTED["J"]
    bound = B.fresh_many("j", q)
    expr = Opaque("J", (("a", _v(a)), ("b", _v(b)), ("r", _v(r))), bound, dg, dr)
    return Definition("J", [("exists", bound)], expr, "eq", (expr,), B.mode)


def build_J(B: Builder, a, b, r) -> Definition:
    return build_J_own(B, a, b, r) if B.own_j else build_J_imported(B, a, b, r)


def build_J4(B: Builder, a, b, c, d, r) -> Definition:
    x = B.fresh("s")
    return B.exists("J4", (x,), [build_J(B, a, b, x), build_J(B, c, d, _flatten(_v(r) - var(x)))])


def build_J42(B: Builder, a, b, c, d, r) -> Definition:
    y, z = B.fresh("m"), B.fresh("m")
    return B.exists("J42", (y, z), [
        _flatten(_v(r) - var(y) * var(z)),
        build_J4(B, a, b, c, d, y),
        build_J4(B, a, b, c, d, z),
    ])


def build_inv(B: Builder, a, b, c, d, r) -> Definition:
    y = B.fresh("m")
    return B.exists("(J42∖0)^-1", (y,), [_flatten(_v(r) * var(y) - 1), build_J42(B, a, b, c, d, y)])


def build_union(B: Builder, a, b, c, d, r) -> Definition:
    """J42 ∪ (J42∖0)^-1: product of the two defining polynomials."""
    first = build_J42(B, a, b, c, d, r)
    second = build_inv(B, a, b, c, d, r)
    return Definition("J42 ∪ (J42∖0)^-1", [("exists", first.exists_vars + second.exists_vars)],
                      Mul((first.expr, second.expr)), "eq", (first.expr, second.expr), B.mode)


def build_ND(B: Builder, delta_params, omega_params) -> Definition:
    """abcda'b' != 0 and Δ^{p,q} ∩ Ω_{p',q',c,d} = ∅ (unit decomposition of 1)."""
    p, q = delta_params
    p2, q2, c, d = omega_params
    x, y, z = B.fresh("e"), B.fresh("e"), B.fresh("e")
    unit = _flatten(_prod(p, q, p2, q2, c, d, z) - 1)
    return B.exists("ND", (x, y, z), [
        unit,
        build_J(B, p, q, x),
        build_J(B, p2, q2, y),
        build_J(B, c, d, _flatten(1 - var(x) - var(y))),
    ])


def build_zero_or_ND(B: Builder, delta_params, omega_params) -> Definition:
    nd = build_ND(B, delta_params, omega_params)
    p, q = delta_params
    expr = Mul((_prod(p, q, *omega_params), nd.expr))
    return Definition("abcda'b'=0 ∨ ND", nd.blocks, expr, "eq", (expr,), B.mode)


def build_Ksf(B: Builder, a, b, r) -> Definition:
    """∀a'∀b'∀c∀d [r ∉ J42 ∪ (J42∖0)^-1 ∨ abcda'b' = 0 ∨ ND]; a ∀∃ definition."""
    outer = B.fresh_many("k", 4)
    p2, q2, c, d = outer
    union = build_union(B, p2, q2, c, d, r)
    znd = build_zero_or_ND(B, (a, b), (p2, q2, c, d))
    pre = Or((Forall(union.exists_vars, Atom(union.expr, "neq")), Exists(znd.exists_vars, Atom(znd.expr, "eq"))))
    post = rewrite_universal_or_exists(pre, new_var=B.fresh("k"))
    assert isinstance(post, Forall) and isinstance(post.body, Exists)
    return Definition("K^sf", [("forall", tuple(outer) + post.vars), ("exists", post.body.vars)],
                      post.body.body.expr, "eq", (post.body.body.expr,), B.mode)


def _sum_of_four_squares_minus(B: Builder, c) -> tuple[tuple, Expr]:
    x = B.fresh_many("q", 4)
    X = [var(v) for v in x]
    return x, _flatten(X[0] ** 2 + X[1] ** 2 + X[2] ** 2 + X[3] ** 2 - _v(c) + 5)


def build_arcplaces(B: Builder, a, b) -> Definition:
    y, c = B.fresh("g"), B.fresh("g")
    xs, sq = _sum_of_four_squares_minus(B, c)
    return B.exists("arcplaces", (y, c) + xs, [_flatten(_prod(a, b, y) - 1), build_T(B, a, b, c), sq])


def build_sim(B: Builder, a, b, c, d, ap, bp) -> Definition:
    nd = build_ND(B, (ap, bp), (a, b, c, d))
    cc = B.fresh("g")
    xs, sq = _sum_of_four_squares_minus(B, cc)
    return B.exists("sim", (cc,) + xs, [nd, build_T(B, ap, bp, cc), sq])


def build_gcd(B: Builder, a, b, y, z) -> _Macro:
    s, t = B.fresh("h"), B.fresh("h")
    Ts, Tt = build_T(B, a, b, s), build_T(B, a, b, t)
    bez = _flatten(var(s) * _v(y) + var(t) * _v(z) - 1)
    return _Macro((s, t) + Ts.exists_vars + Tt.exists_vars, (Ts.expr, Tt.expr, bez))


def build_phi(B: Builder, n: int, a, b, x, name: str = "φ") -> Definition:
    if not isinstance(n, int) or n < 1:
        raise ValueError("the weight n must be a positive integer")
    y, z = B.fresh("w"), B.fresh("w")
    Tz, Ty = build_T(B, a, b, z), build_T(B, a, b, y)
    g = build_gcd(B, a, b, y, z)
    rel = Leaf(Polynomial.var(y) - Polynomial.var(z) ** n * _v(x).expand())
    return B.exists(name, (y, z), [Tz, Ty, g, rel])


# --------------------------------------------------------------------------
# rewrite identities
# --------------------------------------------------------------------------

def _all_names(f: Formula) -> set:
    from .formula import bound_variables
    return set(bound_variables(f)) | set(f.free_variables())


def _fresh_for(f: Formula, hint: str) -> str:
    names = _all_names(f)
    if hint not in names:
        return hint
    k = 1
    while f"{hint}{k}" in names:
        k += 1
    return f"{hint}{k}"


def _unwrap(f: Formula, cls, rel: str) -> tuple[tuple, Expr]:
    vs: tuple = ()
    while isinstance(f, cls):
        vs += tuple(f.vars)
        f = f.body
    if not (isinstance(f, Atom) and f.rel == rel):
        raise ValueError("pattern mismatch")
    return vs, f.expr


def rewrite_universal_or_exists(F: Formula, new_var: str | None = None) -> Formula:
    """∀x̄ (P ≠ 0) ∨ ∃z̄ (Q = 0)  ~>  ∀x̄ ∃y ∃z̄ ((yP − 1)Q = 0)."""
    if not (isinstance(F, Or) and len(F.parts) == 2):
        raise ValueError("pattern mismatch: expected a disjunction of two formulas")
    xs, P = _unwrap(F.parts[0], Forall, "neq")
    zs, Q = _unwrap(F.parts[1], Exists, "eq")
    if set(xs) & set(zs):
        raise ValueError("pattern mismatch: quantified blocks share variables")
    if Q.variables() & set(xs) or P.variables() & set(zs):
        raise ValueError("pattern mismatch: the two sides must not share bound variables")
    y = new_var or _fresh_for(F, "y")
    atom = Mul((Add((Mul((var(y), P)), const(-1))), Q))
    body: Formula = Exists((y,) + zs, Atom(atom, "eq"))
    return Forall(xs, body) if xs else body


def rewrite_existsforall_or_exists(F: Formula, n_K: int, field: NumberField | None = None,
                                   new_var: str | None = None) -> Formula:
    """∃x̄∀ȳ (p ≠ 0) ∨ ∃z̄ (q = 0)  ~>  ∃x̄∃z̄∀ȳ∀u (p² − n_K (uq − 1)² ≠ 0)."""
    K = field or parse_field("Q")
    if K.is_global_square(K.rational(n_K)):
        raise ValueError(f"n_K = {n_K} is a square in K")
    if not (isinstance(F, Or) and len(F.parts) == 2):
        raise ValueError("pattern mismatch: expected a disjunction of two formulas")
    left = F.parts[0]
    xs: tuple = ()
    while isinstance(left, Exists):
        xs += tuple(left.vars)
        left = left.body
    ys, p = _unwrap(left, Forall, "neq")
    zs, q = _unwrap(F.parts[1], Exists, "eq")
    if q.variables() & (set(xs) | set(ys)) or p.variables() & set(zs):
        raise ValueError("pattern mismatch: the two sides must not share bound variables")
    u = new_var or _fresh_for(F, "u")
    atom = Combine((p, Add((Mul((var(u), q)), const(-1)))), ("pair", n_K))
    body: Formula = Forall(ys + (u,), Atom(atom, "neq"))
    return Exists(xs + zs, body) if xs + zs else body


# --------------------------------------------------------------------------
# public template access
# --------------------------------------------------------------------------

TEMPLATE_NAMES = ("S", "T", "T×", "I^c", "J", "J4", "J42", "Ksf", "arcplaces", "sim", "gcd", "φ", "ψ")
_ALIASES = {"Tx": "T×", "Ic": "I^c", "phi": "φ", "psi": "ψ"}


def definition(name: str, mode: str = "general", n: int | None = None, field: NumberField | None = None,
               imported_j: bool = True) -> Definition:
    """The named set as a Definition with the standard free variables.

    Free variables: parameters a, b, c, d (and ap, bp for a', b'), subject r;
    gcd has free y, z.  J enters as the imported black box unless
    imported_j is False, in which case our own reconstruction is used.
    """
    name = _ALIASES.get(name, name)
    B = Builder(mode, field, own_j=not imported_j)
    a, b, c, d = PARAMS
    r = SUBJECT
    if name == "S":
        return build_S(B, a, b, r)
    if name == "T":
        return build_T(B, a, b, r)
    if name == "T×":
        return build_Tx(B, a, b, r)
    if name == "I^c":
        return build_Ic(B, a, b, c, r)
    if name == "J":
        return build_J(B, a, b, r)
    if name == "J4":
        return build_J4(B, a, b, c, d, r)
    if name == "J42":
        return build_J42(B, a, b, c, d, r)
    if name == "Ksf":
        return build_Ksf(B, a, b, r)
    if name == "arcplaces":
        return build_arcplaces(B, a, b)
    if name == "sim":
        return build_sim(B, a, b, c, d, *PRIMED)
    if name == "gcd":
        g = build_gcd(B, a, b, "y", "z")
        return Definition("gcd", [("exists", g.vars)], B.combine(g.parts), "eq", g.parts, mode)
    if name in ("φ", "ψ"):
        if n is None:
            raise ValueError(f"template {name} needs the weight n")
        if name == "φ":
            return build_phi(B, n, *PRIMED, r, name="φ")
        return build_phi(B, n, a, b, r, name="ψ")
    raise ValueError(f"unknown template {name!r}; known: {', '.join(TEMPLATE_NAMES)}")


def template(name: str, mode: str = "general", n: int | None = None, field: NumberField | None = None,
             imported_j: bool = True) -> Formula:
    return definition(name, mode, n, field, imported_j).formula()


# --------------------------------------------------------------------------
# assemblies and budgets
# --------------------------------------------------------------------------

@dataclass
class Budget:
    name: str
    n: int
    quantifier_shape: list
    degree_bound: int
    real_subfield_variant: dict
    claimed_shape: list
    claimed_degree: int
    claimed_real_degree: int
    degree_expression: str
    real_degree_expression: str
    construction: dict = field(default_factory=dict)

    def matches(self) -> bool:
        return (
            self.quantifier_shape == self.claimed_shape
            and self.real_subfield_variant["quantifier_shape"] == self.claimed_shape
            and self.degree_bound == self.claimed_degree
            and self.real_subfield_variant["degree_bound"] == self.claimed_real_degree
        )

    def to_json(self) -> dict:
        def shape(s):
            return [[q, k] for q, k in s]

        return {
            "name": self.name,
            "n": self.n,
            "quantifier_shape": {"computed": shape(self.quantifier_shape), "claimed": shape(self.claimed_shape)},
            "degree_bound": {
                "computed": self.degree_bound,
                "claimed": self.claimed_degree,
                "expression": self.degree_expression,
            },
            "real_subfield_variant": {
                "quantifier_shape": {
                    "computed": shape(self.real_subfield_variant["quantifier_shape"]),
                    "claimed": shape(self.claimed_shape),
                },
                "degree_bound": {
                    "computed": self.real_subfield_variant["degree_bound"],
                    "claimed": self.claimed_real_degree,
                    "expression": self.real_degree_expression,
                },
            },
            "construction": self.construction,
            "match": self.matches(),
        }


def _conjoin(B: Builder, defs: Sequence[Definition]) -> Definition:
    """Conjunction of ∃ and ∀∃ definitions as one ∀∃ definition (independent prefixes)."""
    foralls: tuple = ()
    exists: tuple = ()
    for d in defs:
        for q, vs in d.blocks:
            if q == "forall":
                if exists and d.blocks[0][0] != "forall":
                    raise ValueError("unexpected prefix")
                foralls += tuple(vs)
            else:
                exists += tuple(vs)
    parts = tuple(d.expr for d in defs)
    blocks = [("forall", foralls), ("exists", exists)] if foralls else [("exists", exists)]
    return Definition("W", blocks, B.combine(parts), "eq", parts, B.mode)


def _main_formula(n: int, mode: str, field: NumberField | None, own_j: bool = False) -> tuple[Formula, dict]:
    B = Builder(mode, field, own_j)
    K = B.field
    a, b, c, d = PARAMS
    ap, bp = PRIMED
    P = build_sim(B, a, b, c, d, ap, bp)
    Q = build_Ksf(B, ap, bp, ap)
    Z = build_Ksf(B, ap, bp, bp)
    R = build_phi(B, n, ap, bp, SUBJECT)
    W = _conjoin(B, [P, Q, Z])
    # [∀ȳ∀s̄ ∃x̄∃z̄∃t̄ W = 0] ⇒ ∃w̄ R = 0, i.e. ∃ȳ∃s̄ ∀x̄∀z̄∀t̄ (W ≠ 0) ∨ ∃w̄ (R = 0)
    pre = Or((
        Exists(W.blocks[0][1], Forall(W.blocks[1][1], Atom(W.expr, "neq"))),
        Exists(R.exists_vars, Atom(R.expr, "eq")),
    ))
    n_K = K.find_nonsquare_integer()
    post = rewrite_existsforall_or_exists(pre, n_K, K, new_var=B.fresh("u"))
    formula = Forall((ap, bp), post)
    info = {
        "n_K": n_K,
        "degrees": {
            "sim": P.degree(), "Ksf": Q.degree(), "phi": R.degree(), "W": W.degree(),
        },
        "counts": {
            "sim": P.count("exists"), "Ksf_forall": Q.count("forall"), "Ksf_exists": Q.count("exists"),
            "phi": R.count("exists"),
        },
    }
    return formula, info


def _empty_formula(n: int, mode: str, field: NumberField | None) -> tuple[Formula, dict]:
    B = Builder(mode, field)
    a, b = PARAMS[:2]
    P = build_arcplaces(B, a, b)
    R = build_phi(B, n, a, b, SUBJECT, name="ψ")
    pre = Or((Forall(P.exists_vars, Atom(P.expr, "neq")), Exists(R.exists_vars, Atom(R.expr, "eq"))))
    post = rewrite_universal_or_exists(pre, new_var=B.fresh("z"))
    assert isinstance(post, Forall)
    formula = Forall((a, b) + post.vars, post.body)
    info = {"degrees": {"arcplaces": P.degree(), "psi": R.degree()},
            "counts": {"arcplaces": P.count("exists"), "psi": R.count("exists")}}
    return formula, info


def formula_degree(f: Formula, mode: str) -> int:
    from .formula import matrix_of
    m = matrix_of(f)
    if not isinstance(m, Atom):
        raise ValueError("matrix is not a single atom")
    return m.expr.degree(mode)


def claimed_main(n: int) -> tuple[list, int, int]:
    return [("forall", 2), ("exists", 2266), ("forall", 1266)], max(50730, 12 * n + 14), max(3612, 4 * n + 6)


def claimed_empty(n: int) -> tuple[list, int, int]:
    return [("forall", 15), ("exists", 33)], max(6 * n + 31, 73), max(2 * n + 19, 33)


def claimed_second_goal(n: int) -> tuple[list, int, int]:
    """Budget stated in the introduction for the S = archimedean case."""
    return [("forall", 22), ("exists", 33)], max(6 * n + 55, 97), max(2 * n + 35, 49)


def _budget(name, n, builder, claimed, field, exprs) -> tuple[Formula, Budget]:
    fg, info_g = builder(n, "general", field)
    fr, info_r = builder(n, "real", None)
    shape, deg, rdeg = claimed(n)
    budget = Budget(
        name=name,
        n=n,
        quantifier_shape=quantifier_shape(fg),
        degree_bound=formula_degree(fg, "general"),
        real_subfield_variant={"quantifier_shape": quantifier_shape(fr), "degree_bound": formula_degree(fr, "real")},
        claimed_shape=shape,
        claimed_degree=deg,
        claimed_real_degree=rdeg,
        degree_expression=exprs[0],
        real_degree_expression=exprs[1],
        construction={"general": info_g, "real": info_r},
    )
    return fg, budget


def assemble_main(n: int, field: NumberField | None = None) -> tuple[Formula, Budget]:
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    return _budget("main", n, _main_formula, claimed_main, field, ("max{50730, 12n+14}", "max{3612, 4n+6}"))


def assemble_empty(n: int, field: NumberField | None = None) -> tuple[Formula, Budget]:
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    return _budget("empty", n, _empty_formula, claimed_empty, field, ("max{6n+31, 73}", "max{2n+19, 33}"))


# --------------------------------------------------------------------------
# ledger
# --------------------------------------------------------------------------

@dataclass
class LedgerRow:
    id: str
    identity: str
    terms: tuple
    computed: int | None
    claimed: int
    status: str = ""
    imported: bool = False
    note: str = ""

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "identity": self.identity,
            "arithmetic": sum(self.terms) if self.terms else None,
            "computed": self.computed,
            "claimed": self.claimed,
            "status": self.status,
            "imported": self.imported,
            "note": self.note,
        }


def _row(id_, identity, terms, computed, claimed, imported=False, note="") -> LedgerRow:
    arithmetic = sum(terms) if terms else claimed
    ok = arithmetic == claimed and (computed is None or computed == claimed)
    return LedgerRow(id_, identity, tuple(terms), computed, claimed, "pass" if ok else "mismatch", imported, note)


def _flagged(id_, identity, computed, claimed, note) -> LedgerRow:
    return LedgerRow(id_, identity, (), computed, claimed, "flagged", False, note)


def budget_ledger(field: NumberField | None = None, ns: Sequence[int] = (1, 2, 10, 100)) -> list[LedgerRow]:
    """Every complexity chain recomputed from the assembled trees."""
    rows: list[LedgerRow] = []
    defs = {}
    for mode in MODES:
        B = Builder(mode, field)
        a, b, c, d = PARAMS
        ap, bp = PRIMED
        defs[mode] = {
            "T": build_T(B, a, b, SUBJECT),
            "J": build_J_imported(B, a, b, SUBJECT),
            "J4": build_J4(B, a, b, c, d, SUBJECT),
            "ND": build_ND(B, (a, b), (ap, bp, c, d)),
            "ZND": build_zero_or_ND(B, (a, b), (ap, bp, c, d)),
            "J42": build_J42(B, ap, bp, c, d, SUBJECT),
            "Inv": build_inv(B, ap, bp, c, d, SUBJECT),
            "Union": build_union(B, ap, bp, c, d, SUBJECT),
            "Ksf": build_Ksf(B, a, b, SUBJECT),
            "arcplaces": build_arcplaces(B, a, b),
            "sim": build_sim(B, a, b, c, d, ap, bp),
            "phi1": build_phi(B, 1, ap, bp, SUBJECT),
        }
    own = {mode: build_J_own(Builder(mode, field), "a", "b", SUBJECT) for mode in MODES}
    g, rl = defs["general"], defs["real"]

    def ex(name):
        return g[name].count("exists")

    # imported constants and our reconstructions
    rows.append(_row("T.quantifiers", "7 = 4 + 3 (trace variable eliminated)", (4, 3), ex("T"), 7, True))
    rows.append(_row("T.degree", "8 = 2 * 4", (8,), g["T"].degree(), 8, True))
    rows.append(_row("T.degree.real", "8 = 2 * 4", (8,), rl["T"].degree(), 8, True))
    rows.append(_row("J.quantifiers", "138 (imported)", (138,), ex("J"), 138, True,
                     f"own reconstruction: {own['general'].count('exists')}"))
    rows.append(_row("J.degree", "384 (imported)", (384,), g["J"].degree(), 384, True,
                     f"own reconstruction: {own['general'].degree()}"))
    rows.append(_row("J.degree.real", "64 (imported)", (64,), rl["J"].degree(), 64, True,
                     f"own reconstruction: {own['real'].degree()}"))
    rows.append(_row("J4.quantifiers", "277 = 1 + 2*138 (imported)", (1, 2 * 138), ex("J4"), 277, True))
    rows.append(_row("J4.degree", "768 = 2*384 (imported)", (2 * 384,), g["J4"].degree(), 768, True))
    rows.append(_row("J4.degree.real", "128 = 2*64 (imported)", (2 * 64,), rl["J4"].degree(), 128, True))

    # quantifier chains
    rows.append(_row("phi.quantifiers", "32 = 2+7+7+2+7+7", (2, 7, 7, 2, 7, 7), ex("phi1"), 32))
    rows.append(_row("ND.quantifiers", "417 = 3 + 3*138", (3, 3 * 138), ex("ND"), 417))
    rows.append(_row("Ksf.exists", "418 = 1 + 417", (1, 417), g["Ksf"].count("exists"), 418))
    rows.append(_row("J42.quantifiers", "556 = 2 + 2*277", (2, 2 * 277), ex("J42"), 556))
    rows.append(_row("Inv.quantifiers", "557 = 1 + 556", (1, 556), ex("Inv"), 557))
    rows.append(_row("Union.quantifiers", "1113 = 556 + 557", (556, 557), ex("Union"), 1113))
    rows.append(_row("Ksf.forall", "1117 = 4 + 1113", (4, 1113), g["Ksf"].count("forall"), 1117))
    rows.append(_row("sim.quantifiers", "429 = 417 + 5 + 7", (417, 5, 7), ex("sim"), 429))
    rows.append(_row("arcplaces.quantifiers", "13 = 1 + 1 + 4 + 7", (1, 1, 4, 7), ex("arcplaces"), 13))

    # degree chains
    for mode, dd in (("general", g), ("real", rl)):
        sfx = "" if mode == "general" else ".real"
        gen = mode == "general"
        rows.append(_row("ND.degree" + sfx, "1536 = 4*384" if gen else "128 = 2*64",
                         (4 * 384,) if gen else (2 * 64,), dd["ND"].degree(), 1536 if gen else 128))
        rows.append(_row("ZND.degree" + sfx, "1542 = 1536 + 6" if gen else "134 = 128 + 6",
                         (1536, 6) if gen else (128, 6), dd["ZND"].degree(), 1542 if gen else 134))
        rows.append(_row("J42.degree" + sfx, "2304 = 3*768" if gen else "256 = 2*128",
                         (3 * 768,) if gen else (2 * 128,), dd["J42"].degree(), 2304 if gen else 256))
        rows.append(_row("Inv.degree" + sfx, "4608 = 2*2304" if gen else "512 = 2*256",
                         (2 * 2304,) if gen else (2 * 256,), dd["Inv"].degree(), 4608 if gen else 512))
        rows.append(_row("Union.degree" + sfx, "6912 = 2304 + 4608" if gen else "768 = 256 + 512",
                         (2304, 4608) if gen else (256, 512), dd["Union"].degree(), 6912 if gen else 768))
        rows.append(_row("Ksf.degree" + sfx, "8455 = 1 + 6912 + 1542" if gen else "903 = 1 + 768 + 134",
                         (1, 6912, 1542) if gen else (1, 768, 134), dd["Ksf"].degree(), 8455 if gen else 903))
        rows.append(_row("sim.degree" + sfx, "4608 = 3*1536" if gen else "256 = 2*128",
                         (3 * 1536,) if gen else (2 * 128,), dd["sim"].degree(), 4608 if gen else 256))
        rows.append(_row("arcplaces.degree" + sfx, "24 = 3*8" if gen else "16 = 2*8",
                         (3 * 8,) if gen else (2 * 8,), dd["arcplaces"].degree(), 24 if gen else 16))
        rows.append(_row("phi.degree.n1" + sfx, "48 = 6*max{2, 8}" if gen else "16 = 2*max{2, 8}",
                         (6 * 8,) if gen else (2 * 8,), dd["phi1"].degree(), 48 if gen else 16))

    # full assemblies
    for n in ns:
        fm, bm = assemble_main(n, field)
        shape_m = bm.quantifier_shape
        rows.append(_row(f"main.n{n}.exists", "2266 = 1117 + 1117 + 32", (1117, 1117, 32),
                         shape_m[1][1] if len(shape_m) == 3 else None, 2266))
        rows.append(_row(f"main.n{n}.forall_inner", "1266 = 429 + 418 + 418 + 1", (429, 418, 418, 1),
                         shape_m[2][1] if len(shape_m) == 3 else None, 1266))
        rows.append(_row(f"main.n{n}.forall_outer", "2", (2,), shape_m[0][1], 2))
        W = bm.construction["general"]["degrees"]["W"]
        Wr = bm.construction["real"]["degrees"]["W"]
        rows.append(_row(f"main.n{n}.W", "25365 = 3*8455", (3 * 8455,), W, 25365))
        rows.append(_row(f"main.n{n}.W.real", "1806 = 2*903", (2 * 903,), Wr, 1806))
        m = max(8, n + 1)
        rows.append(_row(f"main.n{n}.degree", f"2*max{{25365, 1 + 6*{m}}} = max{{50730, 12n+14}}",
                         (2 * max(25365, 1 + 6 * m),), bm.degree_bound, bm.claimed_degree))
        rows.append(_row(f"main.n{n}.degree.real", f"2*max{{1806, 1 + 2*{m}}} = max{{3612, 4n+6}}",
                         (2 * max(1806, 1 + 2 * m),), bm.real_subfield_variant["degree_bound"], bm.claimed_real_degree))
        fe, be = assemble_empty(n, field)
        shape_e = be.quantifier_shape
        rows.append(_row(f"empty.n{n}.forall", "15 = 2 + 13", (2, 13), shape_e[0][1], 15))
        rows.append(_row(f"empty.n{n}.exists", "33 = 32 + 1", (32, 1), shape_e[1][1], 33))
        rows.append(_row(f"empty.n{n}.degree", f"1 + 24 + 6*{m} = max{{6n+31, 73}}", (1, 24, 6 * m),
                         be.degree_bound, be.claimed_degree))
        rows.append(_row(f"empty.n{n}.degree.real", f"1 + 16 + 2*{m} = max{{2n+19, 33}}", (1, 16, 2 * m),
                         be.real_subfield_variant["degree_bound"], be.claimed_real_degree))
        shape2, deg2, rdeg2 = claimed_second_goal(n)
        rows.append(_flagged(f"second_goal.n{n}.forall", "22 universal quantifiers (introduction)",
                             shape_e[0][1], shape2[0][1],
                             "introduction states 22, the proof gives 15; recorded, not resolved"))
        rows.append(_flagged(f"second_goal.n{n}.degree", "max{6n+55, 97} (introduction)", be.degree_bound, deg2,
                             "introduction bound differs from the proof's max{6n+31, 73}"))
        rows.append(_flagged(f"second_goal.n{n}.degree.real", "max{2n+35, 49} (introduction)",
                             be.real_subfield_variant["degree_bound"], rdeg2,
                             "introduction bound differs from the proof's max{2n+19, 33}"))
    rows.append(LedgerRow("compressed.shape", "2 / 1758 / 979 (documentation only)", (), None, 1758, "documented",
                          False, "quantifier compression variant; not implemented"))
    return rows


def ledger_summary(rows: Sequence[LedgerRow]) -> dict:
    counts: dict[str, int] = {}
    for r in rows:
        counts[r.status] = counts.get(r.status, 0) + 1
    return {"rows": [r.to_json() for r in rows], "counts": counts,
            "mismatches": [r.id for r in rows if r.status == "mismatch"]}


def degree_soundness(mode: str = "real", names: Sequence[str] = ("S", "T", "T×", "gcd", "arcplaces")) -> list[dict]:
    """Expanded (sparse) degree against the structural bound for expandable templates."""
    out = []
    for name in names:
        d = definition(name, mode)
        if not d.expr.is_expandable():
            continue
        actual = d.expr.expand().degree()
        bound = d.degree()
        out.append({"template": name, "mode": mode, "bound": bound, "sparse_degree": actual, "slack": bound - actual})
    return out

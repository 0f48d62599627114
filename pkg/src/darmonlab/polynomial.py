"""Sparse multivariate polynomials and structural polynomial expressions.

``Polynomial`` is a plain sparse map from monomials to coefficients.  The
``Expr`` tree describes how a defining polynomial is assembled from pieces
(sums, products, powers, single-polynomial combinations, imported black
boxes); its degree is computed structurally, so even assemblies far too
large to expand carry an exact degree bound.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, log2
from typing import Iterable, Mapping, Sequence, Union

Monomial = tuple  # sorted tuple of (variable, exponent) pairs


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _mono_deg(m: Monomial) -> int:
    return sum(e for _, e in m)


class Polynomial:
    """Sparse polynomial; coefficients are ints, Fractions or field elements."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    # constructors -----------------------------------------------------------
    @classmethod
    def var(cls, name: str) -> "Polynomial":
        return cls({((name, 1),): 1})

    @classmethod
    def const(cls, c) -> "Polynomial":
        return cls({(): c})

    @classmethod
    def coerce(cls, x) -> "Polynomial":
        if isinstance(x, Polynomial):
            return x
        if isinstance(x, str):
            return cls.var(x)
        return cls.const(x)

    # arithmetic ---------------------------------------------------------------
    def __add__(self, other):
        other = Polynomial.coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-Polynomial.coerce(other))

    def __rsub__(self, other):
        return Polynomial.coerce(other) - self

    def __mul__(self, other):
        other = Polynomial.coerce(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = Polynomial.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.coerce(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # inspection ---------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((), 0)

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        if not self.terms:
            return -1
        return max(_mono_deg(m) for m in self.terms)

    def variables(self) -> frozenset[str]:
        return frozenset(v for m in self.terms for v, _ in m)

    def degree_in(self, var: str) -> int:
        return max((dict(m).get(var, 0) for m in self.terms), default=-1)

    def coefficients_in(self, var: str) -> list["Polynomial"]:
        """[c_0, c_1, ...] with self = sum c_k var^k."""
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            d = dict(m)
            k = d.pop(var, 0)
            rest = tuple(sorted(d.items()))
            out.setdefault(k, {})[rest] = out.get(k, {}).get(rest, 0) + c
        top = max(out, default=-1)
        return [Polynomial(out.get(k, {})) for k in range(top + 1)]

    # substitution ---------------------------------------------------------------
    def substitute(self, mapping: Mapping[str, object]) -> "Polynomial":
        """Replace variables by values or polynomials."""
        cache: dict = {}

        def power(v, e):
            key = (v, e)
            if key not in cache:
                cache[key] = mapping[v] ** e
            return cache[key]

        acc: dict = {}
        poly_terms = []
        for m, c in self.terms.items():
            coeff = c
            rest = []
            poly_factor = None
            for v, e in m:
                if v in mapping:
                    val = power(v, e)
                    if isinstance(val, Polynomial):
                        poly_factor = val if poly_factor is None else poly_factor * val
                    else:
                        coeff = coeff * val
                else:
                    rest.append((v, e))
            rest = tuple(rest)
            if poly_factor is None:
                acc[rest] = acc.get(rest, 0) + coeff
            else:
                poly_terms.append(Polynomial({rest: coeff}) * poly_factor)
        out = Polynomial(acc)
        for p in poly_terms:
            out = out + p
        return out

    def evaluate(self, assignment: Mapping[str, object]):
        total = 0
        for m, c in self.terms.items():
            t = c
            for v, e in m:
                t = t * assignment[v] ** e
            total = total + t
        return total

    def rename(self, mapping: Mapping[str, str]) -> "Polynomial":
        out: dict = {}
        for m, c in self.terms.items():
            d: dict = {}
            for v, e in m:
                w = mapping.get(v, v)
                d[w] = d.get(w, 0) + e
            key = tuple(sorted(d.items()))
            out[key] = out.get(key, 0) + c
        return Polynomial(out)

    # output -------------------------------------------------------------------
    def sorted_terms(self) -> list[tuple[Monomial, object]]:
        return sorted(self.terms.items(), key=lambda t: (-_mono_deg(t[0]), t[0]))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_sexp(self) -> str:
        terms = " ".join(
            "(" + _coeff_str(c) + " (" + " ".join(f"({v} {e})" for v, e in m) + "))"
            for m, c in self.sorted_terms()
        )
        return f"(poly ({terms}))"

    def to_json(self) -> dict:
        return {
            "poly": [
                {"coeff": _coeff_str(c), "monomial": [[v, e] for v, e in m]}
                for m, c in self.sorted_terms()
            ]
        }


def _coeff_str(c) -> str:
    if isinstance(c, Fraction) and c.denominator != 1:
        return f"{c.numerator}/{c.denominator}"
    return str(c)


# --------------------------------------------------------------------------
# structural expressions
# --------------------------------------------------------------------------

MODES = ("general", "real")


class Expr:
    """Base class of structural polynomial expressions."""

    def degree(self, mode: str = "general") -> int:
        raise NotImplementedError

    def variables(self) -> frozenset[str]:
        raise NotImplementedError

    def is_expandable(self) -> bool:
        return all(c.is_expandable() for c in self.children())

    def children(self) -> Sequence["Expr"]:
        return ()

    def expand(self) -> Polynomial:
        raise NotImplementedError

    def evaluate(self, assignment: Mapping[str, object]):
        return self.expand().evaluate(assignment)

    def substitute(self, mapping: Mapping[str, "Expr"]) -> "Expr":
        raise NotImplementedError

    def rename(self, mapping: Mapping[str, str]) -> "Expr":
        return self.substitute({k: Leaf(Polynomial.var(v)) for k, v in mapping.items()})

    def to_sexp(self) -> str:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    # convenience operators build structural nodes
    def __add__(self, other):
        return Add((self, as_expr(other)))

    def __radd__(self, other):
        return Add((as_expr(other), self))

    def __sub__(self, other):
        return Add((self, Mul((Leaf(Polynomial.const(-1)), as_expr(other)))))

    def __rsub__(self, other):
        return as_expr(other) - self

    def __mul__(self, other):
        return Mul((self, as_expr(other)))

    def __rmul__(self, other):
        return Mul((as_expr(other), self))

    def __pow__(self, k: int):
        return Pow(self, k)

    def __neg__(self):
        return Mul((Leaf(Polynomial.const(-1)), self))


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    return Leaf(Polynomial.coerce(x))


class Leaf(Expr):
    __slots__ = ("poly",)

    def __init__(self, poly: Polynomial):
        self.poly = poly

    def degree(self, mode: str = "general") -> int:
        return max(self.poly.degree(), 0)

    def variables(self):
        return self.poly.variables()

    def is_expandable(self) -> bool:
        return True

    def expand(self) -> Polynomial:
        return self.poly

    def substitute(self, mapping):
        relevant = {k: v for k, v in mapping.items() if k in self.poly.variables()}
        if not relevant:
            return self
        if all(v.is_expandable() for v in relevant.values()):
            return Leaf(self.poly.substitute({k: v.expand() for k, v in relevant.items()}))
        # keep structure: rewrite the leaf as a sum of monomials over expressions
        terms = []
        for m, c in self.poly.terms.items():
            factors: list[Expr] = [Leaf(Polynomial.const(c))]
            for v, e in m:
                base = relevant.get(v, Leaf(Polynomial.var(v)))
                factors.append(base if e == 1 else Pow(base, e))
            terms.append(Mul(tuple(factors)))
        return Add(tuple(terms))

    def to_sexp(self):
        return self.poly.to_sexp()

    def to_json(self):
        return self.poly.to_json()

    def __repr__(self):
        return f"Leaf({self.poly})"


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: Sequence[Expr]):
        self.terms = tuple(terms)

    def children(self):
        return self.terms

    def degree(self, mode="general"):
        return max(t.degree(mode) for t in self.terms)

    def variables(self):
        return frozenset().union(*(t.variables() for t in self.terms))

    def expand(self):
        out = Polynomial()
        for t in self.terms:
            out = out + t.expand()
        return out

    def evaluate(self, assignment):
        total = 0
        for t in self.terms:
            total = total + t.evaluate(assignment)
        return total

    def substitute(self, mapping):
        return Add(tuple(t.substitute(mapping) for t in self.terms))

    def to_sexp(self):
        return "(add " + " ".join(t.to_sexp() for t in self.terms) + ")"

    def to_json(self):
        return {"add": [t.to_json() for t in self.terms]}


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors: Sequence[Expr]):
        self.factors = tuple(factors)

    def children(self):
        return self.factors

    def degree(self, mode="general"):
        return sum(f.degree(mode) for f in self.factors)

    def variables(self):
        return frozenset().union(*(f.variables() for f in self.factors))

    def expand(self):
        out = Polynomial.const(1)
        for f in self.factors:
            out = out * f.expand()
        return out

    def evaluate(self, assignment):
        total = 1
        for f in self.factors:
            total = total * f.evaluate(assignment)
        return total

    def substitute(self, mapping):
        return Mul(tuple(f.substitute(mapping) for f in self.factors))

    def to_sexp(self):
        return "(mul " + " ".join(f.to_sexp() for f in self.factors) + ")"

    def to_json(self):
        return {"mul": [f.to_json() for f in self.factors]}


class Pow(Expr):
    __slots__ = ("base", "k")

    def __init__(self, base: Expr, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        self.base = base
        self.k = k

    def children(self):
        return (self.base,)

    def degree(self, mode="general"):
        return self.k * self.base.degree(mode)

    def variables(self):
        return self.base.variables()

    def expand(self):
        return self.base.expand() ** self.k

    def evaluate(self, assignment):
        return self.base.evaluate(assignment) ** self.k

    def substitute(self, mapping):
        return Pow(self.base.substitute(mapping), self.k)

    def to_sexp(self):
        return f"(pow {self.base.to_sexp()} {self.k})"

    def to_json(self):
        return {"pow": [self.base.to_json(), self.k]}


class Opaque(Expr):
    """Imported defining polynomial known only through its budget.

    ``args`` maps the black box's formal inputs (subject, parameters) to
    expressions; ``bound`` lists the bound variables it consumes.  Its degree
    is the imported bound, scaled by the largest degree of a non-linear
    argument.
    """

    __slots__ = ("name", "args", "bound", "deg_general", "deg_real")

    def __init__(self, name: str, args: Sequence[tuple[str, Expr]], bound: Sequence[str], deg_general: int, deg_real: int):
        self.name = name
        self.args = tuple(args)
        self.bound = tuple(bound)
        self.deg_general = deg_general
        self.deg_real = deg_real

    def children(self):
        return tuple(e for _, e in self.args)

    def is_expandable(self) -> bool:
        return False

    def degree(self, mode="general"):
        base = self.deg_general if mode == "general" else self.deg_real
        scale = max([1] + [e.degree(mode) for _, e in self.args])
        return base * scale

    def variables(self):
        return frozenset(self.bound).union(*(e.variables() for _, e in self.args))

    def expand(self):
        raise ValueError(f"imported polynomial {self.name} cannot be expanded")

    def evaluate(self, assignment):
        raise ValueError(f"imported polynomial {self.name} cannot be evaluated")

    def substitute(self, mapping):
        bound = tuple(_var_name(mapping[b]) if b in mapping else b for b in self.bound)
        return Opaque(self.name, tuple((k, e.substitute(mapping)) for k, e in self.args), bound, self.deg_general, self.deg_real)

    def to_sexp(self):
        args = " ".join(f"({k} {e.to_sexp()})" for k, e in self.args)
        return f"(opaque {self.name} ({args}) (bound {len(self.bound)}) (degree {self.deg_general} {self.deg_real}))"

    def to_json(self):
        return {
            "opaque": self.name,
            "args": {k: e.to_json() for k, e in self.args},
            "bound": list(self.bound),
            "degree": {"general": self.deg_general, "real": self.deg_real},
        }


def _var_name(e: Expr) -> str:
    if isinstance(e, Leaf):
        vs = e.poly.variables()
        if len(vs) == 1 and e.poly == Polynomial.var(next(iter(vs))):
            return next(iter(vs))
    raise ValueError("bound variables can only be renamed to variables")


class Combine(Expr):
    """A single polynomial whose zeros are the common zeros of ``parts``.

    construction:
      * ``("sos",)``: f1^2 + ... + fn^2 (fields inside the reals);
      * ``("norm", m, N)``: N(f1, ..., fn) for the norm form N of x^n - m;
      * ``("pair", n_K)``: f1^2 - n_K f2^2 (two parts, n_K a non-square).
    """

    __slots__ = ("parts", "construction")

    def __init__(self, parts: Sequence[Expr], construction: tuple):
        self.parts = tuple(parts)
        self.construction = construction

    def children(self):
        return self.parts

    @property
    def kind(self) -> str:
        return self.construction[0]

    def degree(self, mode="general"):
        d = max(p.degree(mode) for p in self.parts)
        n = len(self.parts)
        if self.kind == "sos":
            return 2 * d
        if self.kind == "norm":
            return n * d
        if self.kind == "pair":
            return 2 * d
        raise ValueError(self.kind)

    def variables(self):
        return frozenset().union(*(p.variables() for p in self.parts))

    def _apply(self, values):
        kind = self.kind
        if kind == "sos":
            total = 0
            for v in values:
                total = total + v * v
            return total
        if kind == "pair":
            nk = self.construction[1]
            return values[0] * values[0] - nk * values[1] * values[1]
        N: Polynomial = self.construction[2]
        return N.substitute({f"Y{i + 1}": v for i, v in enumerate(values)})

    def expand(self):
        vals = [p.expand() for p in self.parts]
        out = self._apply(vals)
        return out if isinstance(out, Polynomial) else Polynomial.coerce(out)

    def evaluate(self, assignment):
        vals = [p.evaluate(assignment) for p in self.parts]
        out = self._apply(vals)
        if isinstance(out, Polynomial):
            return out.constant_value()
        return out

    def substitute(self, mapping):
        return Combine(tuple(p.substitute(mapping) for p in self.parts), self.construction)

    def _construction_tag(self) -> str:
        if self.kind == "norm":
            return f"norm {len(self.parts)} {self.construction[1]}"
        if self.kind == "pair":
            return f"pair {self.construction[1]}"
        return "sos"

    def to_sexp(self):
        return f"(combine ({self._construction_tag()}) " + " ".join(p.to_sexp() for p in self.parts) + ")"

    def to_json(self):
        return {"combine": self._construction_tag(), "parts": [p.to_json() for p in self.parts]}


def pairing_degree(d: int, n: int) -> int:
    """Degree of nested two-at-a-time pairing of n parts of degree d."""
    return d * (2 ** ceil(log2(n))) if n > 1 else d


def var(name: str) -> Leaf:
    return Leaf(Polynomial.var(name))


def const(c) -> Leaf:
    return Leaf(Polynomial.const(c))


def variables_of(exprs: Iterable[Expr]) -> frozenset[str]:
    return frozenset().union(*(e.variables() for e in exprs))

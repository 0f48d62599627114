"""Text and JSON forms of elements and places."""

from __future__ import annotations

from fractions import Fraction

from .numberfield import ComplexPlace, FieldElement, FinitePlace, NumberField, Place, RealPlace


def _q(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def element_str(x: FieldElement) -> str:
    """"p/q" for rationals, "[c0,c1,...]" otherwise (power-basis coordinates)."""
    if x.is_rational():
        return _q(x.as_rational())
    return "[" + ",".join(_q(c) for c in x.coordinates) + "]"


def place_label(K: NumberField, v: Place) -> str:
    if isinstance(v, RealPlace):
        return "inf" if K.real_place_count == 1 else f"inf[{v.index}]"
    if isinstance(v, ComplexPlace):
        return f"complex[{v.index}]"
    return v.label()


def place_json(K: NumberField, v: Place) -> dict:
    if isinstance(v, FinitePlace):
        P = v.prime
        return {"kind": "finite", "label": place_label(K, v), "p": P.p, "generator": list(P.generator),
                "e": P.e, "f": P.f}
    kind = "real" if isinstance(v, RealPlace) else "complex"
    return {"kind": kind, "label": place_label(K, v), "index": v.index}


def parse_place(K: NumberField, text: str) -> Place:
    """Places: "p" (the only prime above p), "p:i" (i-th prime above p),
    "p:[g0,g1,...]" (prime with that residue generator), "inf" / "inf[i]",
    "complex[i]"."""
    s = text.strip().replace(" ", "")
    if s in ("inf", "oo", "∞"):
        if K.real_place_count != 1:
            raise ValueError("'inf' is ambiguous; use inf[i]")
        return RealPlace(0)
    for prefix, cls, count in (("inf[", RealPlace, K.real_place_count),
                               ("complex[", ComplexPlace, K.complex_place_count)):
        if s.startswith(prefix) and s.endswith("]"):
            i = int(s[len(prefix):-1])
            if not 0 <= i < count:
                raise ValueError(f"no place {text}")
            return cls(i)
    if ":" in s:
        p_text, which = s.split(":", 1)
        p = int(p_text)
        if which.startswith("["):
            gen = [int(c) for c in which[1:-1].split(",") if c]
            return FinitePlace(K.prime_by_generator(p, gen))
        return FinitePlace(K.prime(p, int(which)))
    p = int(s)
    primes = K.primes_above(p)
    if len(primes) != 1:
        raise ValueError(f"{len(primes)} primes lie above {p}; use {p}:i")
    return FinitePlace(primes[0])

"""Command-line front end: ``darmonlab <command> ...``.

Exit codes: 0 success, 1 domain or usage error, 2 search exhausted.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Sequence

from . import checks
from .darmon import darmon_member
from .definable_sets import four_square_witness, in_J, in_J4, in_J42, in_Ksf, in_T, is_sum_of_four_squares
from .formula import quantifier_shape, shape_string, to_json, to_sexp
from .formula_compiler import assemble_empty, assemble_main, budget_ledger, ledger_summary
from .localsymbols import delta, delta_upper, hilbert, symbol_table
from .numberfield import RealPlace, SearchExhausted, parse_element, parse_field
from .prescribe import realize_finite, realize_with_real
from .serialize import element_str, parse_place, place_json, place_label

DEFAULT_HEIGHT = 50
DEFAULT_SEED = 0
DEFAULT_ESCALATION = 8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default="Q", help='"Q", "Q(sqrt,d)" or "poly:[c0,...,1]"')
    common.add_argument("--json", action="store_true", help="JSON output")
    common.add_argument("--height", type=int, default=DEFAULT_HEIGHT, help="search height bound")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random seed (DARMONLAB_SEED overrides)")
    common.add_argument("--escalation", type=int, default=DEFAULT_ESCALATION, help="retry rounds for searches")

    p = _Parser(prog="darmonlab", description="Hilbert symbols, ramification sets, Darmon sets and formula budgets.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    h = sub.add_parser("hilbert", parents=[common], help="Hilbert symbol (a, b)_v")
    h.add_argument("a")
    h.add_argument("b")
    g = h.add_mutually_exclusive_group()
    g.add_argument("--place")
    g.add_argument("--all", action="store_true")

    d = sub.add_parser("delta", parents=[common], help="ramified places of (a, b)")
    d.add_argument("a")
    d.add_argument("b")
    d.add_argument("--upper", action="store_true", help="finite places with an odd valuation only")

    m = sub.add_parser("member", parents=[common], help="membership in a definable set")
    m.add_argument("--set", dest="set_name", required=True, choices=["T", "J", "J4", "J42", "Ksf", "sum4sq"])
    m.add_argument("values", nargs="+", help="parameters followed by r")

    pr = sub.add_parser("prescribe", parents=[common], help="quaternion algebra ramified exactly at the places")
    pr.add_argument("--places", nargs="*", default=[])

    dm = sub.add_parser("darmon", parents=[common], help="membership in the Darmon set D_{K,S,n}")
    dm.add_argument("--n", required=True, help="positive integer or 'inf'")
    grp = dm.add_mutually_exclusive_group()
    grp.add_argument("--params", help="a,b,c,d defining S")
    grp.add_argument("--places", nargs="*", default=None)
    dm.add_argument("r")

    f = sub.add_parser("formula", parents=[common], help="assemble a defining formula and its budget")
    f.add_argument("--which", choices=["main", "empty"], required=True)
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--export", choices=["sexp", "json"])

    sub.add_parser("ledger", parents=[common], help="claimed-vs-computed budget table")

    v = sub.add_parser("verify", parents=[common], help="run a property suite")
    v.add_argument("--suite", choices=["reciprocity", "darmon-oracle", "budget", "rewrites", "all"], default="all")
    v.add_argument("--count", type=int, default=None, help="instances per randomized suite")
    return p


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def _cmd_hilbert(args, K):
    a, b = parse_element(K, args.a), parse_element(K, args.b)
    if args.place:
        rows = [(parse_place(K, args.place), None)]
        rows = [(v, hilbert(a, b, v)) for v, _ in rows]
    elif args.all:
        rows = symbol_table(a, b)
    else:
        rows = [(v, -1) for v in delta(a, b)]
    out = {
        "command": "hilbert",
        "field": K.spec,
        "a": element_str(a),
        "b": element_str(b),
        "symbols": [{"place": place_json(K, v), "value": s} for v, s in rows],
    }
    human = "\n".join(f"{place_label(K, v)}: {s:+d}" for v, s in rows) or "(all symbols +1)"
    return out, human


def _cmd_delta(args, K):
    a, b = parse_element(K, args.a), parse_element(K, args.b)
    places = delta_upper(a, b) if args.upper else delta(a, b)
    out = {
        "command": "delta",
        "field": K.spec,
        "a": element_str(a),
        "b": element_str(b),
        "upper": bool(args.upper),
        "places": [place_json(K, v) for v in places],
        "cardinality": len(places),
    }
    human = "{" + ", ".join(place_label(K, v) for v in places) + "}"
    return out, human


_ARITY = {"T": 2, "J": 2, "J4": 4, "J42": 4, "Ksf": 2, "sum4sq": 0}


def _cmd_member(args, K):
    need = _ARITY[args.set_name] + 1
    if len(args.values) != need:
        raise ValueError(f"--set {args.set_name} takes {need - 1} parameters and r")
    xs = [parse_element(K, v) for v in args.values]
    *params, r = xs
    out = {"command": "member", "field": K.spec, "set": args.set_name,
           "params": [element_str(p) for p in params], "r": element_str(r)}
    name = args.set_name
    if name == "sum4sq":
        member = is_sum_of_four_squares(r)
        if member:
            w = four_square_witness(r, args.height)
            out["witness"] = None if w is None else [element_str(x) for x in w]
    else:
        fn = {"T": in_T, "J": in_J, "J4": in_J4, "J42": in_J42, "Ksf": in_Ksf}[name]
        member = fn(*params, r)
    out["member"] = bool(member)
    return out, "true" if member else "false"


def _cmd_prescribe(args, K):
    S = [parse_place(K, s) for s in args.places]
    if any(isinstance(v, RealPlace) for v in S):
        res = realize_with_real(K, S, rounds=args.escalation)
    else:
        res = realize_finite(K, S, rounds=args.escalation)
    log = {k: v for k, v in res.search_log.items()}
    out = {
        "command": "prescribe",
        "field": K.spec,
        "places": [place_json(K, v) for v in S],
        "a": element_str(res.a),
        "b": element_str(res.b),
        "delta": [place_json(K, v) for v in res.realized_delta],
        "delta_upper": [place_json(K, v) for v in res.realized_delta_upper],
        "search_log": log,
    }
    return out, f"a = {element_str(res.a)}\nb = {element_str(res.b)}"


def _weight(text: str):
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return math.inf
    n = int(text)
    if n < 1:
        raise ValueError("n must be a positive integer or 'inf'")
    return n


def _cmd_darmon(args, K):
    n = _weight(args.n)
    r = parse_element(K, args.r)
    params = None
    places = ()
    if args.params:
        params = tuple(parse_element(K, s) for s in _split_params(args.params))
        if len(params) != 4:
            raise ValueError("--params takes four elements a,b,c,d")
    elif args.places:
        places = tuple(parse_place(K, s) for s in args.places)
    member = darmon_member(K, r, n, places, params)
    out = {"command": "darmon", "field": K.spec, "n": "inf" if n == math.inf else n, "r": element_str(r),
           "member": bool(member)}
    return out, "true" if member else "false"


def _split_params(text: str) -> list[str]:
    """Split a,b,c,d where elements may themselves be bracketed coordinate lists."""
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [s for s in out if s.strip()]


def _cmd_formula(args, K):
    if args.n < 1:
        raise ValueError("n must be a positive integer")
    fn = assemble_main if args.which == "main" else assemble_empty
    formula, budget = fn(args.n, K)
    out = {"command": "formula", "field": K.spec, "which": args.which, "budget": budget.to_json()}
    if args.export == "sexp":
        out["export"] = to_sexp(formula)
    elif args.export == "json":
        out["export"] = to_json(formula)
    human = (f"{args.which} n={args.n}: {shape_string(quantifier_shape(formula))}, degree <= {budget.degree_bound} "
             f"(real: {budget.real_subfield_variant['degree_bound']}), matches claimed: {budget.matches()}")
    if args.export == "sexp":
        human += "\n" + out["export"]
    elif args.export == "json":
        human += "\n" + json.dumps(out["export"], sort_keys=True)
    return out, human


def _cmd_ledger(args, K):
    summary = ledger_summary(budget_ledger(K))
    out = {"command": "ledger", "field": K.spec, **summary}
    lines = [f"{r['status']:>10}  {r['id']:<28} computed={r['computed']} claimed={r['claimed']}  {r['identity']}"
             for r in summary["rows"]]
    lines.append(f"mismatches: {len(summary['mismatches'])}")
    return out, "\n".join(lines)


def _cmd_verify(args, K):
    seed = args.seed
    results = {}
    suites = ["reciprocity", "darmon-oracle", "budget", "rewrites"] if args.suite == "all" else [args.suite]
    for s in suites:
        if s == "reciprocity":
            r = checks.reciprocity_suite(K, args.count or 100, seed)
            r.pop("seconds")
            r["passed"] = not r["failures"] and not r["odd_delta"]
        elif s == "darmon-oracle":
            if K.degree != 1:
                raise ValueError("the darmon-oracle suite runs over Q only")
            r = checks.darmon_oracle_suite(min(args.height, 200))
            r.pop("seconds")
            r["passed"] = not r["mismatches"]
        elif s == "budget":
            r = checks.budget_suite()
            r["passed"] = not r["mismatches"] and all(a["match"] for a in r["assemblies"])
        else:
            r1 = checks.rewrite_suite(1, args.count or 100, seed)
            r2 = checks.rewrite_suite(2, args.count or 100, seed)
            r = {"rule1": r1, "rule2": r2, "passed": r1["disagree"] == 0 and r2["disagree"] == 0}
        results[s] = r
    passed = all(r["passed"] for r in results.values())
    out = {"command": "verify", "field": K.spec, "seed": seed, "suites": results, "passed": passed}
    human = "\n".join(f"{k}: {'pass' if v['passed'] else 'FAIL'}" for k, v in results.items())
    return out, human


COMMANDS = {
    "hilbert": _cmd_hilbert,
    "delta": _cmd_delta,
    "member": _cmd_member,
    "prescribe": _cmd_prescribe,
    "darmon": _cmd_darmon,
    "formula": _cmd_formula,
    "ledger": _cmd_ledger,
    "verify": _cmd_verify,
}


def _emit(payload: dict, human: str, as_json: bool, stream) -> None:
    if as_json:
        stream.write(json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n")
    else:
        stream.write(human + "\n")


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    want_json = "--json" in argv
    try:
        args = _parser().parse_args(argv)
    except UsageError as exc:
        stderr.write(str(exc) + "\n")
        return 1
    env_seed = os.environ.get("DARMONLAB_SEED")
    if env_seed is not None:
        args.seed = int(env_seed)
    try:
        K = parse_field(args.field)
        payload, human = COMMANDS[args.command](args, K)
        _emit(payload, human, args.json, stdout)
        if args.command == "verify" and not payload["passed"]:
            return 1
        return 0
    except SearchExhausted as exc:
        _emit({"error": "search_exhausted", "message": str(exc), "bound": getattr(exc, "bound", None)},
              f"search exhausted: {exc}", want_json, stderr)
        return 2
    except (ValueError, ZeroDivisionError) as exc:
        _emit({"error": "domain_error", "message": str(exc)}, f"error: {exc}", want_json, stderr)
        return 1


def main() -> None:
    sys.exit(run())

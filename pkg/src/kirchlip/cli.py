"""Command-line front end: JSON in, one JSON document out, status as exit code."""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .cech import (
    CechCochain,
    build_cech_complex,
    cohomology_window,
    is_coboundary,
    load_obstruction_catalog,
    parity_obstruction,
)
from .cexgen import DEFAULT_SCHEDULE, MODES, certify_counterexample, generate_counterexample
from .errors import InputError, ResourceError
from .exactmath import RationalPolynomial
from .kirch import (
    Finite,
    ac_closure,
    classify_cover,
    first_elements,
    intersect_all,
    set_from_json,
    set_to_json,
)
from .lipcalc import (
    WindowFunction,
    find_circuit,
    interp_poly,
    is_window_lip,
    newton_coefficients,
    product_sum_encode,
    top_divided_difference,
)
from .splitter import split_stream

OK, PROPERTY_FAILS, INPUT_ERROR, RESOURCE_ERROR = "OK", "PROPERTY_FAILS", "INPUT_ERROR", "RESOURCE_ERROR"
EXIT_CODES = {OK: 0, PROPERTY_FAILS: 1, INPUT_ERROR: 2, RESOURCE_ERROR: 3}


@dataclass
class CommandResult:
    status: str
    payload: object
    diagnostics: str = ""

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


# -- JSON helpers ---------------------------------------------------------------

def to_jsonable(obj):
    """Integers and fractions become strings; containers recurse."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (int, Fraction)):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj


def _int(x) -> int:
    if isinstance(x, bool):
        raise InputError(f"expected an integer, got {x!r}")
    try:
        return int(x)
    except (TypeError, ValueError):
        raise InputError(f"expected an integer, got {x!r}") from None


def _frac(x) -> Fraction:
    try:
        return Fraction(x)
    except (TypeError, ValueError, ZeroDivisionError):
        raise InputError(f"expected a rational number, got {x!r}") from None


def _read_text(path: str, stdin) -> str:
    if path == "-":
        return (stdin or sys.stdin).read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str, stdin):
    try:
        return json.loads(_read_text(path, stdin))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def function_to_json(f: WindowFunction) -> dict:
    return {
        "domain": set_to_json(f.domain),
        "window": str(f.window),
        "repr": "table",
        "values": [[str(x), str(y)] for x, y in sorted(f.values.items())],
    }


def _integral_values(domain, window, fn) -> WindowFunction:
    vals = {}
    for x in domain.enumerate(window):
        y = fn(x)
        if Fraction(y).denominator != 1:
            raise InputError(f"function value at {x} is not an integer")
        vals[x] = int(y)
    return WindowFunction(domain, window, vals)


def function_from_json(doc) -> WindowFunction:
    """Read any of the table, product-sum and poly representations."""
    if not isinstance(doc, dict) or "repr" not in doc:
        raise InputError("function JSON needs a 'repr' field")
    kind = doc["repr"]
    domain = set_from_json(doc["domain"]) if "domain" in doc else None
    window = _int(doc["window"]) if "window" in doc else None
    if kind == "table":
        try:
            table = {_int(x): _int(y) for x, y in doc["values"]}
        except (KeyError, TypeError, ValueError):
            raise InputError("table values must be a list of [x, y] pairs") from None
        if not table:
            raise InputError("empty value table")
        if domain is None:
            domain = Finite(tuple(sorted(table)))
        return WindowFunction(domain, window if window is not None else max(table), table)
    if kind not in ("product-sum", "poly"):
        raise InputError(f"unknown function repr {kind!r}")
    coeffs = [_frac(c) for c in doc.get("coeffs", [])]
    if kind == "poly":
        if domain is None or window is None:
            raise InputError("poly repr needs 'domain' and 'window'")
        poly = RationalPolynomial(coeffs)
        return _integral_values(domain, window, poly)
    enum = doc.get("enumeration", "increasing")
    if enum == "increasing":
        if domain is None:
            raise InputError("product-sum with increasing enumeration needs a 'domain'")
        pts = first_elements(domain, len(coeffs)) if coeffs else []
    else:
        pts = [_int(x) for x in enum]
        if domain is None:
            domain = Finite(tuple(sorted(pts)))
    if window is None:
        window = max(pts) if pts else 1

    def value(x):
        acc, prod = Fraction(0), 1
        for a, p in zip(coeffs, pts):
            acc += a * prod
            prod *= x - p
        return acc

    return _integral_values(domain, window, value)


def _product_sum_doc(doc) -> Optional[list[int]]:
    """Integer Newton coefficients on the increasing enumeration, when given that way."""
    if doc.get("repr") == "product-sum" and doc.get("enumeration", "increasing") == "increasing":
        coeffs = [_frac(c) for c in doc.get("coeffs", [])]
        if any(c.denominator != 1 for c in coeffs):
            raise InputError("product-sum coefficients must be integers")
        return [int(c) for c in coeffs]
    return None


def cochain_from_json(doc) -> CechCochain:
    try:
        degree = _int(doc["degree"])
        comps = {
            tuple(_int(i) for i in key.split(",")): function_from_json(f)
            for key, f in doc["components"].items()
        }
    except (KeyError, AttributeError, TypeError):
        raise InputError("cochain JSON needs 'degree' and 'components'") from None
    return CechCochain(degree, comps)


def cochain_to_json(c: CechCochain) -> dict:
    return {
        "degree": str(c.degree),
        "components": {
            ",".join(str(i) for i in key): function_to_json(f)
            for key, f in sorted(c.components.items())
            if f is not None
        },
    }


def cover_from_json(doc) -> tuple[list, Optional[int]]:
    if not isinstance(doc, dict) or "pieces" not in doc:
        raise InputError("cover JSON needs 'pieces'")
    pieces = [set_from_json(p) for p in doc["pieces"]]
    return pieces, _int(doc["window"]) if "window" in doc else None


def _int_list(text: Optional[str]) -> Optional[list[int]]:
    if text is None:
        return None
    return [_int(t) for t in text.split(",") if t.strip()]


# -- subcommands ---------------------------------------------------------------

def cmd_closure(args, stdin):
    return CommandResult(OK, set_to_json(ac_closure(_int(p) for p in args.points)))


def cmd_intersect(args, stdin):
    doc = _read_json(args.sets, stdin)
    if isinstance(doc, dict):
        doc = doc.get("sets")
    if not isinstance(doc, list) or not doc:
        raise InputError("expected a non-empty list of set expressions")
    result = intersect_all([set_from_json(s) for s in doc])
    return CommandResult(OK, {"intersection": None if result is None else set_to_json(result)})


def cmd_classify(args, stdin):
    pieces, _ = cover_from_json(_read_json(args.cover, stdin))
    straw, core = _int_list(args.straw), _int_list(args.core)
    cl = classify_cover(pieces, straw, core)
    payload = {
        "n_pieces": cl.n_pieces,
        "nerve": [list(e) for e in cl.nerve],
        "star_like": cl.star_like,
        "tree_like": cl.tree_like,
        "connected": cl.connected,
        "nest": cl.nest,
        "straw": list(cl.straw),
        "core": list(cl.core),
        "nest_failures": list(cl.nest_failures),
    }
    asked = straw is not None or core is not None
    return CommandResult(PROPERTY_FAILS if asked and cl.nest is False else OK, payload)


def cmd_interp(args, stdin):
    rows = list(csv.reader(io.StringIO(_read_text(args.points, stdin))))
    pts = []
    for row in rows:
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if len(row) != 2:
            raise InputError(f"expected 'x,y' per line, got {row!r}")
        try:
            pts.append((_int(row[0].strip()), _int(row[1].strip())))
        except InputError:
            if not pts and row[0].strip().lower() == "x":
                continue  # header line
            raise
    if not pts:
        raise InputError("no points given")
    poly = interp_poly(pts)
    return CommandResult(
        OK,
        {
            "repr": "poly",
            "coeffs": list(poly.coeffs),
            "leading_divided_difference": top_divided_difference(pts),
            "newton": newton_coefficients(pts),
            "integral": is_window_lip(pts),
        },
    )


def cmd_circuit(args, stdin):
    f = function_from_json(_read_json(args.fn, stdin))
    if args.window is not None:
        f = f.restrict_points([x for x in f.values if x <= args.window])
    circ = find_circuit(f)
    if circ is None:
        pts = sorted(f.values.items())
        return CommandResult(OK, {"circuit": None, "newton": newton_coefficients(pts), "points": [x for x, _ in pts]})
    return CommandResult(
        PROPERTY_FAILS,
        {
            "circuit": list(circ.points),
            "values": [f(x) for x in circ.points],
            "leading": circ.leading,
            "denominator": circ.denominator,
        },
        "not LIP on the window",
    )


def cmd_psum(args, stdin):
    f = function_from_json(_read_json(args.fn, stdin))
    ps = product_sum_encode(f)
    return CommandResult(
        OK,
        {
            "repr": "product-sum",
            "enumeration": "increasing",
            "domain": set_to_json(f.domain),
            "window": f.window,
            "coeffs": list(ps.coeffs),
            "integral": ps.is_integral,
        },
    )


def cmd_split(args, stdin):
    U = set_from_json(_read_json(args.u, stdin))
    W = set_from_json(_read_json(args.w, stdin))
    fdoc = _read_json(args.f, stdin)
    if args.v is not None:
        V = set_from_json(_read_json(args.v, stdin))
    elif "domain" in fdoc:
        V = set_from_json(fdoc["domain"])
    else:
        raise InputError("f needs a 'domain' (the set V) or pass --v")
    coeffs = _product_sum_doc(fdoc)
    f = coeffs if coeffs is not None else function_from_json(fdoc)
    res = split_stream(f, U, W, V, args.stages)
    return CommandResult(
        OK,
        {
            "g": function_to_json(res.g),
            "h": function_to_json(res.h),
            "g_poly": {"repr": "poly", "coeffs": list(res.g_poly.coeffs)},
            "h_poly": {"repr": "poly", "coeffs": list(res.h_poly.coeffs)},
            "certificate": res.certificate,
        },
    )


def cmd_cech(args, stdin):
    pieces, cover_window = cover_from_json(_read_json(args.cover, stdin))
    window = args.window if args.window is not None else cover_window
    if window is None:
        raise InputError("window must be given in the cover or with --window")
    k = args.degree
    if args.cochain is None:
        if k < 0:
            raise InputError("degree must be non-negative")
        cx = build_cech_complex(pieces, window, max_degree=k + 1)
        H = cohomology_window(cx, k)
        payload = {
            "degree": k,
            "window": window,
            "ranks": [cx.rank(t) for t in range(k + 2)],
            "rank": H.rank,
            "torsion": list(H.torsion),
            "trivial": H.is_trivial,
            "group": str(H),
        }
        return CommandResult(OK if k == 0 or H.is_trivial else PROPERTY_FAILS, payload)
    cocycle = cochain_from_json(_read_json(args.cochain, stdin))
    if cocycle.degree != k:
        raise InputError(f"cochain has degree {cocycle.degree}, expected {k}")
    cx = build_cech_complex(pieces, window, max_degree=k + 1)
    verdict = is_coboundary(cx, cocycle)
    payload = {"is_coboundary": verdict.is_coboundary, "kind": verdict.kind or None, "certificate": verdict.certificate}
    if verdict.witness is not None:
        payload["witness"] = cochain_to_json(verdict.witness)
    return CommandResult(OK if verdict.is_coboundary else PROPERTY_FAILS, payload)


def cmd_obstruct(args, stdin):
    f = function_from_json(_read_json(args.fn, stdin))
    value = parity_obstruction(f)
    fn = next(fn for fn in load_obstruction_catalog() if fn.name.startswith("parity"))
    payload = {"functional": fn.name, "points": [1, 7, 11, 17], "signs": [1, -1, -1, 1],
               "value": value, "modulus": fn.modulus, "residue": value % fn.modulus}
    return CommandResult(PROPERTY_FAILS if value % fn.modulus else OK, payload)


def cmd_cex(args, stdin):
    schedule = [s.strip().upper() for s in args.schedule.split(",")] if args.schedule else list(DEFAULT_SCHEDULE)
    bad = [s for s in schedule if s not in MODES]
    if bad:
        raise InputError(f"unknown modes {bad}; expected {MODES}")
    res = generate_counterexample(args.steps, schedule, args.window)
    cert = certify_counterexample(res.Q)
    if args.out:
        _write_json(args.out, function_to_json(res.Q))
    if args.trace:
        _write_json(args.trace, res.trace_json())
    final = res.final
    payload = {
        "certificate": cert,
        "steps": len(res.trace) - 1,
        "schedule": schedule,
        "final": {"i": final.i, "j": final.j, "m": final.m, "k": final.k},
    }
    ok = cert["circuit"] == ["2", "4"] and all(cert["piece_lip"].values())
    return CommandResult(OK if ok else PROPERTY_FAILS, payload)


def cmd_selfcheck(args, stdin):
    """Random window functions: circuit search agrees with full-window integrality."""
    rng = random.Random(args.seed)
    mismatches = []
    for _ in range(args.count):
        n = rng.randint(1, 8)
        xs = sorted(rng.sample(range(1, 40), n))
        f = WindowFunction.from_table({x: rng.randint(-20, 20) for x in xs})
        if (find_circuit(f) is None) != is_window_lip(sorted(f.values.items())):
            mismatches.append(sorted(f.values.items()))
    return CommandResult(PROPERTY_FAILS if mismatches else OK,
                         {"seed": args.seed, "count": args.count, "mismatches": mismatches})


def _write_json(path: str, doc):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(to_jsonable(doc), fh, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


# -- dispatch ---------------------------------------------------------------------

class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kirchlip", description="Exact LIP calculus on Kirch-open sets.")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized subcommands")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("closure", help="AC closure of a point set")
    s.add_argument("points", nargs="+")
    s.set_defaults(run=cmd_closure)

    s = sub.add_parser("intersect", help="intersection of a list of set expressions")
    s.add_argument("sets")
    s.set_defaults(run=cmd_intersect)

    s = sub.add_parser("classify", help="nerve and star/tree/nest shape of a cover")
    s.add_argument("cover")
    s.add_argument("--straw")
    s.add_argument("--core")
    s.set_defaults(run=cmd_classify)

    s = sub.add_parser("interp", help="interpolation polynomial of x,y rows")
    s.add_argument("points")
    s.set_defaults(run=cmd_interp)

    s = sub.add_parser("circuit", help="locate a minimal non-integral subset")
    s.add_argument("fn")
    s.add_argument("--window", type=int)
    s.set_defaults(run=cmd_circuit)

    s = sub.add_parser("psum", help="Newton coefficients on the increasing enumeration")
    s.add_argument("fn")
    s.set_defaults(run=cmd_psum)

    s = sub.add_parser("split", help="write f = g - h with g LIP on U and h LIP on W")
    s.add_argument("--u", required=True)
    s.add_argument("--w", required=True)
    s.add_argument("--f", required=True)
    s.add_argument("--v", help="set V; defaults to the domain of f")
    s.add_argument("--stages", type=int, required=True)
    s.set_defaults(run=cmd_split)

    s = sub.add_parser("cech", help="window cohomology or coboundary test")
    s.add_argument("--cover", required=True)
    s.add_argument("--cochain")
    s.add_argument("--degree", type=int, default=1)
    s.add_argument("--window", type=int)
    s.set_defaults(run=cmd_cech)

    s = sub.add_parser("obstruct", help="f(1) - f(7) - f(11) + f(17) modulo 2")
    s.add_argument("fn")
    s.set_defaults(run=cmd_obstruct)

    s = sub.add_parser("cex", help="generate and certify the locally LIP, non-LIP function")
    s.add_argument("--steps", type=int)
    s.add_argument("--window", type=int, default=40)
    s.add_argument("--schedule", help="comma-separated modes, cycled")
    s.add_argument("--out", help="write Q here")
    s.add_argument("--trace", help="write the state trace here")
    s.set_defaults(run=cmd_cex)

    s = sub.add_parser("selfcheck", help="randomized consistency check of circuit search")
    s.add_argument("--count", type=int, default=100)
    s.set_defaults(run=cmd_selfcheck)
    return p


def run_command(argv: Sequence[str], stdin=None) -> CommandResult:
    try:
        args = build_parser().parse_args(list(argv))
    except _ArgError as exc:
        return CommandResult(INPUT_ERROR, {"error": str(exc)}, str(exc))
    try:
        return args.run(args, stdin)
    except InputError as exc:
        return CommandResult(INPUT_ERROR, {"error": str(exc)}, str(exc))
    except ResourceError as exc:
        return CommandResult(RESOURCE_ERROR, {"error": str(exc)}, str(exc))


def main(argv: Optional[Sequence[str]] = None) -> int:
    result = run_command(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(json.dumps(to_jsonable(result.payload), sort_keys=True) + "\n")
    if result.diagnostics:
        sys.stderr.write(result.diagnostics + "\n")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())

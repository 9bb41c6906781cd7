"""Command-line interface: ``wem <command> ...`` with JSON output.

Exit codes: 0 success, 1 mathematical or validation failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from fractions import Fraction
from typing import List, Optional, Sequence

from . import __version__
from .arith import MultiPolynomial
from .em1d import (em_interval, em_interval_polynomial, em_ray, em_twisted_ray,
                   polynomial_interval_sum)
from .emnd import NonRationalResultError, polynomial_em, regular_main_term, smooth_em
from .emseries import chi_series, l_series
from .functions import bump, cutoff_polynomial, polynomial_times_bump, sin_times_bump
from .groups import ConsistencyError, PolytopeGroups
from .polytope import HalfSpaceDescription, Polytope, PolytopeError, validate
from .quadrature import DEFAULT_TOLERANCE
from .serialize import parse_rational, rational_str, scalar_json

log = logging.getLogger("wem")

EXIT_OK, EXIT_FAILURE, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    """Malformed user input (exit code 2)."""


class CheckFailed(RuntimeError):
    """A requested cross-check disagreed (exit code 1)."""


# -- input parsing ------------------------------------------------------------------

def _load_json(text_or_path: str):
    """Inline JSON, or a path to a JSON file (optionally prefixed with @)."""
    source = text_or_path[1:] if text_or_path.startswith("@") else text_or_path
    try:
        if os.path.exists(source):
            with open(source, encoding="utf-8") as fh:
                return json.load(fh)
        return json.loads(text_or_path)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON from {text_or_path!r}: {exc}") from exc


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {text!r}") from exc


def _rational_list(text: Optional[str]) -> Optional[List[Fraction]]:
    if text is None:
        return None
    return [_rational(t) for t in text.split(",")]


def load_polytope(path: str) -> Polytope:
    obj = _load_json(path)
    try:
        hrep = HalfSpaceDescription.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, PolytopeError):
            raise
        raise InputError(f"malformed polytope JSON: {exc}") from exc
    return validate(hrep)


def parse_polynomial(records, n: int) -> MultiPolynomial:
    """[{"exponents": [..], "coefficient": "p/q"}, ...] into a MultiPolynomial."""
    if records is None:
        return MultiPolynomial.constant(n, 1)
    if isinstance(records, str):
        records = _load_json(records)
    if not isinstance(records, list):
        raise InputError("a polynomial is a list of {exponents, coefficient} records")
    p = MultiPolynomial(n)
    for rec in records:
        try:
            e = tuple(int(x) for x in rec["exponents"])
            c = _rational(str(rec.get("coefficient", "1")))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad monomial record {rec!r}") from exc
        if len(e) != n or any(x < 0 for x in e):
            raise InputError(f"monomial {list(e)} does not fit dimension {n}")
        p = p + MultiPolynomial.monomial(e, c)
    return p


def parse_bump(text: str, n: int):
    obj = _load_json(text)
    try:
        center = [float(_rational(str(c))) for c in obj["center"]]
        radius = obj.get("radius", 1)
        radius = [float(_rational(str(r))) for r in radius] if isinstance(radius, list) else float(_rational(str(radius)))
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad bump description {obj!r}") from exc
    if len(center) != n:
        raise InputError(f"bump center must have {n} entries")
    poly = parse_polynomial(obj["polynomial"], n) if "polynomial" in obj else None
    return polynomial_times_bump(poly, center, radius)


# -- manifest -----------------------------------------------------------------------------

def manifest(command: str, args: argparse.Namespace, started: float, **extra) -> dict:
    echo = {k: v for k, v in vars(args).items() if k not in ("func",)}
    return {
        "command": command,
        "input": echo,
        "version": __version__,
        "tolerances": {"quadrature": getattr(args, "tol", DEFAULT_TOLERANCE), "exact": 0},
        "threads": int(os.environ.get("WEM_THREADS", "1") or 1),
        "wallTime": round(time.perf_counter() - started, 6),
        **extra,
    }


def _polytope_echo(path: str):
    return _load_json(path)


# -- commands -------------------------------------------------------------------------------

def cmd_verify(args) -> dict:
    P = load_polytope(args.polytope)
    return {
        "valid": True,
        "dimension": P.dimension,
        "facets": P.facet_count,
        "vertices": [[rational_str(c) for c in v.location] for v in P.vertices],
        "regular": P.is_regular,
        "vertexGroupOrders": [P.vertex_group_order(v.index) for v in P.vertices],
    }


def cmd_sum(args) -> dict:
    P = load_polytope(args.polytope)
    p = parse_polynomial(args.poly, P.dimension)
    q = _rational(args.q)
    return {"q": rational_str(q), "weightedSum": rational_str(P.weighted_lattice_sum(p, q))}


def cmd_em(args) -> dict:
    P = load_polytope(args.polytope)
    q = _rational(args.q)
    xi = _rational_list(args.xi)
    if args.bump is not None and args.poly is not None:
        raise InputError("give either --poly or --bump")
    if args.k is not None and args.k < 2:
        raise InputError("--k must be at least 2")
    polarization = P.polarize(xi)
    out: dict = {"polarization": polarization.to_json()}
    if args.bump is not None:
        f = parse_bump(args.bump, P.dimension)
        k = args.k or 2
        r = smooth_em(P, f, q, k, xi=polarization.xi, tol=args.tol)
        out.update({
            "weightedSum": r.weighted_sum,
            "mainTerm": r.main_term,
            "remainder": r.remainder,
            "q": rational_str(q),
            "k": k,
            "ambientOrder": r.ambient_order,
            "contributions": [{"face": list(key[0]), "element": list(key[1]), "value": scalar_json(complex(v))}
                              for key, v in sorted(r.contributions.items())],
            "achievedTolerance": r.details["main_term_error"],
            "details": {key: val for key, val in r.details.items() if key != "polarization"},
        })
        return out
    p = parse_polynomial(args.poly, P.dimension)
    r = polynomial_em(P, p, q, args.k, polarization)
    out.update({
        "weightedSum": rational_str(r.weighted_sum),
        "mainTerm": rational_str(r.main_term),
        "remainder": rational_str(r.remainder),
        "q": rational_str(q),
        "k": r.k,
        "ambientOrder": r.ambient_order,
        "contributions": [{"face": list(key[0]), "element": list(key[1]), "value": scalar_json(v)}
                          for key, v in sorted(r.contributions.items())],
    })
    if q == Fraction(1, 2):
        bound = r.k + r.k % 2
        out["lOperatorAgrees"] = chi_series(q, bound) == l_series(bound)
    if args.regular_fastpath:
        if not P.is_regular:
            raise CheckFailed("--regular-fastpath needs a regular polytope")
        fast = regular_main_term(P, p, q)
        out["regularFastpath"] = rational_str(fast)
        if fast != r.main_term:
            raise CheckFailed(f"regular fast path {fast} differs from the generic main term {r.main_term}")
    if args.compare_oracle and r.remainder != 0:
        raise CheckFailed(f"main term {r.main_term} differs from the lattice sum {r.weighted_sum}")
    return out


def cmd_groups(args) -> dict:
    P = load_polytope(args.polytope)
    return PolytopeGroups(P).to_json()


def cmd_decompose(args) -> dict:
    P = load_polytope(args.polytope)
    polarization = P.polarize(_rational_list(args.xi))
    q = _rational(args.q)
    cones = []
    for pv in polarization.vertices:
        cone = P.polarized_cone(pv)
        w = pv.weights(q)
        cones.append({
            "vertex": pv.vertex,
            "apex": [rational_str(c) for c in cone.apex],
            "sign": pv.sign,
            "flipCount": pv.flip_count,
            "generators": [[rational_str(c) for c in g] for g in cone.generators],
            "weights": [rational_str(w[i]) for i in cone.labels],
        })
    return {"xi": [rational_str(x) for x in polarization.xi], "q": rational_str(q),
            "flipCounts": polarization.flip_counts, "cones": cones}


def cmd_em1d(args) -> dict:
    q = _rational(args.q)
    if args.m < 2:
        raise InputError("--m must be at least 2")
    if args.function == "poly":
        coeffs = [_rational(c) for c in args.coefficients.split(",")]
        if args.b is None:
            raise InputError("the polynomial path needs an interval --a --b")
        main = em_interval_polynomial(coeffs, args.a, args.b, q, args.m)
        total = polynomial_interval_sum(coeffs, args.a, args.b, q)
        return {"weightedSum": rational_str(total), "mainTerm": rational_str(main),
                "remainderByDifference": rational_str(total - main), "remainderByIntegral": "0",
                "k": args.m // 2, "achievedTolerance": 0,
                "parameters": {"kind": "interval-polynomial", "a": args.a, "b": args.b, "q": rational_str(q)}}
    if args.function == "bump":
        f = bump([args.center], args.radius)
    elif args.function == "sin-bump":
        f = sin_times_bump(args.center, args.radius, args.frequency)
    else:
        coeffs = [_rational(c) for c in args.coefficients.split(",")]
        f = cutoff_polynomial(coeffs, args.a, args.b if args.b is not None else args.a, args.margin)
    if args.twist is not None:
        report = em_twisted_ray(f, _rational(args.twist), q, args.m, args.a, args.tol)
    elif args.b is None:
        report = em_ray(f, args.a, q, args.m, args.tol)
    else:
        report = em_interval(f, args.a, args.b, q, args.m, args.tol)
    return report.to_json()


# -- entry point ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wem", description="Weighted Euler-Maclaurin sums on simple integral polytopes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    parser.add_argument("-o", "--output", help="write the JSON result here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="validate a polytope")
    p.add_argument("polytope", help="polytope JSON file or inline JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sum", help="weighted lattice sum of a polynomial")
    p.add_argument("polytope")
    p.add_argument("--q", required=True, help='weight, e.g. "1/2"')
    p.add_argument("--poly", help="list of {exponents, coefficient} records (default: 1)")
    p.set_defaults(func=cmd_sum)

    p = sub.add_parser("em", help="Euler-Maclaurin main term and remainder")
    p.add_argument("polytope")
    p.add_argument("--q", required=True)
    p.add_argument("--poly", help="polynomial records; exact path")
    p.add_argument("--bump", help='{"center": [...], "radius": r, "polynomial": [...]}; quadrature path')
    p.add_argument("--k", type=int, help="operator truncation (default: deg p + n + 1, or 2 for bumps)")
    p.add_argument("--xi", help="polarizing covector as comma-separated rationals")
    p.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--compare-oracle", action="store_true", help="fail unless the main term equals the lattice sum")
    p.add_argument("--regular-fastpath", action="store_true", help="also evaluate the product of chi_q operators")
    p.set_defaults(func=cmd_em)

    p = sub.add_parser("groups", help="finite groups, characters and flat subsets of every face")
    p.add_argument("polytope")
    p.set_defaults(func=cmd_groups)

    p = sub.add_parser("decompose", help="signed polarized cone decomposition")
    p.add_argument("polytope")
    p.add_argument("--xi")
    p.add_argument("--q", default="1")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("em1d", help="one-dimensional formulas on an interval, a ray or a twisted ray")
    p.add_argument("--a", type=int, default=0)
    p.add_argument("--b", type=int, help="right endpoint; omit for a ray")
    p.add_argument("--q", required=True)
    p.add_argument("--m", type=int, default=4, help="smoothness order (the twisted case uses it as k)")
    p.add_argument("--function", choices=["poly", "cutoff-poly", "bump", "sin-bump"], default="poly")
    p.add_argument("--coefficients", default="1", help="polynomial coefficients by increasing degree")
    p.add_argument("--center", type=float, default=2.0)
    p.add_argument("--radius", type=float, default=1.5)
    p.add_argument("--frequency", type=float, default=1.0)
    p.add_argument("--margin", type=float, default=1.0, help="cutoff margin around [a, b]")
    p.add_argument("--twist", help="rotation r of lambda = exp(2 pi i r) for the twisted ray")
    p.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    p.set_defaults(func=cmd_em1d)
    return parser


def _json_default(x):
    if isinstance(x, Fraction):
        return rational_str(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if hasattr(x, "item"):
        return x.item()
    return str(x)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    started = time.perf_counter()
    code = EXIT_OK
    try:
        result = args.func(args)
    except InputError as exc:
        result, code = {"error": "input", "message": str(exc)}, EXIT_INPUT
    except PolytopeError as exc:
        result, code = exc.to_json(), EXIT_FAILURE
    except (CheckFailed, NonRationalResultError, ConsistencyError) as exc:
        result, code = {"error": "mathematical", "message": str(exc)}, EXIT_FAILURE
    log.info("%s finished with exit code %d in %.3fs", args.command, code, time.perf_counter() - started)
    extra = {}
    if isinstance(result, dict):
        xi = result.get("xi") or (result.get("polarization") or {}).get("xi")
        if xi is not None:
            extra["xi"] = xi
        if "ambientOrder" in result or "ambient_order" in result:
            extra["ambientOrder"] = result.get("ambientOrder", result.get("ambient_order"))
    if getattr(args, "polytope", None) is not None and code != EXIT_INPUT:
        try:
            extra["polytope"] = _polytope_echo(args.polytope)
        except InputError:
            pass
    document = {"result": result, "manifest": manifest(args.command, args, started, **extra)}
    text = json.dumps(document, indent=2, default=_json_default)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

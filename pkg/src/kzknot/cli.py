"""Command line front end.

Exit codes: 0 success, 2 parse/config error, 3 closure is not a knot,
4 numeric non-convergence, 5 selftest failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .braid import BraidParseError, BraidWord, parse_braid, render_braid
from .circle import build_graded_basis, dims_table
from .horizontal import NotAKnotError
from .invariant import InvariantValue, compare_values, compute_Y
from .kz import TransportError

EXIT_OK, EXIT_CONFIG, EXIT_NOT_KNOT, EXIT_NUMERIC, EXIT_SELFTEST = 0, 2, 3, 4, 5

PRECISION_ENV = "KZKNOT_PRECISION"  # reserved for an extended-precision mode


class ConfigError(ValueError):
    pass


def parse_endpoints(text: str | None, n: int):
    if text is None:
        return None
    try:
        xs = tuple(Fraction(t.strip()) for t in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse endpoints {text!r}") from None
    if len(xs) != n:
        raise ConfigError(f"expected {n} endpoints, got {len(xs)}")
    if xs[0] <= 0 or any(a >= b for a, b in zip(xs, xs[1:])):
        raise ConfigError("endpoints must be positive and strictly increasing")
    return xs


def _scalar_json(x):
    if isinstance(x, Fraction):
        return [str(x), "0"]
    c = complex(x)
    return [c.real, c.imag]


def invariant_json(y: InvariantValue, b: BraidWord) -> dict:
    return {
        "strands": b.strand_count,
        "braid": render_braid(b),
        "degree": y.N,
        "basis": [str(d) for ds in y.basis for d in ds],
        "coords": [_scalar_json(c) for c in y.flat()],
        "error": list(y.errors),
    }


def parse_coords(doc: dict) -> list:
    """Inverse of the ``coords`` encoding: Fractions for exact output, complex otherwise."""
    out = []
    for re_, im in doc["coords"]:
        if isinstance(re_, str):
            out.append(Fraction(re_) + Fraction(im))
        else:
            out.append(complex(re_, im))
    return out


def _fmt(c) -> str:
    if isinstance(c, Fraction):
        return str(c)
    c = complex(c)
    return f"{c.real:.12g}{c.imag:+.3g}i"


def invariant_text(y: InvariantValue, b: BraidWord) -> str:
    lines = [f"braid: {render_braid(b) or '(trivial)'} on {b.strand_count} strands; degree {y.N}"]
    for m in range(y.N + 1):
        for d, c in zip(y.basis[m], y.coords[m]):
            lines.append(f"m={m} {d} {_fmt(c)} +/- {y.errors[m]:.3g}")
    return "\n".join(lines)


def _braid_from(args, which: str = "") -> BraidWord:
    text = getattr(args, f"braid{which}")
    n = getattr(args, f"strands{which}")
    if text is None:
        raise ConfigError(f"--braid{which} is required")
    if n is None:
        tokens = text.split()
        try:
            n = max((abs(int(t)) for t in tokens), default=0) + 1
        except ValueError:
            n = 1
    return parse_braid(text, n)


def _check_common(args) -> None:
    if args.degree < 0:
        raise ConfigError("--degree must be >= 0")
    if args.tol <= 0:
        raise ConfigError("--tol must be positive")


def cmd_dims(args) -> int:
    if args.degree < 0:
        raise ConfigError("--degree must be >= 0")
    rows = dims_table(args.degree)
    if args.format == "json":
        doc = {"rows": rows, "basis": build_graded_basis(args.degree).to_json()}
        print(json.dumps(doc, indent=2))
    else:
        print(f"{'m':>2} {'diagrams':>8} {'4T rank':>7} {'dim A_m':>7} {'dim quot':>8}")
        for r in rows:
            print(f"{r['m']:>2} {r['diagrams']:>8} {r['relation_rank']:>7} {r['dim_A']:>7} {r['dim_quotient']:>8}")
    return EXIT_OK


def cmd_invariant(args) -> int:
    _check_common(args)
    b = _braid_from(args)
    ep = parse_endpoints(args.endpoints, b.strand_count)
    y = compute_Y(b, ep, args.degree, args.tol)
    if args.format == "json":
        print(json.dumps(invariant_json(y, b)))
    else:
        print(invariant_text(y, b))
    return EXIT_OK


def cmd_compare(args) -> int:
    _check_common(args)
    b1, b2 = _braid_from(args), _braid_from(args, "2")
    y1 = compute_Y(b1, parse_endpoints(args.endpoints, b1.strand_count), args.degree, args.tol)
    y2 = compute_Y(b2, parse_endpoints(args.endpoints2, b2.strand_count), args.degree, args.tol)
    cv = compare_values(y1, y2)
    doc = {
        "verdict": cv.verdict.value,
        "distances": [list(d) for d in cv.distances],
        "bounds": [list(b) for b in cv.bounds],
        "first": invariant_json(y1, b1),
        "second": invariant_json(y2, b2),
    }
    if args.format == "json":
        print(json.dumps(doc))
    else:
        print(f"{cv.verdict.value} max_distance={cv.max_distance:.6g} bound={cv.combined_bound:.3g}")
        print(json.dumps(doc, indent=2))
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .checks import run_selftest

    _check_common(args)
    reports = run_selftest(args.degree, args.tol)
    failed = [r for r in reports if r.status == "FAIL"]
    for r in reports:
        extra = f" dist={r.max_distance:.3g} bound={r.bound:.3g}" if r.bound or r.max_distance else ""
        note = f" ({r.detail})" if r.detail else ""
        print(f"{r.status:<13} {r.name}{extra}{note}")
    counts = {s: sum(r.status == s for r in reports) for s in ("PASS", "FAIL", "INDETERMINATE", "SKIPPED")}
    print(" ".join(f"{k.lower()}={v}" for k, v in counts.items()))
    return EXIT_SELFTEST if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kzknot", description="Knot invariant from the KZ transport along braids.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degree", type=int, default=3, help="truncation degree N (default 3)")
    common.add_argument("--tol", type=float, default=1e-10, help="local ODE tolerance (default 1e-10)")
    common.add_argument("--format", choices=("text", "json"), default="text")

    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("dims", parents=[common], help="dimensions of A_m and of the quotient")
    s.set_defaults(func=cmd_dims)

    s = sub.add_parser("invariant", parents=[common], help="compute Y for a braid")
    s.add_argument("--braid", required=True, help="e.g. '1 1 1'")
    s.add_argument("--strands", type=int)
    s.add_argument("--endpoints", help="comma separated, e.g. '1,2,3'")
    s.set_defaults(func=cmd_invariant)

    s = sub.add_parser("compare", parents=[common], help="compare Y of two braids")
    s.add_argument("--braid", required=True)
    s.add_argument("--strands", type=int)
    s.add_argument("--braid2", required=True)
    s.add_argument("--strands2", type=int)
    s.add_argument("--endpoints")
    s.add_argument("--endpoints2")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("selftest", parents=[common], help="run the verification suites")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    if os.environ.get(PRECISION_ENV) not in (None, "", "double"):
        print(f"error: {PRECISION_ENV}={os.environ[PRECISION_ENV]!r} is not supported (only 'double')", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (BraidParseError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NotAKnotError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NOT_KNOT
    except TransportError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

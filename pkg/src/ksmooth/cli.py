"""Command line entry point: ``ksmooth <command> ...``.

Reports go to stdout as JSON, a short human summary to stderr.  Failures
print ``{"error": {"type": ..., "message": ...}}`` to stdout and exit with
2 (bad input), 3 (unsupported or other domain error) or 4 (methods disagree).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from typing import Any

from . import numeric as nm
from .errors import Disagreement, KSmoothError, ParseError
from .fuzz import run_fuzz
from .operators import attainment_ext
from .order import METHODS, crosscheck, smoothness_order
from .problem import (
    SCALAR_MODES,
    Options,
    is_lp_json,
    load_json,
    operator_to_json,
    parse_vector,
    problem_from_json,
    space_from_json,
)
from .smoothness import bj_orthogonal, supporting_face
from .verify import format_table, run_all

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_UNSUPPORTED = 3
EXIT_DISAGREE = 4

# vectors such as "-1,1" would otherwise be taken for options
_NEGATIVE_VALUE = re.compile(r"-(\d|\(|sqrt2)")


def _emit(obj: Any) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _say(text: str) -> None:
    print(text, file=sys.stderr)


def _unwrap(doc: Any, key: str) -> Any:
    # fixture files wrap the document under "problem" or "space"
    if isinstance(doc, dict) and key in doc and isinstance(doc[key], dict):
        return doc[key]
    return doc


def _vec(v) -> list:
    return [nm.scalar_print(c) for c in v]


def _load_space(path: str, mode: str | None):
    doc = _unwrap(load_json(path), "space")
    if mode is None:
        mode = "float" if is_lp_json(doc) else "exact"
    return space_from_json(doc, mode, name=path), mode


def _load_operator(args):
    overrides = Options(args.scalar, args.eps, getattr(args, "method", "auto"))
    problem = problem_from_json(_unwrap(load_json(args.file), "problem"), overrides)
    if problem.options.eps is not None:
        nm.set_eps(problem.options.eps)
    return problem


def cmd_order(args) -> int:
    problem = _load_operator(args)
    T = problem.operator()
    method = problem.options.method
    if method == "crosscheck":
        joint = crosscheck(T)
        rep = joint.preferred
        out = rep.to_dict()
        out["crosscheck"] = {name: r.k for name, r in joint.reports.items()}
    else:
        rep = smoothness_order(T, method)
        out = rep.to_dict()
    _emit(out)
    _say(
        f"k = {rep.k} via {rep.method.value}; ||T|| = {nm.scalar_print(rep.op_norm)}; "
        f"{rep.attainment.r} attainment point(s)"
    )
    return EXIT_OK


def cmd_vector_order(args) -> int:
    space, mode = _load_space(args.space, args.scalar)
    x = parse_vector(args.vector, mode)
    face = supporting_face(space, x)
    _emit({
        "order": face.order,
        "smooth": face.smooth,
        "point": _vec(face.point),
        "ext_functionals": [_vec(f) for f in face.ext_functionals],
    })
    _say(f"order {face.order}")
    return EXIT_OK


def cmd_bj(args) -> int:
    space, mode = _load_space(args.space, args.scalar)
    x = parse_vector(args.x, mode)
    y = parse_vector(args.y, mode)
    result = bj_orthogonal(space, x, y)
    _emit({"orthogonal": result})
    _say(f"x is {'' if result else 'not '}Birkhoff-James orthogonal to y")
    return EXIT_OK


def cmd_attain(args) -> int:
    problem = _load_operator(args)
    att = attainment_ext(problem.operator())
    _emit({
        "op_norm": nm.scalar_print(att.op_norm),
        "r": att.r,
        "exact": att.exact,
        "points": [_vec(x) for x in att.canonical_points],
        "image_orders": [f.order for f in att.faces],
        "notes": list(att.notes),
    })
    _say(f"||T|| = {nm.scalar_print(att.op_norm)} attained at {att.r} canonical extreme point(s)")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_all(args.fixtures)
    print(format_table(results))
    if not results:
        _say("no fixtures found")
        return EXIT_FAIL
    failed = [r.name for r in results if not r.passed]
    if failed:
        _say("failing fixtures: " + ", ".join(failed))
        return EXIT_FAIL
    return EXIT_OK


def cmd_fuzz(args) -> int:
    if args.count < 1:
        raise ParseError("--count must be at least 1")
    summary = run_fuzz(args.count, args.seed)
    _say(summary.text())
    worst = summary.minimal_failure()
    if worst is None:
        return EXIT_OK
    doc = operator_to_json(worst.operator)
    doc["options"] = {"scalar_mode": "exact", "method": "crosscheck"}
    _say(f"smallest failing instance: #{worst.index} ({worst.kind}), {worst.error.splitlines()[0]}")
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(doc, fh, indent=2)
        _say(f"counterexample written to {args.output}")
    _emit(doc)
    return EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ksmooth", description="Order of smoothness of operators between finite-dimensional spaces."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def numeric_opts(p):
        p.add_argument("--scalar", choices=SCALAR_MODES, default=None,
                       help="scalar mode (default: exact, float for l_p inputs)")
        p.add_argument("--eps", type=float, default=None, help="float tolerance")

    p = sub.add_parser("order", help="order of smoothness of an operator")
    p.add_argument("file", help="problem JSON")
    p.add_argument("--method", choices=METHODS, default="auto")
    numeric_opts(p)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("vector-order", help="order of smoothness of a unit vector")
    p.add_argument("space", help="space JSON")
    p.add_argument("vector", help='e.g. "1,1,1" or \'["1/2","sqrt2"]\'')
    numeric_opts(p)
    p.set_defaults(func=cmd_vector_order)

    p = sub.add_parser("bj", help="Birkhoff-James orthogonality of x to y")
    p.add_argument("space")
    p.add_argument("x")
    p.add_argument("y")
    numeric_opts(p)
    p.set_defaults(func=cmd_bj)

    p = sub.add_parser("attain", help="norm-attaining extreme points of an operator")
    p.add_argument("file")
    numeric_opts(p)
    p.set_defaults(func=cmd_attain)

    p = sub.add_parser("verify", help="replay the bundled fixtures")
    p.add_argument("--fixtures", default=None, help="fixture directory (default: bundled)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fuzz", help="randomized agreement test of all methods")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--output", default=None, help="also write the counterexample here")
    p.set_defaults(func=cmd_fuzz)
    return parser


def _error(exc: BaseException, code: int) -> int:
    err: dict = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, Disagreement):
        err["k"] = {name: rep.k for name, rep in exc.reports.items()}
    _emit({"error": err, "exit_code": code})
    _say(f"error: {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
    return code


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    argv = [" " + a if _NEGATIVE_VALUE.match(a) else a for a in argv]
    args = build_parser().parse_args(argv)
    env = os.environ.get("KSMOOTH_EPS")
    try:
        if env:
            try:
                nm.set_eps(float(env))
            except ValueError as exc:
                raise ParseError(f"KSMOOTH_EPS={env!r} is not a positive number") from exc
        return args.func(args)
    except ParseError as exc:
        return _error(exc, EXIT_PARSE)
    except Disagreement as exc:
        return _error(exc, EXIT_DISAGREE)
    except KSmoothError as exc:
        return _error(exc, EXIT_UNSUPPORTED)
    except ValueError as exc:
        # e.g. --eps 0
        return _error(ParseError(str(exc)), EXIT_PARSE)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: ``sp2sp1 <command> [options]``.

Data goes to standard output (or ``--output``), errors to standard error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import suites
from .errors import (
    ClassificationError,
    InadmissibleTupleError,
    PoleError,
    PreconditionError,
    StructuralError,
    UnsupportedDimensionError,
)
from .hherm import PAIR_LABELS, PAIRS, check_hyperhermitian, mlambda, moore_det, moore_eigenvalues, moore_rank
from .invariants import DIMENSIONS, EIGEN_TABLE, dimension_table
from .orbit import classify, frame_from_angles, frame_from_json, frame_to_json, lambda_from_angles, reconstruct
from .spectral import casimir_eigenvalue, identity_names
from .valuation import body_from_json, evaluate, make_basis_valuation

EXIT_INPUT = 2
EXIT_FAIL = 1


class InputError(Exception):
    pass


def _load_json(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _emit(args, payload, rows=None, header=None):
    if args.format == "tsv" and rows is not None:
        lines = ["\t".join(header)] if header else []
        lines += ["\t".join(str(x) for x in row) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _lambda_json(lam):
    k = {1: 2, 3: 3, 6: 4}[len(lam)]
    return {PAIR_LABELS[pq]: float(x) for pq, x in zip(PAIRS[k], lam)}


def _parse_lambda(values):
    lam = np.array(values, dtype=float)
    if len(lam) not in (1, 3, 6):
        raise InputError(f"a lambda tuple has 1, 3 or 6 entries, got {len(lam)}")
    return lam


# commands ---------------------------------------------------------------------

def cmd_classify(args):
    F = frame_from_json(_load_json(args.frame))
    c = classify(F, args.tol)
    payload = c.to_json()
    rows = [[lab, v] for lab, v in payload["lambda"].items()]
    rows += [["residual", payload["residual"]], ["degenerate", payload["degenerate"]]]
    _emit(args, payload, rows, ["key", "value"])
    return 0


def cmd_reconstruct(args):
    lam = _parse_lambda(args.lam)
    F = reconstruct(lam)
    _emit(args, frame_to_json(F), [list(col) for col in F.T])
    return 0


def cmd_angles(args):
    theta = np.array(args.theta, dtype=float)
    F = frame_from_angles(len(theta), theta)
    lam = lambda_from_angles(theta)
    payload = {"frame": frame_to_json(F), "lambda": _lambda_json(lam)}
    _emit(args, payload, [[lab, v] for lab, v in payload["lambda"].items()], ["pair", "lambda"])
    return 0


def cmd_moore(args):
    if args.matrix:
        Q = np.array(_load_json(args.matrix)["matrix"], dtype=float)
        Q = check_hyperhermitian(Q)
    else:
        Q = mlambda(_parse_lambda(args.lam))
    w = moore_eigenvalues(Q)
    payload = {
        "eigenvalues": [float(x) for x in w],
        "determinant": float(moore_det(Q)),
        "rank": int(moore_rank(Q, args.tol)),
    }
    rows = [["eigenvalue", float(x)] for x in w] + [["determinant", payload["determinant"]], ["rank", payload["rank"]]]
    _emit(args, payload, rows, ["quantity", "value"])
    return 0


def _combination(row):
    terms = []
    for i, c in enumerate(row.coeffs):
        if c:
            terms.append(f"{c:+d}*f_{row.k},{i}")
    return " ".join(terms).lstrip("+")


def cmd_tables(args):
    which = args.which
    if which == "dims":
        dims = dimension_table()
        payload = {"k": list(range(len(dims))), "dim": list(dims), "line": " ".join(map(str, dims))}
        _emit(args, payload, [[k, d] for k, d in enumerate(dims)], ["k", "dim"])
    elif which == "multipliers":
        rows = suites.multiplier_rows()
        _emit(
            args,
            rows,
            [[r["k"], "(" + ",".join(map(str, r["weight"])) + ")", r["exact"], repr(r["value"])] for r in rows],
            ["k", "weight", "exact", "value"],
        )
    elif which == "eigenvalues":
        rows = []
        for k, table in EIGEN_TABLE.items():
            for row in table:
                rows.append(
                    {
                        "k": k,
                        "eigenfunction": _combination(row),
                        "eigenvalue": row.eigenvalue,
                        "weight": list(row.weight),
                        "casimir": casimir_eigenvalue(row.weight),
                    }
                )
        _emit(
            args,
            rows,
            [[r["k"], r["eigenfunction"], r["eigenvalue"], "(" + ",".join(map(str, r["weight"])) + ")"] for r in rows],
            ["k", "eigenfunction", "eigenvalue", "weight"],
        )
    elif which == "laplacian":
        rows = []
        for k in (2, 3, 4):
            for name in identity_names(k):
                rows.append({"k": k, "identity": name})
        _emit(args, rows, [[r["k"], r["identity"]] for r in rows], ["k", "identity"])
    return 0


def _verify_plan(args):
    samples = args.samples
    plan = {
        "moore": lambda: suites.moore_suite(seed=args.seed),
        "orbit": lambda: suites.orbit_suite(seed=args.seed),
        "laplacian": lambda: suites.laplacian_suite(seed=args.seed, h=args.h, tol=args.tol_fd),
        "eigen": lambda: suites.eigen_suite(seed=args.seed, h=args.h, tol=args.tol_fd),
        "casimir": suites.casimir_suite,
        "multipliers": suites.multiplier_suite,
        "volume": lambda: suites.volume_suite(seed=args.seed),
        "cosine": lambda: suites.cosine_suite(samples, args.seed, args.workers),
        "crofton": lambda: suites.crofton_suite(samples, args.planes, args.seed),
    }
    groups = {
        "orbit": ("moore", "orbit"),
        "laplacian": ("laplacian", "eigen", "casimir", "volume"),
        "cosine": ("multipliers", "cosine"),
        "crofton": ("crofton",),
        "all": suites.SUITES,
    }
    names = groups.get(args.suite, (args.suite,))
    return [(n, plan[n]) for n in names]


def cmd_verify(args):
    report = {}
    ok = True
    for name, run in _verify_plan(args):
        checks = run()
        report[name] = checks
        ok = ok and all(c["pass"] for c in checks)
        for c in checks:
            if not c["pass"]:
                print(f"FAIL [{name}] {c.get('check') or c.get('identity_name')}", file=sys.stderr)
    payload = {"seed": args.seed, "samples": args.samples, "h": args.h, "pass": ok, "suites": report}
    rows = [[n, c.get("check") or c.get("identity_name"), c["pass"]] for n, cs in report.items() for c in cs]
    _emit(args, payload, rows, ["suite", "check", "pass"])
    return 0 if ok else EXIT_FAIL


def cmd_crofton_eval(args):
    body = body_from_json(_load_json(args.body))
    k, i = args.k, args.i
    if not 0 <= k < len(DIMENSIONS) or not 0 <= i < DIMENSIONS[k]:
        raise InputError(f"no basis valuation phi[{k},{i}]")
    r = evaluate(make_basis_valuation(k, i), body, args.samples, args.seed)
    payload = {"valuation": f"phi[{k},{i}]", "estimate": r.estimate, "std_error": r.std_error, "N": r.n, "seed": args.seed}
    _emit(args, payload, [[payload["valuation"], r.estimate, r.std_error, r.n, args.seed]], ["valuation", "estimate", "std_error", "N", "seed"])
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--samples", type=int, default=10**5, help="Monte Carlo sample count")
    common.add_argument("--tol", type=float, default=None, help="numerical tolerance")
    common.add_argument("--h", type=float, default=1e-3, help="finite-difference step")
    common.add_argument("--format", choices=("json", "tsv"), default="json")
    common.add_argument("--output", default=None, help="write to this file instead of stdout")

    p = argparse.ArgumentParser(prog="sp2sp1", description="Sp(2)Sp(1)-orbits and invariant valuations on H^2.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("classify", parents=[common], help="orbit invariant of a frame file")
    s.add_argument("frame", help="frame JSON file")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("reconstruct", parents=[common], help="frame with Gram matrix M_lambda")
    s.add_argument("lam", nargs="+", type=float, metavar="LAMBDA")
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("angles", parents=[common], help="frame and lambda from torus angles")
    s.add_argument("theta", nargs="+", type=float)
    s.set_defaults(func=cmd_angles)

    s = sub.add_parser("moore", parents=[common], help="Moore eigenvalues of M_lambda or a matrix file")
    s.add_argument("lam", nargs="*", type=float, metavar="LAMBDA")
    s.add_argument("--matrix", help='JSON file {"matrix": k x k x 4 nested list}')
    s.set_defaults(func=cmd_moore)

    s = sub.add_parser("tables", parents=[common], help="recompute a table")
    s.add_argument("which", choices=("dims", "multipliers", "eigenvalues", "laplacian"))
    s.set_defaults(func=cmd_tables)

    s = sub.add_parser("verify", parents=[common], help="run verification suites")
    s.add_argument("suite", nargs="?", default="all", choices=("orbit", "laplacian", "cosine", "crofton", "all") + suites.SUITES)
    s.add_argument("--planes", type=int, default=10, help="random planes per valuation (crofton)")
    s.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo (result is independent of this)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("crofton-eval", parents=[common], help="evaluate a basis valuation on a body")
    s.add_argument("body", help="body JSON file")
    s.add_argument("k", type=int)
    s.add_argument("i", type=int)
    s.set_defaults(func=cmd_crofton_eval)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.samples < 1 or (args.tol is not None and args.tol <= 0):
        print("error: --samples must be >= 1 and --tol > 0", file=sys.stderr)
        return EXIT_INPUT
    if args.command == "classify" and args.tol is None:
        args.tol = 1e-12
    args.tol_fd = args.tol if args.tol is not None else 1e-3
    if args.command == "moore" and not args.matrix and not args.lam:
        print("error: give a lambda tuple or --matrix", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (UnsupportedDimensionError, PreconditionError, InadmissibleTupleError, StructuralError, PoleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ClassificationError as exc:
        print(f"error: {exc} (residual {exc.residual:.3e})", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

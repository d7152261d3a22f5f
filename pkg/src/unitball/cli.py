"""Command-line front end: file I/O, analyses, JSON reports.

Four subcommands:

* ``check-extreme``: extreme-point test for a matrix file, over the full
  matrix algebra or a user-supplied *-subalgebra basis.
* ``classify``: the complete preserver pipeline for a superoperator file,
  cross-checked against the independent sampling falsifier.
* ``make``: write a generated instance (preservers, Jordan embeddings,
  pinchings, perturbations, contractions) as a superoperator file.
* ``verify-identities``: standalone audit of the structural identities a
  preserver must satisfy, with per-identity max residuals.

Machine-readable reports go to stdout as JSON; a one-line human summary
goes to stderr (colored when stderr is a terminal, unless NO_COLOR is
set).  Exit codes form a closed contract: 0 affirmative, 1 negative,
2 inconclusive or out of theorem scope, 64 usage error, 65 malformed
input file.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import __version__, serialize as ser
from .extremal import ExtremeVerdict, StarAlgebraBasis, classify_isometry, kadison_extreme_test
from .gen import InstanceKind, InstanceSpec, derive_seed, generate
from .linalg import Tolerance, unitarity_defect
from .preserver import PreserverVerdict, classify_preserver, falsify_by_sampling, identity_residuals
from .superop import apply

__all__ = ["main", "EXIT_OK", "EXIT_NEGATIVE", "EXIT_INCONCLUSIVE", "EXIT_USAGE", "EXIT_DATA"]

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64
EXIT_DATA = 65

_VERDICT_COLORS = {EXIT_OK: "32", EXIT_NEGATIVE: "31", EXIT_INCONCLUSIVE: "33"}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; the contract reserves 2 for verdicts."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(report_obj: dict, summary: str, code: int) -> int:
    print(ser.dump_json(report_obj))
    if sys.stderr.isatty() and not os.environ.get("NO_COLOR"):
        color = _VERDICT_COLORS.get(code, "0")
        summary = f"\x1b[{color}m{summary}\x1b[0m"
    print(summary, file=sys.stderr)
    return code


def _cmd_check_extreme(args) -> int:
    tol = Tolerance(abs=args.tol)
    a = ser.matrix_from_obj(ser.load_json(args.matrix))
    t0 = time.perf_counter()

    if a.shape[0] != a.shape[1]:
        iso = classify_isometry(a, tol)
        report = {
            "run": ser.run_info(tol, None, time.perf_counter() - t0),
            "isometry_class": iso.value,
            "verdict": ExtremeVerdict.INCONCLUSIVE.value,
            "reason": "nonsquare-matrix",
        }
        return _emit(report, f"Inconclusive: {a.shape[0]}x{a.shape[1]} matrix is not in a matrix algebra", EXIT_INCONCLUSIVE)

    if args.algebra == "full":
        basis = StarAlgebraBasis.full(a.shape[0])
    else:
        dim, elems = ser.algebra_elements_from_obj(ser.load_json(args.algebra))
        if dim != a.shape[0]:
            raise ser.FormatError(
                f"algebra sits in M_{dim} but the matrix is {a.shape[0]}x{a.shape[1]}"
            )
        try:
            basis = StarAlgebraBasis(elems, tol)
        except ValueError as exc:
            raise ser.FormatError(f"algebra file: {exc}") from exc

    rep = kadison_extreme_test(a, basis, tol)
    report = {
        "run": ser.run_info(tol, None, time.perf_counter() - t0),
        "isometry_class": classify_isometry(a, tol).value,
        "report": ser.extreme_report_to_obj(rep),
    }
    code = {
        ExtremeVerdict.EXTREME: EXIT_OK,
        ExtremeVerdict.NOT_EXTREME: EXIT_NEGATIVE,
        ExtremeVerdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
    }[rep.verdict]
    return _emit(report, f"{rep.verdict.value}: kadison residual {rep.kadison_residual:.3e}", code)


def _cmd_classify(args) -> int:
    tol = Tolerance(abs=args.tol)
    phi = ser.superop_from_obj(ser.load_json(args.superop))
    t0 = time.perf_counter()

    cert = classify_preserver(phi, tol, seed=args.seed)
    report = {"certificate": ser.certificate_to_obj(cert)}

    if phi.is_square:
        witness = falsify_by_sampling(
            phi, trials=args.falsify_trials, seed=derive_seed(args.seed, "falsify"), tol=tol
        )
        cross = {
            "trials": args.falsify_trials,
            "witness_found": witness is not None,
            # The falsifier is one-sided: a found witness refutes the
            # preserver property, while exhausting the budget proves
            # nothing.  Disagreement therefore means exactly one thing.
            "agrees": not (witness is not None and cert.verdict is PreserverVerdict.PRESERVER),
        }
        if witness is not None:
            cross["witness"] = ser.matrix_to_obj(witness)
            cross["witness_defect"] = unitarity_defect(apply(phi, witness))
        report["cross_check"] = cross

    report["run"] = ser.run_info(tol, args.seed, time.perf_counter() - t0)
    code = {
        PreserverVerdict.PRESERVER: EXIT_OK,
        PreserverVerdict.NOT_PRESERVER: EXIT_NEGATIVE,
        PreserverVerdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
    }[cert.verdict]
    detail = cert.reason or f"kind {cert.kind.value}"
    return _emit(report, f"{cert.verdict.value}: {detail}", code)


def _cmd_make(args) -> int:
    try:
        spec = InstanceSpec(
            n=args.n,
            kind=InstanceKind(args.kind),
            seed=args.seed,
            p=args.p,
            q=args.q,
            epsilon=args.epsilon,
        )
    except ValueError as exc:
        print(f"make: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    phi = generate(spec)
    obj = ser.superop_to_obj(phi)
    obj["meta"] = {"instance": ser.instance_spec_to_obj(spec)}

    echo = {"instance": ser.instance_spec_to_obj(spec), "dim_in": phi.dim_in, "dim_out": phi.dim_out}
    if args.out:
        ser.save_json(args.out, obj)
        echo["out"] = args.out
        print(ser.dump_json(echo))
    else:
        print(ser.dump_json(obj))
        print(f"generated {spec.kind.value} instance, seed {spec.seed}", file=sys.stderr)
        return EXIT_OK
    print(f"wrote {spec.kind.value} instance to {args.out}", file=sys.stderr)
    return EXIT_OK


def _cmd_verify_identities(args) -> int:
    phi = ser.superop_from_obj(ser.load_json(args.superop))
    t0 = time.perf_counter()

    if not phi.is_square:
        report = {
            "run": ser.run_info(Tolerance(abs=args.tol), args.seed, time.perf_counter() - t0),
            "verdict": "Inconclusive",
            "reason": "theorem-scope",
        }
        return _emit(report, "Inconclusive: identities are stated for endomorphisms", EXIT_INCONCLUSIVE)

    residuals = identity_residuals(phi, samples=args.samples, seed=args.seed)
    ok = all(r <= args.tol for r in residuals.values())
    report = {
        "run": ser.run_info(Tolerance(abs=args.tol), args.seed, time.perf_counter() - t0),
        "samples": args.samples,
        "tol": args.tol,
        "residuals": residuals,
        "pass": ok,
    }
    worst = max(residuals, key=residuals.get)
    verdict = "all identities hold" if ok else f"{worst} residual {residuals[worst]:.3e}"
    return _emit(report, f"{'PASS' if ok else 'FAIL'}: {verdict}", EXIT_OK if ok else EXIT_NEGATIVE)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="unitball",
        description="Extreme points of matrix unit balls and the linear maps preserving them.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check-extreme", help="extreme-point test for a matrix file")
    p.add_argument("matrix", help="path to a matrix JSON file")
    p.add_argument(
        "--algebra",
        default="full",
        help='"full" for all of M_n (default) or a path to an algebra basis file',
    )
    p.add_argument("--tol", type=float, default=1e-8, help="absolute tolerance (default 1e-8)")
    p.set_defaults(func=_cmd_check_extreme)

    p = sub.add_parser("classify", help="preserver pipeline for a superoperator file")
    p.add_argument("superop", help="path to a superoperator JSON file")
    p.add_argument("--tol", type=float, default=1e-8, help="absolute tolerance (default 1e-8)")
    p.add_argument("--seed", type=int, default=0, help="seed for witness search and cross-check")
    p.add_argument(
        "--falsify-trials",
        type=int,
        default=100,
        help="sampling budget for the independent falsifier (default 100)",
    )
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("make", help="generate an instance and write it as a superoperator file")
    p.add_argument("--kind", required=True, choices=[k.value for k in InstanceKind])
    p.add_argument("--n", type=int, required=True, help="base matrix dimension")
    p.add_argument("--p", type=int, default=0, help="identity-block multiplicity (mixed kind)")
    p.add_argument("--q", type=int, default=0, help="transpose-block multiplicity (mixed kind)")
    p.add_argument("--epsilon", type=float, default=0.0, help="perturbation size (perturbed kind)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default: write the file to stdout)")
    p.set_defaults(func=_cmd_make)

    p = sub.add_parser("verify-identities", help="audit the structural preserver identities")
    p.add_argument("superop", help="path to a superoperator JSON file")
    p.add_argument("--samples", type=int, default=50, help="sampled inputs per identity")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8, help="pass threshold (default 1e-8)")
    p.set_defaults(func=_cmd_verify_identities)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (None, 0) else int(exc.code)
    try:
        return args.func(args)
    except ser.FormatError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Exit codes: 0 all checks pass / split, 1 suite checks failed, 2 obstructed,
3 invalid input, 4 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .io import TensorParseError, dumps, read_tensor
from .model import ModelError, build_model, nowhere_split_certificates, sample_points
from .splitting import SplitInputError, iterative_split_acs, iterative_split_metric
from .suite import SUITES, ConfigError, SuiteConfig, run_paper_suite
from .tensors import MetricTensor, TensorError, check_acs, check_metric

EXIT_OK, EXIT_FAILED, EXIT_OBSTRUCTED, EXIT_INVALID, EXIT_USAGE = 0, 1, 2, 3, 4
REPORT_DIR_ENV = "NONSPLIT_REPORT_DIR"

EXAMPLE_KINDS = ("model", "acs", "metric", "JR", "gR", "Y_eta", "W_eta")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _points(text: str) -> int | list:
    """A count of random points, or a JSON list of explicit points."""
    try:
        return _nonneg_int(text)
    except argparse.ArgumentTypeError:
        pass
    try:
        pts = json.loads(text)
        return [[Fraction(str(v)) for v in pt] for pt in pts]
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"expected a count or a JSON list of points: {exc}")


def _resolve_points(spec, p: int, seed: int) -> list:
    if isinstance(spec, int):
        return sample_points(p, spec, seed)
    for pt in spec:
        if len(pt) != p:
            raise UsageError(f"sample point {[str(v) for v in pt]} must have {p} coordinates")
    return spec


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nonsplit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, n_default=3, bound_default=None):
        p.add_argument("--n", type=_positive_int, default=n_default)
        p.add_argument("--degree-bound", type=_nonneg_int, default=bound_default)
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--points", type=_points, default=10,
                       help="number of random rational sample points, or a JSON list of points")
        p.add_argument("--out", help=f"report path (relative paths resolve under ${REPORT_DIR_ENV})")

    p = sub.add_parser("suite", help="run the verification suite")
    common(p, bound_default=3)
    p.add_argument("--suites", default=",".join(SUITES),
                   help=f"comma-separated subset of {','.join(SUITES)}")
    p.add_argument("--samples", type=_positive_int, default=5)
    p.add_argument("--timings", action="store_true", help="include wall times in the report")

    p = sub.add_parser("split", help="run the degree-by-degree splitting procedure")
    p.add_argument("file")
    common(p)

    p = sub.add_parser("check", help="validity report for a tensor file")
    p.add_argument("file")
    p.add_argument("--out")

    p = sub.add_parser("build-example", help="write a model tensor as JSON")
    p.add_argument("--kind", choices=EXAMPLE_KINDS, default="acs")
    common(p)

    p = sub.add_parser("eval", help="certificate pairings at sample points")
    p.add_argument("file", nargs="?", help="tensor to evaluate instead of the certificates")
    common(p)
    return parser


def _report_path(out: str | None, command: str) -> Path | None:
    base = os.environ.get(REPORT_DIR_ENV)
    if out is None:
        return Path(base) / f"{command}-report.json" if base else None
    path = Path(out)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def _emit(obj, args, command: str, summary: list[str] | None = None) -> None:
    text = dumps(obj)
    path = _report_path(getattr(args, "out", None), command)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        for line in summary or [f"report written to {path}"]:
            print(line)
    else:
        sys.stdout.write(text)


def _model_certificate_hook(p: int, q: int, points):
    """Form-model pairing of an obstructed residual, when the signature is ``(2n, 2n)``."""
    if p != q or p % 2:
        return None
    model = build_model(p // 2)

    def hook(degree, residual):
        val = residual.apply(model.pi_xi_JM).apply(model.eta)
        out = {"pairing": {"expression": "residual(pi(xi_JM))(eta)", "value": val.to_json(),
                           "points": [val.evaluate_at_point(pt).to_json() for pt in points]}}
        if model.n > 2:
            out["theorem"] = nowhere_split_certificates(model, points).to_json()
        return out

    return hook


def cmd_suite(args) -> int:
    suites = tuple(s for s in args.suites.split(",") if s)
    config = SuiteConfig(n=args.n, degree_bound=args.degree_bound, seed=args.seed,
                         points=args.points, suites=suites, samples=args.samples,
                         timings=args.timings)
    try:
        config.validate()
    except ConfigError as exc:
        raise UsageError(str(exc))
    report = run_paper_suite(config)
    _emit(report.to_json(), args, "suite", report.summary_lines())
    return EXIT_OK if report.passed else EXIT_FAILED


def _load(path: str):
    try:
        return read_tensor(path)
    except OSError as exc:
        raise TensorParseError(f"cannot read {path}: {exc}") from exc


def cmd_split(args) -> int:
    T = _load(args.file)
    points = _resolve_points(args.points, T.p, args.seed)
    hook = _model_certificate_hook(T.p, T.q, points)
    if isinstance(T, MetricTensor):
        report = iterative_split_metric(T, args.degree_bound, hook)
    else:
        report = iterative_split_acs(T, args.degree_bound, hook)
    out = report.to_json()
    out["finalNilpotentZero"] = report.final_nilpotent_zero
    _emit(out, args, "split", [f"{s.degree}: {s.status}" for s in report.steps])
    return EXIT_OBSTRUCTED if report.obstructed else EXIT_OK


def cmd_check(args) -> int:
    T = _load(args.file)
    rep = check_metric(T) if isinstance(T, MetricTensor) else check_acs(T)
    out = {"kind": T.KIND, "p": T.p, "q": T.q, **rep.to_json()}
    _emit(out, args, "check")
    return EXIT_OK if rep.valid else EXIT_INVALID


def cmd_build_example(args) -> int:
    model = build_model(args.n)
    kind = args.kind
    obj = {"model": model.to_json, "acs": lambda: model.acs().to_json(),
           "metric": lambda: model.metric().to_json(), "JR": model.JR.to_json,
           "gR": model.gR.to_json, "Y_eta": model.Y_eta.to_json,
           "W_eta": model.W_eta.to_json}[kind]()
    _emit(obj, args, "build-example")
    return EXIT_OK


def cmd_eval(args) -> int:
    if args.file:
        T = _load(args.file)
        points = _resolve_points(args.points, T.p, args.seed)
        out = {"kind": T.KIND, "points": [
            {"point": [str(Fraction(v)) for v in pt], "tensor": T.evaluate_at_point(pt).to_json()}
            for pt in points]}
        _emit(out, args, "eval")
        return EXIT_OK
    model = build_model(args.n)
    points = _resolve_points(args.points, model.p, args.seed)
    cert = nowhere_split_certificates(model, points)
    _emit(cert.to_json(), args, "eval")
    return EXIT_OK


COMMANDS = {"suite": cmd_suite, "split": cmd_split, "check": cmd_check,
            "build-example": cmd_build_example, "eval": cmd_eval}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"nonsplit: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TensorParseError, SplitInputError, TensorError, ModelError, ValueError) as exc:
        print(f"nonsplit: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

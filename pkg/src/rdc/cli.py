"""Command-line interface.

Subcommands: solve (one constrained point), sweep (grid of points to CSV or
JSON), bernoulli (regime location on a binary source), oracle (brute-force
spot check), verify (monotonicity/convexity reports on a surface file).

Exit codes: 0 success, 1 infeasible bounds (or no detectable plateau),
2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from ._fmt import json_dumps
from .bernoulli import PlateauNotFound, locate_regimes
from .classify import BinaryClassifier, bayes_region
from .oracle import OracleConfig, grid_search_rdc
from .solver import InfeasibleBounds, SolverConfig, solve_constrained, sweep_surface
from .source import Channel, MixtureSource, SourceSpec, load_source_spec
from .surface import check_convexity, check_monotone, export_surface, read_surface


def _bound(text: str) -> float:
    try:
        value = math.inf if text.strip().lower() == "inf" else float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if math.isnan(value) or value < 0:
        raise argparse.ArgumentTypeError(f"bound must be nonnegative or inf: {text!r}")
    return value


def _grid(text: str) -> np.ndarray:
    """Grid spec start:end:count (inclusive endpoints), or the literal inf."""
    if text.strip().lower() == "inf":
        return np.array([math.inf])
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid spec must be start:end:count, got {text!r}")
    try:
        start, end, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed grid spec: {text!r}")
    if count < 1 or start < 0 or (count > 1 and end <= start):
        raise argparse.ArgumentTypeError(f"grid spec must be nonnegative and increasing: {text!r}")
    return np.array([start]) if count == 1 else np.linspace(start, end, count)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        inner_tol=args.inner_tol,
        max_inner_iters=args.max_inner_iters,
        constraint_tol=args.constraint_tol,
        multiplier_max=args.multiplier_max,
        outer_max_iters=args.outer_max_iters,
    )


def _resolve_classifier(spec: SourceSpec) -> BinaryClassifier:
    region = spec.classifier_region
    if region == "bayes":
        if spec.source.n != spec.distortion.m:
            raise ValueError(
                "'bayes' derives the region on the clean source through the identity "
                "channel, which needs equal source and reconstruction alphabets")
        return bayes_region(spec.source, Channel.identity(spec.source.n))
    return BinaryClassifier(m=spec.distortion.m, region=frozenset(region))


def _emit(payload: dict) -> None:
    sys.stdout.write(json_dumps(payload))


def _cmd_solve(args) -> int:
    spec = load_source_spec(args.source)
    clf = _resolve_classifier(spec)
    point = solve_constrained(spec.source, spec.distortion, clf,
                              args.d, args.e, _solver_config(args))
    _emit(point.to_dict(include_channel=args.include_channel))
    return 0


def _cmd_sweep(args) -> int:
    spec = load_source_spec(args.source)
    clf = _resolve_classifier(spec)
    surface = sweep_surface(spec.source, spec.distortion, clf,
                            args.grid_d, args.grid_e, _solver_config(args),
                            jobs=args.jobs)
    export_surface(surface, args.out, fmt=args.format, include_meta=not args.no_meta)
    return 0


def _cmd_bernoulli(args) -> int:
    if args.source is not None:
        spec = load_source_spec(args.source)
        source, clf = spec.source, _resolve_classifier(spec)
    elif args.p is not None:
        source = MixtureSource.bernoulli(args.p)
        clf = BinaryClassifier(m=2, region=frozenset({0}))
    else:
        raise ValueError("bernoulli needs --p or --source")
    record = locate_regimes(source, clf, args.e, _solver_config(args),
                            sweep_points=args.points)
    _emit(record.to_dict())
    return 0


def _cmd_oracle(args) -> int:
    spec = load_source_spec(args.source)
    clf = _resolve_classifier(spec)
    result = grid_search_rdc(spec.source, spec.distortion, clf, args.d, args.e,
                             OracleConfig(resolution=args.resolution,
                                          slack=args.constraint_tol))
    if not result.feasible:
        raise InfeasibleBounds(
            f"no lattice channel satisfies d<={args.d:.9g}, e<={args.e:.9g}")
    payload = {"rate_bits": result.rate_bits, "feasible": True}
    if args.include_channel:
        payload["channel"] = result.channel.k.tolist()
    _emit(payload)
    return 0


def _cmd_verify(args) -> int:
    surface = read_surface(args.surface)
    midpoint_solver = None
    if args.source is not None:
        spec = load_source_spec(args.source)
        clf = _resolve_classifier(spec)
        cfg = _solver_config(args)

        def midpoint_solver(d, e):
            try:
                return solve_constrained(spec.source, spec.distortion, clf, d, e, cfg)
            except InfeasibleBounds:
                return None

    _emit({
        "monotonicity": check_monotone(surface, tol=args.tol_mono),
        "convexity": check_convexity(surface, n_pairs=args.pairs, tol=args.tol_conv,
                                     seed=args.seed, midpoint_solver=midpoint_solver),
    })
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdc",
        description="Minimum-rate solver under distortion and classification-error bounds")
    sub = parser.add_subparsers(dest="command", required=True)

    config = argparse.ArgumentParser(add_help=False)
    config.add_argument("--inner-tol", type=float, default=1e-9,
                        help="per-iteration objective tolerance, nats")
    config.add_argument("--max-inner-iters", type=_positive_int, default=20000)
    config.add_argument("--constraint-tol", type=float, default=1e-4,
                        help="feasibility slack for the multiplier search")
    config.add_argument("--multiplier-max", type=float, default=1e4)
    config.add_argument("--outer-max-iters", type=_positive_int, default=60)

    solve = sub.add_parser("solve", parents=[config],
                           help="solve one (distortion, error) bound pair")
    solve.add_argument("--source", required=True, help="source spec JSON path")
    solve.add_argument("--d", type=_bound, required=True, help="distortion bound or inf")
    solve.add_argument("--e", type=_bound, required=True, help="error bound or inf")
    solve.add_argument("--include-channel", action="store_true")
    solve.add_argument("--no-meta", action="store_true",
                       help="suppress non-deterministic metadata (none in this output)")
    solve.set_defaults(func=_cmd_solve)

    sweep = sub.add_parser("sweep", parents=[config], help="solve a bound grid to a file")
    sweep.add_argument("--source", required=True)
    sweep.add_argument("--grid-d", type=_grid, required=True,
                       help="start:end:count (inclusive), or inf")
    sweep.add_argument("--grid-e", type=_grid, required=True)
    sweep.add_argument("--out", required=True, help="output path (.csv or .json)")
    sweep.add_argument("--format", choices=("csv", "json"), default=None)
    sweep.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1,
                       help="parallel workers (result is independent of this)")
    sweep.add_argument("--no-meta", action="store_true",
                       help="omit metadata (timestamps etc.) from JSON output")
    sweep.set_defaults(func=_cmd_sweep)

    bern = sub.add_parser("bernoulli", parents=[config],
                          help="locate rate regimes for a binary source")
    bern.add_argument("--p", type=float, default=None,
                      help="Bernoulli parameter for the class-per-symbol source")
    bern.add_argument("--source", default=None, help="custom binary source spec JSON")
    bern.add_argument("--e", type=_bound, required=True)
    bern.add_argument("--points", type=_positive_int, default=200,
                      help="sweep density before boundary refinement")
    bern.add_argument("--no-meta", action="store_true")
    bern.set_defaults(func=_cmd_bernoulli)

    oracle = sub.add_parser("oracle", parents=[config],
                            help="brute-force spot check of one bound pair")
    oracle.add_argument("--source", required=True)
    oracle.add_argument("--d", type=_bound, required=True)
    oracle.add_argument("--e", type=_bound, required=True)
    oracle.add_argument("--resolution", type=_positive_int, default=200)
    oracle.add_argument("--include-channel", action="store_true")
    oracle.add_argument("--no-meta", action="store_true")
    oracle.set_defaults(func=_cmd_oracle)

    verify = sub.add_parser("verify", parents=[config],
                            help="monotonicity/convexity reports for a surface file")
    verify.add_argument("--surface", required=True)
    verify.add_argument("--source", default=None,
                        help="enables on-demand midpoint solves for convexity")
    verify.add_argument("--pairs", type=_positive_int, default=200)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--tol-mono", type=float, default=1e-4)
    verify.add_argument("--tol-conv", type=float, default=1e-3)
    verify.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (InfeasibleBounds, PlateauNotFound) as exc:
        print(f"rdc: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"rdc: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"rdc: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

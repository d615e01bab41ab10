"""Command line front end: single-problem recovery, certificate checks, and
the two experiment harnesses.

Exit codes are stable: 0 success (and certificate holds for ``check``),
1 certificate fails, 2 usage/config error, 3 numerical error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import bench, certs, greedy, two_stage
from .errors import (
    ConfigError,
    InvalidConfig,
    InvalidOrder,
    InvalidSparsity,
    InvalidSpec,
    NumericalBreakdown,
    RankDeficient,
    UnknownColumn,
    ZeroTarget,
)
from .linalg import qr_init
from .model import ActiveSet, Certificate, Dictionary, RecoveryOutcome

EXIT_OK = 0
EXIT_CERT_FAILS = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_CONFIG_ERRORS = (
    ConfigError,
    InvalidConfig,
    InvalidSparsity,
    InvalidSpec,
    InvalidOrder,
    ZeroTarget,
    ValueError,
)
_NUMERICAL_ERRORS = (RankDeficient, NumericalBreakdown, UnknownColumn)

ALGORITHMS = ("br", "lace", "fr", "omp", "sp", "ompr", "srr")


def load_matrix(path) -> np.ndarray:
    """Read a dense matrix: first line 'rows cols', then one row per line."""
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"{path}: first line must be 'rows cols'")
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError:
        raise ValueError(f"{path}: first line must be 'rows cols'") from None
    body = lines[1:]
    if len(body) != rows:
        raise ValueError(f"{path}: expected {rows} data rows, got {len(body)}")
    try:
        data = np.array([[float(v) for v in ln.split()] for ln in body])
    except ValueError:
        raise ValueError(f"{path}: non-numeric matrix entry") from None
    if data.shape != (rows, cols):
        raise ValueError(
            f"{path}: data shape {data.shape} does not match header"
        )
    return data


def save_matrix(matrix, path) -> None:
    """Inverse of :func:`load_matrix`."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    lines = [f"{matrix.shape[0]} {matrix.shape[1]}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in matrix]
    Path(path).write_text("\n".join(lines) + "\n")


def load_vector(path) -> np.ndarray:
    data = load_matrix(path)
    if 1 not in data.shape:
        raise ValueError(f"{path}: expected a vector, got shape {data.shape}")
    return data.reshape(-1)


def _print_outcome(outcome: RecoveryOutcome) -> None:
    print("support:", " ".join(str(i) for i in outcome.active_set.ids))
    print(
        "coefficients:",
        " ".join(repr(float(c)) for c in outcome.coefficients),
    )
    print("residual_norm:", repr(outcome.residual_norm))
    print("iterations:", outcome.iterations)
    print("certificate:", outcome.certificate.value)


def _print_report(report: certs.CertificateReport) -> None:
    print("bound:", repr(report.bound))
    print("residual_norm:", repr(report.residual_norm))
    print("sigma_min:", repr(report.sigma_min))
    print("min_abs_coeff:", repr(report.min_abs_coeff))
    print("holds:", "true" if report.holds else "false")


def cmd_recover(args) -> int:
    dictionary = Dictionary(load_matrix(args.matrix))
    y = load_vector(args.target)
    k, s = args.k, args.s
    if args.algorithm == "br":
        outcome = greedy.backward_regression(dictionary, y, k)
    elif args.algorithm == "lace":
        outcome = greedy.lace(dictionary, y, k)
    elif args.algorithm == "fr":
        outcome = greedy.forward_regression(dictionary, y, k)
    elif args.algorithm == "omp":
        outcome = greedy.omp(dictionary, y, k)
    elif args.algorithm == "sp":
        outcome = two_stage.subspace_pursuit(dictionary, y, k)
    elif args.algorithm == "ompr":
        outcome = two_stage.ompr(dictionary, y, k, s=s)
    else:
        outcome = two_stage.srr(dictionary, y, two_stage.SrrConfig(k=k, s=s))
    report = certs.posthoc_check(dictionary, y, outcome)
    outcome = replace(
        outcome,
        certificate=Certificate.PROVEN if report.holds else Certificate.UNPROVEN,
    )
    print("algorithm:", args.algorithm)
    _print_outcome(outcome)
    return EXIT_OK


def cmd_check(args) -> int:
    dictionary = Dictionary(load_matrix(args.matrix))
    y = load_vector(args.target)
    try:
        ids = [int(tok) for tok in args.support.replace(",", " ").split()]
    except ValueError:
        raise ValueError(f"malformed support list {args.support!r}") from None
    if not ids:
        raise ValueError("support list is empty")
    if any(i < 0 or i >= dictionary.m for i in ids):
        raise ValueError("support index out of range")
    active = ActiveSet(sorted(ids))
    qr = qr_init(dictionary.data, active.ids)
    x, resid = qr.solve_ls(y)
    outcome = RecoveryOutcome(
        active_set=active,
        coefficients=x,
        residual_norm=resid,
        iterations=0,
    )
    report = certs.posthoc_check(dictionary, y, outcome)
    _print_report(report)
    return EXIT_OK if report.holds else EXIT_CERT_FAILS


def cmd_phase(args) -> int:
    config = bench.load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    grid = bench.run_phase_grid(config)
    bench.export_grid(grid, args.output, heatmap=args.heatmap)
    print(f"wrote {args.output}")
    print(
        f"grid: {grid.axis1_name} x {grid.axis2_name}, "
        f"{len(grid.axis1)}x{len(grid.axis2)} cells, "
        f"{grid.trials} trials/cell"
    )
    print(f"{'algorithm':<10} {'mean':>6} {'min':>6} {'max':>6}")
    for name in grid.algorithms:
        freq = grid.frequencies[name]
        print(
            f"{name:<10} {freq.mean():>6.3f} {freq.min():>6.3f} "
            f"{freq.max():>6.3f}"
        )
    return EXIT_OK


def cmd_stability(args) -> int:
    config = bench.load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    curve = bench.run_stability(config)
    bench.export_stability(curve, args.output)
    print(f"wrote {args.output}")
    print(f"{'algorithm':<10} {'m':>6} {'runtime_s':>12} {'error':>12}")
    for name in curve.runtimes:
        for idx, size in enumerate(curve.sizes):
            print(
                f"{name:<10} {size:>6} {curve.runtimes[name][idx]:>12.6f} "
                f"{curve.errors[name][idx]:>12.4e}"
            )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsestep",
        description="Sparse recovery and subset selection by stepwise regression.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    rec = sub.add_parser("recover", help="recover a sparse support")
    rec.add_argument("matrix", help="dictionary matrix file")
    rec.add_argument("target", help="target vector file")
    rec.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    rec.add_argument("--k", required=True, type=int, help="target sparsity")
    rec.add_argument("--s", type=int, default=1, help="replacement step size")
    rec.set_defaults(func=cmd_recover)

    chk = sub.add_parser("check", help="certify a candidate support")
    chk.add_argument("matrix", help="dictionary matrix file")
    chk.add_argument("target", help="target vector file")
    chk.add_argument("support", help="comma- or space-separated column ids")
    chk.set_defaults(func=cmd_check)

    pha = sub.add_parser("phase", help="run a recovery phase grid")
    pha.add_argument("--config", required=True)
    pha.add_argument("--output", required=True)
    pha.add_argument("--seed", type=int, default=None)
    pha.add_argument("--heatmap", action="store_true")
    pha.set_defaults(func=cmd_phase)

    sta = sub.add_parser("stability", help="run the stability benchmark")
    sta.add_argument("--config", required=True)
    sta.add_argument("--output", required=True)
    sta.add_argument("--seed", type=int, default=None)
    sta.set_defaults(func=cmd_stability)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CONFIG_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except _NUMERICAL_ERRORS as err:
        print(f"numerical error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as err:
        print(f"io error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

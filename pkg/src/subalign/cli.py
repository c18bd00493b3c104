"""Command-line interface: canned experiments and ad-hoc computation.

Subcommands
-----------
illus1   identity covariance pair, beta sweep (m=6, k=2 defaults)
illus2   spiked-diagonal pair, lambda2 sweep or n sweep (m=20 defaults)
illus3   coordinate-reversed pair; adds the isometry-corrected distance
compute  eps^2 / d^2 / plug-in rho for user-supplied CSV matrices

Outputs: a records CSV (fixed column order, floats at 12 significant
digits) and a summary JSON.  Exit codes: 0 all replicates completed, 1
some replicates failed, 2 usage or I/O error, 3 deficient rank in
``compute``.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .grassmann import hausdorff_sq, projector, weighted_hausdorff_sq
from .pca import RankDeficientError, center, pca_subspace, trivial_subspace
from .procrustes import fit_error_sq, normalize_projected
from .sim import ExperimentConfig, ReplicateRecord, build_models, run_experiment, summarize
from .theory import plugin_rho, rho

__all__ = ["main", "entry", "CSV_COLUMNS", "write_records_csv", "read_records_csv"]

CSV_COLUMNS = [
    "experiment", "method", "m", "k", "n", "sweep_param", "replicate",
    "d2", "eth2", "eps2", "predicted", "residual", "d2_corrected", "status",
    "correction_gap",
]

ILLUS1_BETAS = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99)
ILLUS2_LAMBDAS = (0.70, 0.71, 0.72, 0.73, 0.74, 0.75)
ILLUS2_NSWEEP_NS = (10, 100, 1000, 10000)


def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{value:.12g}"


def _round12(value: float) -> float:
    return float(f"{value:.12g}")


def write_records_csv(records: list[ReplicateRecord], path: str) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            gap = None
            if r.eth_sq is not None and r.d_sq_corrected is not None:
                gap = abs(r.eth_sq - r.d_sq_corrected)
            writer.writerow([
                r.experiment, r.method, r.m, r.k, r.n, _fmt(r.sweep_param), r.replicate,
                _fmt(r.d_sq), _fmt(r.eth_sq), _fmt(r.eps_sq), _fmt(r.predicted),
                _fmt(r.residual), _fmt(r.d_sq_corrected), r.status, _fmt(gap),
            ])


def read_records_csv(path: str) -> list[ReplicateRecord]:
    """Parse a records CSV back into ReplicateRecord values (gap column dropped)."""
    def opt(cell: str):
        return None if cell == "" else float(cell)

    records = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != CSV_COLUMNS:
            raise ValueError(f"unexpected records CSV header: {header}")
        for row in reader:
            records.append(ReplicateRecord(
                experiment=row[0], method=row[1], m=int(row[2]), k=int(row[3]),
                n=int(row[4]), sweep_param=float(row[5]), replicate=int(row[6]),
                d_sq=opt(row[7]), eth_sq=opt(row[8]), eps_sq=opt(row[9]),
                predicted=opt(row[10]), residual=opt(row[11]),
                d_sq_corrected=opt(row[12]), status=row[13],
            ))
    return records


def _reference_lines(cfg: ExperimentConfig) -> list[dict]:
    """Limit lines eps^2 = intercept + slope * distance, per (sweep value, k)."""
    lines = []
    for sweep_param, jc, _ in build_models(cfg):
        for k in cfg.k_values:
            r = rho(jc, k)
            lines.append({
                "sweep_param": _round12(sweep_param), "k": k, "rho": _round12(r),
                "intercept": _round12((1.0 - r) * 2.0 * k), "slope": _round12(r),
            })
    return lines


def _summary_payload(cfg: ExperimentConfig, records, threads: int, full_scale: bool) -> dict:
    stats = summarize(records)
    failed = sum(s.failed for s in stats)
    groups = []
    for s in stats:
        entry = s.as_dict()
        for key, value in entry.items():
            if isinstance(value, float):
                entry[key] = _round12(value)
        groups.append(entry)
    return {
        "experiment": cfg.experiment,
        "method": cfg.method,
        "m": cfg.m,
        "seed": cfg.base_seed,
        "config": {
            "k_values": list(cfg.k_values),
            "n_values": list(cfg.n_values),
            "sweep": [_round12(v) for v in cfg.sweep],
            "replicates": cfg.replicates,
            "beta": _round12(cfg.beta),
            "lambda2": _round12(cfg.lambda2),
            "threads": threads,
            "full_scale": full_scale,
        },
        "failed_replicates": failed,
        "reference_lines": _reference_lines(cfg),
        "summary": groups,
    }


def _run_and_write(cfg: ExperimentConfig, args) -> int:
    for sweep_param, jc, _ in build_models(cfg):
        for k in cfg.k_values:
            print(f"rho(sweep_param={sweep_param:g}, k={k}) = {rho(jc, k):.12g}")
    records = run_experiment(cfg, workers=args.threads)
    payload = _summary_payload(cfg, records, args.threads, args.full_scale)
    out_path = args.out or f"{cfg.experiment}_records.csv"
    summary_path = args.summary or f"{cfg.experiment}_summary.json"
    try:
        write_records_csv(records, out_path)
        with open(summary_path, "w") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 2
    failed = payload["failed_replicates"]
    print(f"wrote {len(records)} records to {out_path}; summary to {summary_path}")
    if failed:
        print(f"warning: {failed} replicates failed", file=sys.stderr)
        return 1
    return 0


def _add_run_flags(sp, *, m, reps):
    sp.add_argument("--m", type=int, default=m, help=f"ambient dimension (default {m})")
    sp.add_argument("--k", type=int, nargs="+", default=None, help="projection dimensions")
    sp.add_argument("--n", type=int, nargs="+", default=None, help="observation counts")
    sp.add_argument("--reps", type=int, default=reps, help=f"replicates per cell (default {reps})")
    sp.add_argument("--seed", type=int, default=42, help="base seed (default 42)")
    sp.add_argument("--method", choices=["pca", "trivial"], default="pca")
    sp.add_argument("--out", help="records CSV path (default <experiment>_records.csv)")
    sp.add_argument("--summary", help="summary JSON path (default <experiment>_summary.json)")
    sp.add_argument("--threads", type=int, default=1, help="parallel workers (default 1)")
    sp.add_argument("--full-scale", action="store_true",
                    help="restore full-scale replicate counts (slow)")


def cmd_illus1(args) -> int:
    cfg = ExperimentConfig(
        experiment="illus1", m=args.m,
        k_values=args.k or [2],
        n_values=args.n or [1000, 10000],
        sweep=args.beta if args.beta is not None else ILLUS1_BETAS,
        replicates=1000 if args.full_scale else args.reps,
        base_seed=args.seed, method=args.method,
    )
    return _run_and_write(cfg, args)


def cmd_illus2(args) -> int:
    if args.n_sweep:
        k_values = args.k or [2]
        n_values = args.n or list(ILLUS2_NSWEEP_NS)
        sweep = args.lambda2 if args.lambda2 is not None else [0.7]
        full = 2000
    else:
        k_values = args.k or [1, 2, 10]
        n_values = args.n or [10000]
        sweep = args.lambda2 if args.lambda2 is not None else ILLUS2_LAMBDAS
        full = 10000
    cfg = ExperimentConfig(
        experiment="illus2", m=args.m, k_values=k_values, n_values=n_values,
        sweep=sweep, replicates=full if args.full_scale else args.reps,
        base_seed=args.seed, method=args.method, beta=args.beta,
    )
    return _run_and_write(cfg, args)


def cmd_illus3(args) -> int:
    cfg = ExperimentConfig(
        experiment="illus3", m=args.m,
        k_values=args.k or [1, 2, 10],
        n_values=args.n or [10000],
        sweep=[args.beta],
        replicates=10000 if args.full_scale else args.reps,
        base_seed=args.seed, method=args.method,
        beta=args.beta, lambda2=args.lambda2,
    )
    return _run_and_write(cfg, args)


def _load_matrix(path: str) -> np.ndarray:
    # Headerless CSV, rows = features, columns = observations.
    return np.loadtxt(path, delimiter=",", ndmin=2)


def cmd_compute(args) -> int:
    try:
        x = _load_matrix(args.x)
        y = _load_matrix(args.y)
    except (OSError, ValueError) as exc:
        print(f"error: cannot read matrix: {exc}", file=sys.stderr)
        return 2
    if x.shape != y.shape:
        print(f"error: shape mismatch: {x.shape} vs {y.shape}", file=sys.stderr)
        return 2
    m, n = x.shape
    if not 1 <= args.k <= m:
        print(f"error: k must satisfy 1 <= k <= m = {m}, got {args.k}", file=sys.stderr)
        return 2
    if n < 2:
        print("error: need at least 2 observations", file=sys.stderr)
        return 2
    cross = None
    if args.cross_cov:
        try:
            cross = _load_matrix(args.cross_cov)
        except (OSError, ValueError) as exc:
            print(f"error: cannot read cross covariance: {exc}", file=sys.stderr)
            return 2
        if cross.shape != (m, m):
            print(f"error: cross covariance must be {m} x {m}, got {cross.shape}",
                  file=sys.stderr)
            return 2
    cx, cy = center(x), center(y)
    try:
        if args.method == "pca":
            sub_a, sub_b = pca_subspace(cx, args.k), pca_subspace(cy, args.k)
        else:
            sub_a = sub_b = trivial_subspace(m, args.k)
        result = {
            "m": m, "n": n, "k": args.k, "method": args.method,
            "eps_sq": _round12(fit_error_sq(
                normalize_projected(projector(sub_a), cx.matrix, args.k),
                normalize_projected(projector(sub_b), cy.matrix, args.k),
            )),
            "d_sq": _round12(hausdorff_sq(sub_a, sub_b)),
            "rho_hat": _round12(plugin_rho(cx, cy, args.k)),
        }
        if cross is not None:
            result["eth_sq"] = _round12(weighted_hausdorff_sq(sub_a, sub_b, cross))
    except RankDeficientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(json.dumps(result, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subalign",
        description="Monte Carlo experiments on Procrustes fitting-error vs. subspace distance",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p1 = sub.add_parser("illus1", help="identity covariance pair, beta sweep")
    _add_run_flags(p1, m=6, reps=200)
    p1.add_argument("--beta", type=float, nargs="+", default=None,
                    help=f"beta sweep values (default {' '.join(str(b) for b in ILLUS1_BETAS)})")
    p1.set_defaults(func=cmd_illus1)

    p2 = sub.add_parser("illus2", help="spiked-diagonal pair, lambda2 sweep")
    _add_run_flags(p2, m=20, reps=200)
    p2.add_argument("--beta", type=float, default=0.6, help="cross-covariance scale (default 0.6)")
    p2.add_argument("--lambda2", type=float, nargs="+", default=None,
                    help="second-diagonal sweep values (default 0.7 .. 0.75)")
    p2.add_argument("--n-sweep", action="store_true",
                    help="sweep n in {10, 100, 1000, 10000} at k=2, lambda2=0.7")
    p2.set_defaults(func=cmd_illus2)

    p3 = sub.add_parser("illus3", help="coordinate-reversed pair with corrected distance")
    _add_run_flags(p3, m=20, reps=200)
    p3.add_argument("--beta", type=float, default=0.6, help="cross-covariance scale (default 0.6)")
    p3.add_argument("--lambda2", type=float, default=0.7, help="second diagonal (default 0.7)")
    p3.set_defaults(func=cmd_illus3)

    pc = sub.add_parser("compute", help="diagnostics for user-supplied matrices")
    pc.add_argument("x", help="CSV for X (rows = features, columns = observations)")
    pc.add_argument("y", help="CSV for Y, same shape")
    pc.add_argument("--k", type=int, required=True, help="projection dimension")
    pc.add_argument("--cross-cov", help="optional m x m cross-covariance CSV (enables eth_sq)")
    pc.add_argument("--method", choices=["pca", "trivial"], default="pca")
    pc.set_defaults(func=cmd_compute)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def entry() -> None:
    sys.exit(main())

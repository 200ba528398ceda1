"""Command-line interface.

Subcommands:

    verify   run the full verification suite, emit the JSON report
    eigen    emit exact eigenpolynomial coefficient tables as JSON
    gram     emit a quadrature Gram matrix as JSON
    markov   emit kernel-block matrices (CSV) plus a JSON verdict summary
    sample   emit sample batches as CSV or NPZ
    plot     emit SVG figures (domain boundary, eigen level sets, coverage)

Configuration for `verify` is a flat key = value file; command-line flags
win over file values.  Exit codes: 0 all pass, 1 numeric failure, 2 exact
identity failure, 3 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from fractions import Fraction

import numpy as np


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D102 - argparse hook
        raise UsageError(message)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def load_config_file(path: str) -> dict:
    """Flat key = value file; '#' starts a comment; booleans are true/false."""
    out: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"bad config line: {raw.rstrip()}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key] = value
    return out


def _build_verify_config(args) -> "VerifyConfig":
    from .verify import VerifyConfig

    values: dict = {}
    if args.config:
        raw = load_config_file(args.config)
        valid = {f.name: f.type for f in dataclasses.fields(VerifyConfig)}
        for key, text in raw.items():
            if key not in valid:
                raise UsageError(f"unknown config key {key!r}")
            if key == "negative_control":
                values[key] = text.lower() in ("1", "true", "yes")
            else:
                values[key] = int(text)
    for name in (
        "seed", "grid_n", "torus_samples", "su3_samples", "omega1_samples",
        "theta_per_axis", "eigen_degree_max",
    ):
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    if getattr(args, "negative_control", False):
        values["negative_control"] = True
    return VerifyConfig(**values)


def cmd_verify(args) -> int:
    from .report import emit_report
    from .verify import run_verify

    config = _build_verify_config(args)
    report, code = run_verify(config)
    if args.out:
        emit_report(report, args.out)
    for entry in report.entries:
        print(f"{entry.status:26s} {entry.name}")
    print(f"total {len(report.entries)} identities; exit code {code}")
    return code


def cmd_eigen(args) -> int:
    from .models import deltoid_model
    from .report import emit_json
    from .spectral import eigen_PQ, eigen_R

    lam = _fraction(args.lam)
    model = deltoid_model(lam)
    entries = []
    for d in range(args.degree_max + 1):
        for k in range(d + 1):
            n = d - k
            r = eigen_R(model, n, k)
            entries.append(
                {"flavor": "R", "n": n, "k": k,
                 "eigenvalue": str(r.eigenvalue), "poly": str(r.poly)}
            )
    for d in range(args.degree_max + 1):
        for k in range(d // 2 + 1):
            n = d - k
            p_hat, q_hat = eigen_PQ(model, n, k)
            entries.append(
                {"flavor": "P", "n": n, "k": k,
                 "eigenvalue": str(p_hat.eigenvalue), "poly": str(p_hat.poly)}
            )
            entries.append(
                {"flavor": "Q", "n": n, "k": k,
                 "eigenvalue": str(q_hat.eigenvalue), "poly": str(q_hat.poly)}
            )
    payload = {"lambda": str(lam), "degree_max": args.degree_max, "entries": entries}
    if args.out:
        emit_json(payload, args.out)
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        print()
    return 0


def cmd_gram(args) -> int:
    from .quadrature import TorusGrid, gram
    from .report import emit_json
    from .spectral import eigen_PQ_lambda, pq_indices

    lam = _fraction(args.lam)
    grid = TorusGrid.build(lam, args.grid)
    polys = []
    labels = []
    for n, k in pq_indices(args.degree_max):
        p_hat, q_hat = eigen_PQ_lambda(lam, n, k)
        polys.append(p_hat.poly)
        labels.append(f"P{n}{k}")
        if n != k:
            polys.append(q_hat.poly)
            labels.append(f"Q{n}{k}")
    matrix = gram(polys, grid)
    payload = {
        "lambda": str(lam),
        "grid": args.grid,
        "degree_max": args.degree_max,
        "labels": labels,
        "matrix": [[f"{matrix[i, j].real:.15g}" for j in range(len(labels))] for i in range(len(labels))],
        "max_offdiagonal": f"{float(np.max(np.abs(matrix - np.diag(np.diag(matrix))))):.3e}",
    }
    if args.out:
        emit_json(payload, args.out)
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        print()
    return 0


def cmd_markov(args) -> int:
    from .hypergroup import (
        ProbeContext,
        estimate_markov_matrix,
        exact_markov_matrix,
        markov_pair_exact,
        theta_grid,
    )
    from .report import emit_csv, emit_json, markov_matrices_to_csv
    from .sampling import sample_omega1

    lam = _fraction(args.lam)
    if args.n is not None:
        k = args.k if args.k is not None else 0
        if k > args.n:
            raise UsageError("--k must not exceed --n")
        degree_max = max(args.n + k, 1)
        indices = [(args.n, k)]
    else:
        degree_max = args.degree_max
        indices = None
    ctx = ProbeContext.build(lam, degree_max)
    if indices is None:
        indices = sorted(ctx.pairs)
    thetas = theta_grid(args.theta_grid)
    batch = sample_omega1(lam, args.samples, args.seed, method="rejection")
    matrices = []
    worst_z = 0.0
    for theta in thetas:
        for n, k in indices:
            est = estimate_markov_matrix(ctx, n, k, theta, batch)
            matrices.append(est)
            alpha, gamma_val = markov_pair_exact(ctx, n, k, theta)
            worst_z = max(worst_z, abs(est.alpha - alpha) / est.provenance["alpha"][1])
            matrices.append(exact_markov_matrix(ctx, n, k, theta))
    csv_text = markov_matrices_to_csv(matrices)
    if args.out:
        emit_csv(csv_text, args.out)
    verdict = {
        "lambda": str(lam),
        "theta_grid": args.theta_grid,
        "samples": args.samples,
        "seed": args.seed,
        "indices": [list(ix) for ix in indices],
        "worst_alpha_z_score": f"{worst_z:.3f}",
        "pass": bool(worst_z < 4.0),
    }
    if args.verdict:
        emit_json(verdict, args.verdict)
    else:
        json.dump(verdict, sys.stdout, indent=2, sort_keys=True)
        print()
    return 0 if verdict["pass"] else 1


def cmd_sample(args) -> int:
    from .sampling import sample_omega1, sample_su3_haar, sample_torus

    if args.kind == "torus":
        batch = sample_torus(args.n, args.seed)
        columns = {"t1": batch.points[:, 0], "t2": batch.points[:, 1]}
    elif args.kind == "su3":
        batch = sample_su3_haar(args.n, args.seed)
        flat = batch.points.reshape(len(batch), 9)
        columns = {}
        for idx in range(9):
            columns[f"re{idx}"] = flat[:, idx].real
            columns[f"im{idx}"] = flat[:, idx].imag
    elif args.kind == "omega1":
        lam = _fraction(args.lam)
        batch = sample_omega1(lam, args.n, args.seed, method=args.method)
        columns = {}
        for idx in range(3):
            columns[f"re{idx + 1}"] = batch.points[:, idx].real
            columns[f"im{idx + 1}"] = batch.points[:, idx].imag
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown sample kind {args.kind}")
    if args.format == "npz":
        np.savez(args.out, **columns)
    else:
        names = list(columns)
        rows = np.column_stack([columns[c] for c in names])
        header = ",".join(names)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(header + "\n")
            for row in rows:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    print(f"wrote {len(batch)} {args.kind} samples to {args.out}")
    return 0


def cmd_plot(args) -> int:
    from .report import deltoid_svg, eigen_levels_svg, emit_svg, theta_coverage_svg

    if args.what == "deltoid":
        text = deltoid_svg(samples=args.samples)
    elif args.what == "coverage":
        text = theta_coverage_svg(theta_per_axis=args.theta_grid)
    elif args.what == "eigen":
        from .spectral import eigen_PQ_lambda

        lam = _fraction(args.lam)
        p_hat, _ = eigen_PQ_lambda(lam, args.n, args.k)
        text = eigen_levels_svg(p_hat.poly)
    else:  # pragma: no cover
        raise UsageError(f"unknown plot {args.what}")
    emit_svg(text, args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="deltoid-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run the verification suite")
    p_verify.add_argument("--config", help="flat key = value config file")
    p_verify.add_argument("--seed", type=int)
    p_verify.add_argument("--grid-n", dest="grid_n", type=int)
    p_verify.add_argument("--torus-samples", dest="torus_samples", type=int)
    p_verify.add_argument("--su3-samples", dest="su3_samples", type=int)
    p_verify.add_argument("--omega1-samples", dest="omega1_samples", type=int)
    p_verify.add_argument("--theta-per-axis", dest="theta_per_axis", type=int)
    p_verify.add_argument("--eigen-degree-max", dest="eigen_degree_max", type=int)
    p_verify.add_argument("--negative-control", action="store_true",
                          help="test fixture: corrupt one metric entry")
    p_verify.add_argument("--out", help="write the JSON report here")
    p_verify.set_defaults(func=cmd_verify)

    p_eigen = sub.add_parser("eigen", help="emit eigenpolynomial tables")
    p_eigen.add_argument("--lambda", dest="lam", required=True, help="rational p/q")
    p_eigen.add_argument("--degree-max", dest="degree_max", type=int, default=4)
    p_eigen.add_argument("--out")
    p_eigen.set_defaults(func=cmd_eigen)

    p_gram = sub.add_parser("gram", help="emit a quadrature Gram matrix")
    p_gram.add_argument("--lambda", dest="lam", required=True)
    p_gram.add_argument("--degree-max", dest="degree_max", type=int, default=4)
    p_gram.add_argument("--grid", type=int, default=96)
    p_gram.add_argument("--out")
    p_gram.set_defaults(func=cmd_gram)

    p_markov = sub.add_parser("markov", help="emit kernel-block matrices")
    p_markov.add_argument("--lambda", dest="lam", required=True)
    p_markov.add_argument("--n", type=int)
    p_markov.add_argument("--k", type=int)
    p_markov.add_argument("--degree-max", dest="degree_max", type=int, default=3)
    p_markov.add_argument("--theta-grid", dest="theta_grid", type=int, default=3)
    p_markov.add_argument("--samples", type=int, default=50_000)
    p_markov.add_argument("--seed", type=int, default=20260808)
    p_markov.add_argument("--out", help="CSV output path")
    p_markov.add_argument("--verdict", help="JSON verdict path")
    p_markov.set_defaults(func=cmd_markov)

    p_sample = sub.add_parser("sample", help="emit sample batches")
    p_sample.add_argument("kind", choices=("torus", "su3", "omega1"))
    p_sample.add_argument("--lambda", dest="lam", default="11/2")
    p_sample.add_argument("--n", type=int, required=True)
    p_sample.add_argument("--seed", type=int, default=20260808)
    p_sample.add_argument("--method", choices=("rejection", "mcmc"), default="rejection")
    p_sample.add_argument("--format", choices=("csv", "npz"), default="csv")
    p_sample.add_argument("--out", required=True)
    p_sample.set_defaults(func=cmd_sample)

    p_plot = sub.add_parser("plot", help="emit SVG figures")
    p_plot.add_argument("what", choices=("deltoid", "eigen", "coverage"))
    p_plot.add_argument("--lambda", dest="lam", default="4")
    p_plot.add_argument("--n", type=int, default=2)
    p_plot.add_argument("--k", type=int, default=0)
    p_plot.add_argument("--samples", type=int, default=720)
    p_plot.add_argument("--theta-grid", dest="theta_grid", type=int, default=120)
    p_plot.add_argument("--out", required=True)
    p_plot.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

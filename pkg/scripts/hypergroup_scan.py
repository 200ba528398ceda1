#!/usr/bin/env python3
"""Scan the exact kernel blocks over a theta grid and print a summary table.

For each eigenspace index the scan reports max |alpha|, the worst
orthonormalized block bound, and (for comparison) the three candidate values
of the second diagonal entry at one interior theta: Monte-Carlo, the
rotation-derived value, and the printed cot-prefactor form.
"""

import argparse
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from deltoid_lab.hypergroup import (
    ProbeContext,
    delta_report,
    markov_pair_exact,
    positivity_scan,
    theta_grid,
)
from deltoid_lab.sampling import sample_omega1


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lambda", dest="lam", default="11/2")
    parser.add_argument("--degree-max", type=int, default=4)
    parser.add_argument("--theta-grid", type=int, default=5)
    parser.add_argument("--samples", type=int, default=50_000)
    parser.add_argument("--seed", type=int, default=20260808)
    args = parser.parse_args()

    lam = Fraction(args.lam)
    ctx = ProbeContext.build(lam, args.degree_max)
    thetas = theta_grid(args.theta_grid)
    print(f"parameter {lam}, {len(thetas)} theta points, indices n+k <= {args.degree_max}\n")

    print(f"{'index':>8s} {'max |alpha|':>12s} {'max sqrt(a^2+g^2)':>18s}")
    for n, k in sorted(ctx.pairs):
        worst_alpha = 0.0
        worst_pair = 0.0
        for theta in thetas:
            alpha, gamma = markov_pair_exact(ctx, n, k, theta)
            worst_alpha = max(worst_alpha, abs(alpha))
            worst_pair = max(worst_pair, (alpha * alpha + gamma * gamma) ** 0.5)
        print(f"  ({n},{k})  {worst_alpha:12.6f} {worst_pair:18.6f}")

    scan = positivity_scan(ctx, thetas)
    print(f"\nworst orthonormalized block bound: {scan['worst_block_bound']:.6f} "
          f"(contraction: {scan['ok']})")

    batch = sample_omega1(lam, args.samples, args.seed, method="rejection")
    theta = thetas[len(thetas) // 2]
    print(f"\nsecond diagonal entry at theta = ({theta.t1:.3f}, {theta.t2:.3f}):")
    print(f"{'index':>8s} {'monte carlo':>14s} {'rotation':>10s} {'cot form':>10s}")
    for n, k in sorted(ctx.pairs):
        if n == k:
            continue
        rep = delta_report(ctx, n, k, theta, batch)
        rot = rep["rotation_derived"]
        cot = rep["cot_closed_form"]
        print(f"  ({n},{k})  {rep['monte_carlo']:9.4f} +- {rep['monte_carlo_se']:.4f} "
              f"{rot if rot is not None else float('nan'):10.4f} "
              f"{cot if cot is not None else float('nan'):10.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

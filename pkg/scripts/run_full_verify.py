#!/usr/bin/env python3
"""Run the full-size verification suite and emit the report plus figures.

Equivalent to `deltoid-lab verify --out verify_report.json` followed by the
three standard plots; kept as a script so the default experiment is one
command from a checkout.
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from deltoid_lab.report import deltoid_svg, emit_report, emit_svg, theta_coverage_svg
from deltoid_lab.verify import VerifyConfig, run_verify


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=20260808)
    parser.add_argument("--outdir", default="verify_output")
    parser.add_argument("--fast", action="store_true",
                        help="reduced sample sizes for a quick pass")
    args = parser.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.fast:
        config = VerifyConfig(seed=args.seed, torus_samples=100_000,
                              su3_samples=100_000, omega1_samples=20_000,
                              eigen_degree_max=5, coverage_theta_n=300,
                              cusp_grid_n=200)
    else:
        config = VerifyConfig(seed=args.seed)

    start = time.time()
    report, code = run_verify(config)
    elapsed = time.time() - start
    emit_report(report, str(outdir / "verify_report.json"))
    emit_svg(deltoid_svg(), str(outdir / "deltoid.svg"))
    emit_svg(theta_coverage_svg(), str(outdir / "theta_coverage.svg"))

    for entry in report.entries:
        print(f"{entry.status:26s} {entry.name}")
    print(f"\n{len(report.entries)} identities in {elapsed:.1f}s; exit code {code}")
    print(f"report: {outdir / 'verify_report.json'}")
    return code


if __name__ == "__main__":
    sys.exit(main())

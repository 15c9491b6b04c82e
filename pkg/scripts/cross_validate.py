"""Run the cross-path validation matrix at a few parameter points.

Usage: python scripts/cross_validate.py [--samples N]

Prints each point's check table and exits non-zero if any gated check fails.
"""

import argparse
import sys

from secfbl import cli

POINTS = {
    "ac2": ["--D", "50"],
    "nakagami_m2": ["--m", "2", "--D", "100", "--G_e", "3"],
    "denser_bs": ["--lambda_b", "3e-4", "--m", "4"],
    "ramp_clamped": ["--R", "0.25", "--n", "128"],
    "eta_3.5": ["--eta", "3.5", "--window_radius_factor", "3"],
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=100_000)
    args = ap.parse_args(argv)
    worst = 0
    for name, flags in POINTS.items():
        print(f"== {name}", flush=True)
        code = cli.main(["validate", "--samples", str(args.samples), *flags])
        sys.stdout.flush()
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())

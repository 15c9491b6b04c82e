"""Write the data behind the three result figures as CSV files.

Usage: python scripts/reproduce_figures.py [OUTDIR] [--spot-checks K] [--samples N]

Each file has one row per (curve, grid point, method); the curve is named in
the ``notes`` column.  Plotting is left to external tools.
"""

import argparse
import sys
import time
from pathlib import Path

from secfbl import cli


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", nargs="?", default="figures")
    ap.add_argument("--spot-checks", type=int, default=3)
    ap.add_argument("--samples", type=int, default=100_000)
    args = ap.parse_args(argv)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for fig in ("fig2", "fig3", "fig4"):
        t0 = time.perf_counter()
        code = cli.main(["figure", fig, "--out", str(out / f"{fig}.csv"),
                         "--spot-checks", str(args.spot_checks), "--samples", str(args.samples)])
        if code:
            return code
        print(f"{fig}: {out / f'{fig}.csv'} ({time.perf_counter() - t0:.1f} s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())

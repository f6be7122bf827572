"""Corner-source loss heatmaps for graded and fixed levels (range-only noise).

    python3 scripts/heatmaps.py --out results/heatmaps
"""

import argparse
import math

from rydnet import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="results/heatmaps")
    ap.add_argument("--tau-scat", default="inf", help="us; inf switches scattering off")
    args = ap.parse_args()
    for strategy in ("graded", "fixed"):
        cli.main(["heatmap", "--strategy", strategy, "--tau-scat", args.tau_scat, "--out", args.out])


if __name__ == "__main__":
    main()

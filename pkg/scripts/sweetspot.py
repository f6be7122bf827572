"""Overall synthesized-CZ loss against interaction radius for a sweep of
scattering times, plus the locus of optimum radii.

    python3 scripts/sweetspot.py --out results/sweetspot
"""

import argparse

from rydnet import analysis, cli, physics


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="results/sweetspot")
    ap.add_argument("--hops", type=float, default=14)
    ap.add_argument("--points", type=int, default=60)
    args = ap.parse_args()

    cli.main(["sweetspot", "--hops", str(args.hops), "--points", str(args.points), "--out", args.out])

    ctx = physics.PhysicsContext(physics.load_table())
    top = analysis.max_supported_radius(ctx, 4.0)
    print(f"graded levels reach at most r = {top:.3f} a (n = {ctx.model.available_n[-1]})")


if __name__ == "__main__":
    main()

"""Fitted n-scaling of the |11> loss and of r_max, for the shipped Rb table and
for power laws, at a few field strengths.

    python3 scripts/scaling_report.py
"""

import argparse

from rydnet import analysis, physics


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--fields", default="0.0001,0.001,0.01", help="V/cm, comma separated")
    args = ap.parse_args()
    table = physics.load_table()
    ns = table.available_n
    models = {
        "rb87 table": table,
        "power law (calibrated at n=70)": physics.PowerLawModel.calibrated(table, 70),
    }
    print(f"{'model':34s} {'E [V/cm]':>9s} {'loss slope':>11s} {'r_max slope':>12s} {'ratio':>7s}")
    for e in (float(x) for x in args.fields.split(",")):
        for name, model in models.items():
            fit = analysis.fit_scaling_exponents(model, ns, e_field=e)
            print(f"{name:34s} {e:9.4g} {fit.loss_slope:11.3f} {fit.r_max_slope:12.4f} {fit.ratio:7.3f}")


if __name__ == "__main__":
    main()

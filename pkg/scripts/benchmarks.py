"""Success-probability table for QFT, QPE and adder circuits across r_max,
with and without photon scattering.

    python3 scripts/benchmarks.py --out results/bench            # desk-scale set
    python3 scripts/benchmarks.py --benchmarks qft:6,adder:6 --inputs 10
"""

import argparse

from rydnet import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="results/bench")
    ap.add_argument("--benchmarks", default="qft:6,qft:9,qpe:6,qpe:8,adder:6,adder:10")
    ap.add_argument("--inputs", default="30")
    ap.add_argument("--shots", default="2000")
    ap.add_argument("--strategy", default="graded")
    args = ap.parse_args()
    cli.main([
        "bench", "--out", args.out, "--benchmarks", args.benchmarks,
        "--inputs", args.inputs, "--shots", args.shots, "--strategy", args.strategy,
    ])  # fmt: skip


if __name__ == "__main__":
    main()

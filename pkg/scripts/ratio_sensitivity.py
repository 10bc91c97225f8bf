#!/usr/bin/env python3
"""r+ against m for several N, written as one CSV (for plotting elsewhere).

    python scripts/ratio_sensitivity.py --out ratio.csv
"""
import argparse
import csv
import sys

from starwalk.experiments import ratio_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--prongs", type=int, nargs="+", default=[500, 1000, 2000, 8000])
    ap.add_argument("--m-max", type=int, default=12)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["N", "m", "step", "r_plus", "r_plus_per_path_state"])
    for N in args.prongs:
        for p in ratio_curve(N, range(3, args.m_max + 1)):
            w.writerow([N, p.m, p.step, f"{p.r_plus:.6g}", f"{p.r_plus / (p.m - 1):.6g}"])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()

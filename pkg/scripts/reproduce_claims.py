#!/usr/bin/env python3
"""Print the headline numbers: p+ per m, path probabilities, N-sensitivity.

    python scripts/reproduce_claims.py
    python scripts/reproduce_claims.py --prongs 1000 2000 4000 16000
"""
import argparse

from starwalk.experiments import ExperimentConfig, run_path_experiment
from starwalk.spectral import p_plus


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--prongs", type=int, nargs="+", default=[250, 1000, 4000, 16000])
    ap.add_argument("--shared", type=int, nargs="+", default=[2, 3, 6])
    args = ap.parse_args()

    print("p+ (weight on the dominant frequency pair)")
    for m in (2, 3, 6, 12, 40):
        p = p_plus(m)
        print(f"  m={m:<3d} numeric {p.numeric:.4f}  asymptotic {p.asymptotic:.4f}")

    print("\ntwo stars: path probability at the predicted step")
    for N in args.prongs:
        r = run_path_experiment(ExperimentConfig(2, N))
        print(f"  N={N:<6d} step {r.predicted_step:<4d} P={r.path_probability_at_prediction:.4f}"
              f"  best {r.max_path_probability:.4f} @ {r.observed_step}")

    print("\nthree stars: path probability and r+ at the predicted step")
    for m in args.shared:
        for N in args.prongs:
            r = run_path_experiment(ExperimentConfig(3, N, m))
            print(f"  m={m} N={N:<6d} t*={r.predicted_time:7.2f} step {r.predicted_step:<4d}"
                  f" P={r.path_probability_at_prediction:.4f}"
                  f"  best {r.max_path_probability:.4f} @ {r.observed_step:<4d}"
                  f" r+={r.r_plus:.3f}")


if __name__ == "__main__":
    main()

"""How the sampling oracle approaches Theta_k as the sample count grows, with and without local refinement."""

import argparse

from qslant.catalog import random_point_datum, random_slant_subspace
from qslant.pointwise import gauss_curvature
from qslant.ricci import ThetaConfig, brute_force_theta_k, theta_k


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--k", type=int, default=2)
    args = ap.parse_args()
    R = gauss_curvature(random_point_datum(random_slant_subspace(4, args.seed), 4.0, seed=args.seed))
    ref = theta_k(R, args.k, ThetaConfig(starts=256)).value
    print(f"optimizer (256 starts): {ref:.15f}")
    print("samples   raw gap     refined gap")
    for samples in (10, 100, 1_000, 10_000, 100_000):
        raw = brute_force_theta_k(R, args.k, samples, refine=0) - ref
        refined = brute_force_theta_k(R, args.k, samples) - ref
        print(f"{samples:7d}  {raw:.3e}  {refined: .3e}")


if __name__ == "__main__":
    main()

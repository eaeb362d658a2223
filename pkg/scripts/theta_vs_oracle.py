"""Compare the Grassmannian optimizer against the sampling oracle on random n=4 data."""

import argparse
import time

from qslant.catalog import random_point_datum, random_slant_subspace
from qslant.pointwise import gauss_curvature
from qslant.ricci import ThetaConfig, brute_force_theta_k, theta_k


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", type=int, default=20)
    ap.add_argument("--starts", type=int, default=64)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--c", type=float, default=4.0)
    args = ap.parse_args()
    print("case k  theta_k              oracle               gap        t_opt  t_oracle")
    for i in range(args.cases):
        R = gauss_curvature(random_point_datum(random_slant_subspace(4, i), args.c, seed=i))
        k = 2 + i % 2
        t0 = time.perf_counter()
        opt = theta_k(R, k, ThetaConfig(starts=args.starts, seed=i)).value
        t1 = time.perf_counter()
        ora = brute_force_theta_k(R, k, args.samples, seed=i)
        t2 = time.perf_counter()
        print(f"{i:4d} {k}  {opt: .15f}  {ora: .15f}  {opt - ora: .2e}  {t1 - t0:5.2f}  {t2 - t1:5.2f}")


if __name__ == "__main__":
    main()

"""Step-halving study of the flat-ambient Codazzi residual on a builtin chart."""

import argparse

from qslant.immersion import builtin_chart, codazzi_residual
from qslant.quat import standard_triple


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--chart", default="builtin:quadratic-graph?fd_step=1e-3")
    ap.add_argument("--u", type=float, nargs=2, default=(0.2, -0.3))
    args = ap.parse_args()
    chart = builtin_chart(args.chart)
    steps = [1.6e-2 / 2**i for i in range(6)]
    prev = None
    print("step       residual    ratio")
    for s in steps:
        r = codazzi_residual(chart, standard_triple(chart.m), args.u, s)
        print(f"{s:.2e}  {r:.3e}  {'' if prev is None else f'{prev / r:.3f}'}")
        prev = r


if __name__ == "__main__":
    main()

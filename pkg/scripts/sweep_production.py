"""Open-loop stationary means over a range of constant production rates k1."""
import argparse

import numpy as np

from dimerctl import reporting
from dimerctl.network import NetworkParams
from dimerctl.ssa import stationary_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k1", type=float, nargs="+", default=[0, 1, 2, 4, 8, 16])
    ap.add_argument("--horizon", type=float, default=50.0)
    ap.add_argument("--n-cells", type=int, default=500)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--csv")
    args = ap.parse_args()

    rows = stationary_sweep(sorted(args.k1), NetworkParams(0.0, 3.0, 2.0, 1.0), args.horizon,
                            np.random.default_rng(args.seed), n_cells=args.n_cells)
    for r in rows:
        print(f"k1={r.k1:6.2f}  E[X1]={r.mean_x1:7.3f}  E[X2]={r.mean_x2:7.3f}  "
              f"Var X1={r.var_x1:7.3f}")
    if args.csv:
        reporting.emit_sweep_csv(rows, args.csv)


if __name__ == "__main__":
    main()

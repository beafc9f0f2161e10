"""Scan the gain across the stability boundary of the moment closed loop.

For each assumed stationary variance the case bound on kc is compared with the
largest real part of the Jacobian eigenvalues slightly below and above it.
"""
import argparse
import math

import numpy as np

from dimerctl.network import NetworkParams
from dimerctl.stability import discriminant, gain_bound_case, jacobian, uniform_gain_bound


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--mu", type=float, default=5.0)
    ap.add_argument("--points", type=int, default=8)
    args = ap.parse_args()

    p = NetworkParams(0.0, 3.0, 2.0, 1.0)
    thr = 2 * p.gamma2 * args.mu / p.b
    print(f"uniform bound {uniform_gain_bound(p):.4f}, Case-1 threshold v* < {thr:.4f}")
    print(f"{'v*':>8} {'bound':>10} {'max Re @0.99':>13} {'max Re @1.01':>13}")
    for v in np.linspace(0.0, thr + 0.2, args.points):
        delta = discriminant(p, args.mu, v)
        if delta <= 0:
            print(f"{v:8.4f}   (no stable equilibrium)")
            continue
        bound = gain_bound_case(p, delta)
        x1 = 0.5 * (1 + math.sqrt(delta))
        lo, hi = (np.linalg.eigvals(jacobian(p, x1, bound * f)).real.max() for f in (0.99, 1.01))
        print(f"{v:8.4f} {bound:10.4f} {lo:13.3e} {hi:13.3e}")


if __name__ == "__main__":
    main()

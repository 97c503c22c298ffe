"""A genuine minimum hiding next to the translation boundary.

At the shell radii of this model the reduced energy develops a local
minimum with |xi| just inside 1: the optimal sphere is pushed almost
all the way off center, its energy is negative, and its Hawking mass
exceeds the total mass.  A solver that only looked near the origin
would never see it, which is why the seed ladder includes near-boundary
rungs.
"""

import argparse

import numpy as np

from acwillmore import (find_critical_point, g_total, hawking_from_g,
                        make_model)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, default=9.0e4)
    ap.add_argument("--delta", type=float, default=0.02,
                    help="constraint gap: search |xi| <= 1 - delta")
    args = ap.parse_args()

    k = 3
    model = make_model("shell-sum", k=k, i_max=3, a=(2.0, 3.0, 5.0, 0.0))
    cp = find_critical_point(model, args.lam, delta=args.delta)
    ev = g_total(model, cp.xi, args.lam)
    m_h = hawking_from_g(ev.g, args.lam)

    print(f"lam = {args.lam:g}, search ball |xi| <= {1 - args.delta}")
    print(f"found: {cp.classification} at |xi| = {np.linalg.norm(cp.xi):.6f}"
          f"  (inner threshold 1 - 2/k^2 = {1 - 2 / k ** 2:.3f})")
    print(f"  G = {ev.g:.3f}  (negative)")
    print(f"  hawking mass from G = {m_h:.6f}  (above the mass 2)")
    print(f"  hessian eigenvalues {cp.hessian_eigenvalues}  (all positive)")
    print(f"  inner radius rho = {cp.rho:.1f}, outer radius "
          f"theta = {cp.theta:.1f}")


if __name__ == "__main__":
    main()

"""Baseline sanity tour on the exact model.

Every quantity the laboratory computes has a closed-form answer on the
pure Schwarzschild metric (mass 2): the mass flux extrapolates to 2,
the center flux to 0, the Hawking mass of every centered sphere is
exactly 2, the sphere Willmore energy is 16 pi ((lam-1)/(lam+1))**2,
and the reduced energy has its critical point at the origin.  Run this
first; if anything here drifts, nothing downstream is trustworthy.
"""

import argparse
import math

import numpy as np

from acwillmore import (adm_mass, find_critical_point, hamiltonian_com,
                        hawking_mass, make_model, willmore_energy_sphere)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, default=1000.0,
                    help="flux sphere radius (default 1000)")
    args = ap.parse_args()

    model = make_model("schwarzschild")
    lam = args.lam

    raw = adm_mass(model, lam, extrapolate=False)
    ext = adm_mass(model, lam)
    print(f"mass flux at lam={lam:g}")
    print(f"  raw          {raw:.12f}   (tail ~ 6/lam)")
    print(f"  extrapolated {ext:.12f}   (target 2)")

    com = hamiltonian_com(model, lam)
    print(f"center flux  |C| = {np.linalg.norm(com):.3e}   (target 0)")

    print("hawking mass on centered spheres")
    for r in (1.0, 10.0, lam):
        print(f"  radius {r:8g}  m_H = {hawking_mass(model, np.zeros(3), r):.12f}")

    will = willmore_energy_sphere(model, np.zeros(3), lam)
    exact = 16.0 * math.pi * ((lam - 1.0) / (lam + 1.0)) ** 2
    print(f"willmore energy  {will:.12f}  vs closed form {exact:.12f}"
          f"  (rel {abs(will - exact) / exact:.2e})")

    cp = find_critical_point(model, lam)
    print(f"critical point   xi = {cp.xi}  ({cp.classification}, "
          f"|grad| = {cp.grad_norm:.2e})")
    print(f"hessian eigenvalues {cp.hessian_eigenvalues}  "
          f"(all near 256 pi = {256 * math.pi:.4f})")


if __name__ == "__main__":
    main()

"""Finite-difference curvature of the NcHO ground energy at α = β versus step size.

At ``g = (β−α)/2 = 0`` the ground level of the NcHO is doubly degenerate and
the lowest eigenvalue splits linearly in ``|g|``. The centred second
difference then behaves like ``−2c/h`` and never settles to the second-order
series coefficient; this script tabulates both, plus the fitted splitting
slope ``c``.

    python scripts/ncho_curvature_study.py --A 2
"""
import argparse

import numpy as np

from rabi_ncho.perturbation import lowest_eigenvalue, ncho_lambda0_series, second_difference
from rabi_ncho.spectral import ModelSpec, converged_spectrum


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--A", type=float, default=2.0)
    args = ap.parse_args()
    A = args.A

    series = ncho_lambda0_series(A, A)
    energy = lambda g: lowest_eigenvalue(ModelSpec("ncho", alpha=A - g, beta=A + g))
    print(f"series: e0={series.e0:.10f}  curvature 2*e2={2 * series.e2:.6f}")
    print("h,second_difference,h*second_difference")
    for h in (1e-1, 3e-2, 1e-2, 3e-3, 1e-3):
        d = second_difference(energy, h)
        print(f"{h:g},{d:.6f},{h * d:.6f}")

    print("g,lambda0,lambda1,split/|g|")
    for g in (1e-2, 3e-3, 1e-3, 3e-4):
        v = converged_spectrum(ModelSpec("ncho", alpha=A - g, beta=A + g), 2, 1e-13).values
        print(f"{g:g},{v[0]:.12f},{v[1]:.12f},{(v[1] - v[0]) / g:.6f}")
    base = np.sqrt(A * A - 1) / 2
    print(f"unperturbed double level {base:.12f}")


if __name__ == "__main__":
    main()

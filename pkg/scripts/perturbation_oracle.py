"""Closed-form small-coupling coefficients against Richardson-extrapolated finite differences.

    python scripts/perturbation_oracle.py --deltas 0.25 0.5 1 2
"""
import argparse

from rabi_ncho.perturbation import coeffs_1p, coeffs_2p, curvature_at_zero, lowest_eigenvalue, quartic_at_zero
from rabi_ncho.spectral import ModelSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--deltas", type=float, nargs="+", default=[0.25, 0.5, 1.0])
    ap.add_argument("--h", type=float, default=1e-2)
    args = ap.parse_args()

    print("family,delta,e2,e2_fd,e4,e4_fd")
    for fam, coeffs in (("rabi2p", coeffs_2p), ("rabi1p", coeffs_1p)):
        for delta in args.deltas:
            energy = lambda g: lowest_eigenvalue(ModelSpec(fam, delta=delta, g=g))
            c = coeffs(delta)
            e2 = curvature_at_zero(energy, args.h) / 2
            e4 = quartic_at_zero(energy, args.h) / 24
            print(f"{fam},{delta:g},{c.e2:.10f},{e2:.10f},{c.e4:.8f},{e4:.8f}")


if __name__ == "__main__":
    main()

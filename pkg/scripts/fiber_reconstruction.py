"""Recover NcHO eigenvalues from the Rabi fiber condition and compare with direct diagonalisation.

    python scripts/fiber_reconstruction.py --alpha 3 --beta 2 --upper 10
"""
import argparse

import numpy as np

from rabi_ncho.fiber import reconstruct_ncho_spectrum, verify_fiber
from rabi_ncho.spectral import ModelSpec, converged_spectrum


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=3.0)
    ap.add_argument("--beta", type=float, default=2.0)
    ap.add_argument("--upper", type=float, default=10.0)
    ap.add_argument("--k-max", type=int, default=8)
    args = ap.parse_args()

    rep = verify_fiber(args.alpha, args.beta, args.k_max)
    print(f"fiber check at n_max={rep.n_max}: passed={rep.passed}")
    print("index,lambda,s*lambda,distance,mult_ncho,mult_fiber,eigvec_residual")
    for lv in rep.levels:
        print(f"{lv.index},{lv.lam:.12f},{lv.scaled:.12f},{lv.distance:.1e},{lv.multiplicity_ncho},"
              f"{lv.multiplicity_fiber},{lv.eigvec_residual:.1e}")

    roots = reconstruct_ncho_spectrum(args.alpha, args.beta, (0.0, args.upper))
    direct = converged_spectrum(ModelSpec("ncho", alpha=args.alpha, beta=args.beta), len(roots) + 2, 1e-11).values
    direct = direct[direct < args.upper]
    print(f"reconstructed {len(roots)} levels, direct {len(direct)} levels in (0, {args.upper:g})")
    if len(roots) == len(direct):
        print(f"max |difference| {np.max(np.abs(roots - direct)):.2e}")


if __name__ == "__main__":
    main()

"""Spectral zeta values along parameter sequences approaching the solvable points.

Writes a CSV (parameter, value, tail_bound, |difference|, ground energy) for
Δ→0 at fixed g, g→0 at fixed Δ, and β→α for the NcHO.

    python scripts/zeta_limits.py --s 2 --out zeta_limits.csv
"""
import argparse
import csv
import sys

from rabi_ncho.zeta import ncho_zeta_limit, rabi_zeta_limit


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--s", type=float, default=2.0)
    ap.add_argument("--levels", type=int, default=300)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    seq = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3]
    reports = {
        "delta->0 (g=0.2)": rabi_zeta_limit(args.s, 0.2, seq, vary="delta", levels=args.levels),
        "g->0 (delta=0.25)": rabi_zeta_limit(args.s, 0.25, seq, vary="g", levels=args.levels),
        "beta->3 from above": ncho_zeta_limit(args.s, 3.0, [3 + x for x in seq], levels=args.levels),
        "beta->3 from below": ncho_zeta_limit(args.s, 3.0, [3 - x for x in seq], levels=args.levels),
    }
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(out)
    w.writerow(["sequence", "param", "value", "tail_bound", "difference", "ground", "limit", "monotone"])
    for name, rep in reports.items():
        for r in rep.rows:
            w.writerow([name, r.param, f"{r.value:.12g}", f"{r.tail_bound:.3g}", f"{r.difference:.3e}",
                        f"{r.ground:.10f}", f"{rep.limit:.12g}", rep.monotone])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()

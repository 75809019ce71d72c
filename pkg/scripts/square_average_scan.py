#!/usr/bin/env python3
"""Scan two-parameter square averages over a grid of frequency pairs.

For each (k1, k2) in a small box, computes the trajectory of

    (1/N^2) sum_{n,m} e(k1 (x+n a)) e(k2 (x+(n+m) a))

on the golden rotation at geometrically spaced checkpoints, together with
the resonance data K = k1+k2, M = k2 and the predicted limit (1 for the
doubly resonant pairs, 0 otherwise).  Writes one CSV row per checkpoint.
"""

import argparse
from pathlib import Path

import numpy as np

from ergolab import (Observable, geometric_checkpoints, golden_rotation,
                     square_trajectory)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmax", type=int, default=2)
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--start", type=float, default=0.25)
    ap.add_argument("--out", type=Path, default=Path("square_scan.csv"))
    args = ap.parse_args()

    system = golden_rotation()
    x = np.array([args.start])
    cps = geometric_checkpoints(args.n, start=1000)
    rows = ["k1,k2,K,M,limit,N,value_re,value_im"]
    for k1 in range(-args.kmax, args.kmax + 1):
        for k2 in range(-args.kmax, args.kmax + 1):
            fs = [Observable.character(k1), Observable.character(k2)]
            K, M = k1 + k2, k2
            limit = 1.0 if K == 0 and M == 0 else 0.0
            traj = square_trajectory(system, fs, x, cps)
            for n, v in traj.checkpoints:
                rows.append(f"{k1},{k2},{K},{M},{limit},{n},"
                            f"{v.real:.17g},{v.imag:.17g}")
    args.out.write_text("\n".join(rows) + "\n")
    print(f"wrote {args.out} ({len(rows) - 1} rows)")


if __name__ == "__main__":
    main()

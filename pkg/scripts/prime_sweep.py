"""R of the unpermuted d-sequence for every maximal prime up to --limit,
with a coarse binned trend.  Writes plot-ready CSV when --out is given.

    python scripts/prime_sweep.py --limit 200 --out primes.csv
"""

import argparse

import numpy as np

from dseqperm.harness import prime_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--limit", type=int, default=200)
    ap.add_argument("--bins", type=int, default=4)
    ap.add_argument("--out")
    args = ap.parse_args()

    rows = prime_sweep(args.limit)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("prime,period,R\n")
            for p, r in rows:
                fh.write(f"{p},{p - 1},{r!r}\n")
    primes = np.array([p for p, _ in rows])
    rs = np.array([r for _, r in rows])
    edges = np.linspace(0, args.limit, args.bins + 1)
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (primes > lo) & (primes <= hi)
        if sel.any():
            print(f"({lo:6.0f}, {hi:6.0f}]  {sel.sum():3d} primes  mean R = {rs[sel].mean():.4f}")


if __name__ == "__main__":
    main()

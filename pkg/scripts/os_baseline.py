"""Permutation sweep on OS-entropy sequences (not reproducible by design).

    python scripts/os_baseline.py --length 1276 --block-size 22 --trials 100
"""

import argparse

from dseqperm.harness import BaselineSource, baseline_sweep
from dseqperm.permute import BlockPartition


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--length", type=int, default=1276)
    ap.add_argument("--block-size", type=int, default=22)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    part = BlockPartition.from_block_size(args.length, args.block_size)
    counts = sorted({0, 1, 2, 3, 10, part.block_count} & set(range(part.block_count + 1)))
    report = baseline_sweep(BaselineSource("os_rng", args.length), part, counts,
                            args.trials, args.seed)
    for row in report.rows:
        print(f"n={row.n_perms:<4d} mean max|c|={row.mean_max_offpeak:.4f} "
              f"std={row.std_max_offpeak:.4f}")


if __name__ == "__main__":
    main()

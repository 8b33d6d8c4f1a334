#!/usr/bin/env python3
"""Spectral-clustering sweep: mutual information vs. power-iteration steps.

Runs on the synthetic 10-blob fixture by default; pass --data some.csv (with
a 'label' column) to use your own dataset, e.g. a 1000-sample digits subset.
"""

import argparse
import sys

from deflatrix.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data", default="blobs")
    parser.add_argument("--out", default="out/clustering")
    parser.add_argument("--r", type=int, default=10)
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--clusters", type=int, default=10)
    parser.add_argument("--t-values", default="5,10,20,40,100")
    parser.add_argument("--seeds", default="0,1,2,3,4")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()
    return cli_main(
        [
            "cluster",
            "--data", args.data,
            "--r", str(args.r),
            "--k", str(args.k),
            "--clusters", str(args.clusters),
            "--t-values", args.t_values,
            "--seeds", args.seeds,
            "--jobs", str(args.jobs),
            "--out", args.out,
        ]
    )


if __name__ == "__main__":
    sys.exit(main())

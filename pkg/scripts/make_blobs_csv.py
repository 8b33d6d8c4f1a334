#!/usr/bin/env python3
"""Write the synthetic 10-blob clustering fixture to a CSV file."""

import argparse

from deflatrix.clustering import synthetic_blobs
from deflatrix.io import write_dataset_csv


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("path")
    parser.add_argument("--n", type=int, default=500)
    parser.add_argument("--clusters", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    write_dataset_csv(synthetic_blobs(n=args.n, clusters=args.clusters, seed=args.seed), args.path)
    print(f"wrote {args.path}")


if __name__ == "__main__":
    main()

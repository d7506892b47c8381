#!/usr/bin/env python3
"""Mean latency per variant against one sweep column of a bench CSV."""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("csv")
    ap.add_argument("--x", default="fanout", help="sweep column, e.g. fanout, selectivity, n")
    ap.add_argument("--out", default="latency.png")
    args = ap.parse_args()

    df = pd.read_csv(args.csv)
    df["series"] = df["variant"] + "/" + df["layout"]
    mean = df.groupby(["series", args.x])["latency_ns"].mean().unstack(0)

    ax = mean.plot(marker="o", logx=args.x in ("fanout", "selectivity", "n"))
    ax.set_xlabel(args.x)
    ax.set_ylabel("mean latency (ns)")
    plt.tight_layout()
    plt.savefig(args.out, dpi=120)


if __name__ == "__main__":
    main()

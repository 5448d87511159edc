#!/usr/bin/env python3
"""Scatter a merged front CSV in objective space with a complexity histogram.

Reads the documented front CSV schema (perf,complexity,tag,runSeed,solutionId)
and renders two stacked panels: a histogram of complexity values on top and a
jittered, tag-coloured scatter of (complexity, perf) below. Jitter is applied
on the complexity axis only and is reproducible via --jitter-seed.

Usage: python plot_fronts.py MERGED.csv --out fronts.png [--jitter-seed N]
"""

import argparse
import csv
import sys
from collections import Counter

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

FRONT_COLUMNS = ("perf", "complexity", "tag", "runSeed", "solutionId")


def read_front_csv(path):
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != FRONT_COLUMNS:
            raise ValueError(f"{path} does not match the front schema {FRONT_COLUMNS}")
        rows = [
            {
                "perf": float(record[0]),
                "complexity": int(record[1]),
                "tag": record[2],
                "runSeed": int(record[3]),
                "solutionId": int(record[4]),
            }
            for record in reader
        ]
    if not rows:
        raise ValueError(f"{path} contains no front rows")
    return rows


def plot_fronts(rows, out_path, jitter_seed=0, jitter_width=0.18):
    rng = np.random.default_rng(jitter_seed)
    complexity = np.array([r["complexity"] for r in rows], dtype=float)
    perf = np.array([r["perf"] for r in rows])
    tags = [r["tag"] for r in rows]

    fig, (ax_hist, ax_scatter) = plt.subplots(
        2, 1, figsize=(7, 7), height_ratios=[1, 2.4], sharex=True
    )

    bins = np.arange(complexity.min() - 0.5, complexity.max() + 1.5)
    ax_hist.hist(complexity, bins=bins, color="0.6", edgecolor="0.3")
    ax_hist.set_ylabel("frequency")
    ax_hist.set_title("complexity histogram")

    jitter = rng.uniform(-jitter_width, jitter_width, size=len(rows))
    palette = plt.get_cmap("tab10")
    tag_order = sorted(set(tags))
    for k, tag in enumerate(tag_order):
        mask = np.array([t == tag for t in tags])
        ax_scatter.scatter(
            complexity[mask] + jitter[mask],
            perf[mask],
            s=22,
            alpha=0.35,
            color=palette(k % 10),
            label=tag,
            edgecolors="none",
        )
    ax_scatter.set_xlabel("complexity (decision points)")
    ax_scatter.set_ylabel("performance (mean return)")
    ax_scatter.legend(title="subspecies", loc="lower right", fontsize=8)
    ax_scatter.set_title("merged non-dominated fronts")

    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("front_csv", help="merged front CSV")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--jitter-seed", type=int, default=0)
    args = parser.parse_args(argv)
    try:
        rows = read_front_csv(args.front_csv)
        plot_fronts(rows, args.out, jitter_seed=args.jitter_seed)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    histogram = sorted(Counter(r["complexity"] for r in rows).items())
    print(f"plotted {len(rows)} front rows to {args.out}")
    print("complexity histogram: " + ", ".join(f"{c}:{n}" for c, n in histogram))
    return 0


if __name__ == "__main__":
    sys.exit(main())

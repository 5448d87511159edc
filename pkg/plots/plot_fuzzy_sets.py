#!/usr/bin/env python3
"""Draw the fuzzy partitions of a serialized policy, one panel per feature,
with an optional valley-profile panel above the position axis.

Reads the documented best-FRBS JSON (partitions as piecewise-linear sets with
breakpoints, plus linguistic value names). Membership curves are evaluated
directly from the stored breakpoints; the decorative valley panel plots the
hill profile sin(3x) over the position domain.

Usage: python plot_fuzzy_sets.py BEST_FRBS.json --out sets.png [--no-valley]
"""

import argparse
import json
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def membership_curve(fuzzy_set, xs):
    kind = fuzzy_set["kind"]
    b = fuzzy_set["breakpoints"]
    if kind == "lower_trapezoid":
        return np.interp(xs, b, [1.0, 0.0])
    if kind == "upper_trapezoid":
        return np.interp(xs, b, [0.0, 1.0])
    if kind == "triangle":
        return np.interp(xs, b, [0.0, 1.0, 0.0])
    raise ValueError(f"unknown fuzzy set kind {kind!r}")


def load_frbs(path):
    with open(path) as handle:
        data = json.load(handle)
    for key in ("partitions", "feature_domains", "value_names", "feature_names"):
        if key not in data:
            raise ValueError(f"{path} is missing the {key!r} field")
    return data


def plot_fuzzy_sets(data, out_path, valley=True):
    partitions = data["partitions"]
    domains = data["feature_domains"]
    names = data["value_names"]
    feature_names = data["feature_names"]
    n_panels = len(partitions) + (1 if valley else 0)
    fig, axes = plt.subplots(n_panels, 1, figsize=(7, 2.4 * n_panels))
    axes = np.atleast_1d(axes)

    panel = 0
    if valley:
        lo, hi = domains[0]
        xs = np.linspace(lo, hi, 400)
        axes[0].plot(xs, np.sin(3 * xs), color="0.3")
        axes[0].set_ylabel("altitude (decorative)")
        axes[0].set_title("valley profile sin(3x) over the position domain")
        panel = 1

    for i, (partition, domain) in enumerate(zip(partitions, domains)):
        ax = axes[panel + i]
        lo, hi = domain
        xs = np.linspace(lo, hi, 600)
        for fuzzy_set, label in zip(partition["sets"], names[i]):
            ys = membership_curve(fuzzy_set, xs)
            if ys.min() < -1e-9 or ys.max() > 1 + 1e-9:
                raise ValueError("membership curve escapes [0, 1]")
            ax.plot(xs, ys, label=label)
        ax.set_xlim(lo, hi)
        ax.set_ylim(-0.05, 1.05)
        ax.set_ylabel("membership")
        ax.set_xlabel(feature_names[i])
        ax.legend(loc="center right", fontsize=8)

    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("frbs_json", help="serialized best-FRBS file")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--no-valley", action="store_true", help="skip the valley panel")
    args = parser.parse_args(argv)
    try:
        data = load_frbs(args.frbs_json)
        plot_fuzzy_sets(data, args.out, valley=not args.no_valley)
    except (ValueError, OSError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    print(f"plotted {len(data['partitions'])} partitions to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

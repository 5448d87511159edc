"""Command-line entry point: run experiments, query the oracle, render rule
bases and merge front CSVs."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .experiment import (
    frbs_from_serialized,
    load_run_config,
    merge_fronts,
    render_rules,
    run_experiment,
    run_oracle,
    serialize_frbs,
)


def _cmd_run(args) -> int:
    config = load_run_config(args.config, seed=args.seed, out_dir=args.out)
    paths = run_experiment(config)
    print(f"run complete (seed {config.seed}); artifacts in {config.out_dir}")
    for name, path in paths.items():
        print(f"  {name}: {path}")
    return 0


def _cmd_oracle(args) -> int:
    report = run_oracle(
        args.bins, tol=args.tol, eta=args.eta, state_seed=args.state_seed, out_dir=args.out
    )
    print(
        f"oracle perf {report['perf']} (bins={report['bins']}, eta={report['eta']}, "
        f"state_seed={report['state_seed']})"
    )
    if "policy_path" in report:
        print(f"policy saved to {report['policy_path']}")
    return 0


def _load_frbs_record(args) -> dict:
    if args.frbs is not None:
        with open(args.frbs) as handle:
            return json.load(handle)
    run_dir = Path(args.run)
    with open(run_dir / "front_solutions.json") as handle:
        front = json.load(handle)
    key = str(args.solution_id)
    if key not in front:
        raise ValueError(
            f"solution id {key} not on the stored front (ids: {sorted(front, key=int)})"
        )
    with open(run_dir / "manifest.json") as handle:
        manifest = json.load(handle)
    from .experiment import config_from_dict

    config = config_from_dict(manifest["config"])
    record = front[key]
    from .genotype import DbGenotype, RbGenotype

    db = DbGenotype(record["db_genotype"]["alleles"], tuple(record["db_genotype"]["tag"]))
    rb = RbGenotype(
        record["rb_genotype"]["alleles"],
        tuple(record["rb_genotype"]["tag"]),
        record["rb_genotype"]["n_actions"],
    )
    return serialize_frbs(db, rb, config, perf=record["perf"])


def _cmd_render(args) -> int:
    record = _load_frbs_record(args)
    frbs = frbs_from_serialized(record)
    text = render_rules(
        frbs,
        [tuple(names) for names in record["value_names"]],
        tuple(record["feature_names"]),
        {int(a): n for a, n in record["action_names"].items()},
    )
    print(text)
    if "perf" in record:
        print(f"perf {record['perf']}, complexity {record['complexity']}")
    return 0


def _cmd_merge(args) -> int:
    rows, histogram = merge_fronts(args.fronts)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    from .experiment import write_front_csv

    write_front_csv(out, rows)
    hist_path = out.with_name(out.stem + "_hist.csv")
    with open(hist_path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["complexity", "count"])
        writer.writerows(histogram)
    print(f"merged {len(rows)} front rows into {out} (histogram: {hist_path})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzymococo",
        description="Coevolve fuzzy rule-based Mountain Car policies and inspect the results.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one seeded experiment run")
    run_p.add_argument("--config", required=True, help="JSON run config (or a manifest)")
    run_p.add_argument("--seed", type=int, default=None, help="override the config seed")
    run_p.add_argument("--out", default=None, help="override the output directory")
    run_p.set_defaults(func=_cmd_run)

    oracle_p = sub.add_parser("oracle", help="value-iteration performance upper bound")
    oracle_p.add_argument("--bins", type=int, required=True, help="bins per feature")
    oracle_p.add_argument("--tol", type=float, default=1e-6, help="Bellman residual tolerance")
    oracle_p.add_argument("--eta", type=int, default=30, help="number of evaluation states")
    oracle_p.add_argument("--state-seed", type=int, default=0, help="initial-state RNG seed")
    oracle_p.add_argument("--out", default=None, help="directory to persist policy and report")
    oracle_p.set_defaults(func=_cmd_oracle)

    render_p = sub.add_parser("render", help="print the rules of a serialized FRBS")
    source = render_p.add_mutually_exclusive_group(required=True)
    source.add_argument("--frbs", help="path to a serialized FRBS JSON file")
    source.add_argument("--run", help="run directory to pick a front solution from")
    render_p.add_argument(
        "--solution-id", type=int, default=None, help="front solution id (with --run)"
    )
    render_p.set_defaults(func=_cmd_render)

    merge_p = sub.add_parser("merge", help="concatenate per-run front CSVs")
    merge_p.add_argument("fronts", nargs="+", help="front CSV files")
    merge_p.add_argument("--out", required=True, help="merged CSV path")
    merge_p.set_defaults(func=_cmd_merge)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "render" and args.run is not None and args.solution_id is None:
        parser.error("--solution-id is required with --run")
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

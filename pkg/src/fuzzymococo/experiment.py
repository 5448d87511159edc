"""Seeded experiment orchestration.

Loads structured JSON run configs, executes single runs, writes the run
artifacts (front CSV, per-generation stats, best-policy serialization and a
reproducibility manifest), renders rule bases in the standard listing style,
merges front CSVs across runs and wraps the value-iteration oracle.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .coevo import Hyperparams, RunResult, run_fuzzy_mococo
from .frbs import Frbs, render_rule
from .genotype import (
    DbGenotype,
    RbGenotype,
    decode_db,
    decode_rb,
    serialize_db_genotype,
    serialize_rb_genotype,
)
from .mountain_car import McConfig, value_iteration_oracle

VERSION = "0.1.0"

FRONT_COLUMNS = ("perf", "complexity", "tag", "runSeed", "solutionId")

DEFAULT_FEATURE_NAMES = ("x", "xdot")

# Linguistic value names per feature and granularity for the Mountain Car
# features (position, velocity); anything not listed falls back to V1..Vm.
DEFAULT_VALUE_NAMES = (
    {
        2: ("L", "R"),
        3: ("L", "M", "R"),
        4: ("FL", "L", "R", "FR"),
        5: ("FL", "L", "M", "R", "FR"),
    },
    {
        2: ("L", "H"),
        3: ("L", "M", "H"),
        4: ("VL", "L", "H", "VH"),
        5: ("VL", "L", "M", "H", "VH"),
    },
)

DEFAULT_ACTION_NAMES = {1: "Left", 2: "Right"}

_HYPERPARAM_KEYS = (
    "num_gens",
    "db_pop_size",
    "rb_pop_size",
    "db_p_cross",
    "db_mut_sigma",
    "rb_p_cross",
    "rb_p_mut",
    "rb_p_unspec",
    "beta",
    "eta",
    "omega",
)


@dataclass(frozen=True)
class RunConfig:
    hyperparams: Hyperparams
    seed: int
    out_dir: str
    environment: str = "mountain_car"
    feature_names: tuple[str, ...] = DEFAULT_FEATURE_NAMES
    value_names: tuple[dict, ...] = DEFAULT_VALUE_NAMES
    action_names: dict = None

    def __post_init__(self):
        if self.environment != "mountain_car":
            raise ValueError(f"unknown environment {self.environment!r}")
        d = len(self.hyperparams.subspecies_tags[0])
        if len(self.feature_names) != d:
            raise ValueError(f"need {d} feature names, got {len(self.feature_names)}")
        if self.action_names is None:
            object.__setattr__(self, "action_names", dict(DEFAULT_ACTION_NAMES))

    def value_names_for_tag(self, tag) -> list[tuple[str, ...]]:
        names = []
        for i, m in enumerate(tag):
            per_feature = self.value_names[i] if i < len(self.value_names) else {}
            names.append(tuple(per_feature.get(m, tuple(f"V{j + 1}" for j in range(m)))))
        return names

    def to_dict(self) -> dict:
        cfg = {key: getattr(self.hyperparams, key) for key in _HYPERPARAM_KEYS}
        cfg["subspecies_tags"] = [list(t) for t in self.hyperparams.subspecies_tags]
        cfg["seed"] = self.seed
        cfg["out_dir"] = self.out_dir
        cfg["environment"] = self.environment
        cfg["feature_names"] = list(self.feature_names)
        cfg["value_names"] = [
            {str(m): list(names) for m, names in per_feature.items()}
            for per_feature in self.value_names
        ]
        cfg["action_names"] = {str(a): name for a, name in self.action_names.items()}
        return cfg


def config_from_dict(data: dict, seed=None, out_dir=None) -> RunConfig:
    """Build a RunConfig from parsed JSON; `seed` and `out_dir` override."""
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]  # accept a manifest directly
    unknown = set(data) - set(_HYPERPARAM_KEYS) - {
        "subspecies_tags",
        "seed",
        "out_dir",
        "environment",
        "feature_names",
        "value_names",
        "action_names",
    }
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    hp_kwargs = {key: data[key] for key in _HYPERPARAM_KEYS if key in data}
    if "subspecies_tags" in data:
        hp_kwargs["subspecies_tags"] = tuple(tuple(t) for t in data["subspecies_tags"])
    hyperparams = Hyperparams(**hp_kwargs)
    seed = seed if seed is not None else data.get("seed")
    if seed is None:
        raise ValueError("a seed is required (config key 'seed' or --seed)")
    out_dir = out_dir if out_dir is not None else data.get("out_dir")
    if out_dir is None:
        raise ValueError("an output directory is required (config key 'out_dir' or --out)")
    kwargs = {}
    if "environment" in data:
        kwargs["environment"] = data["environment"]
    if "feature_names" in data:
        kwargs["feature_names"] = tuple(data["feature_names"])
    if "value_names" in data:
        kwargs["value_names"] = tuple(
            {int(m): tuple(names) for m, names in per_feature.items()}
            for per_feature in data["value_names"]
        )
    if "action_names" in data:
        kwargs["action_names"] = {int(a): name for a, name in data["action_names"].items()}
    return RunConfig(hyperparams, int(seed), str(out_dir), **kwargs)


def load_run_config(path, seed=None, out_dir=None) -> RunConfig:
    with open(path) as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as err:
            raise ValueError(f"{path} is not valid JSON: {err}") from err
    if not isinstance(data, dict):
        raise ValueError(f"{path} must hold a JSON object")
    return config_from_dict(data, seed=seed, out_dir=out_dir)


def render_rules(frbs: Frbs, value_names, feature_names=None, action_names=None) -> str:
    """One line per rule in the standard listing style; raises on name/tag
    mismatches."""
    tag = frbs.db.tag
    if feature_names is None:
        feature_names = tuple(f"x{i + 1}" for i in range(len(tag)))
    if len(value_names) != len(tag) or len(feature_names) != len(tag):
        raise ValueError("need one name list and one feature name per feature")
    for names, m in zip(value_names, tag):
        if len(names) != m:
            raise ValueError(f"feature with {m} values got names {tuple(names)}")
    return "\n".join(
        render_rule(rule, value_names, feature_names, action_names) for rule in frbs.rb.rules
    )


def format_tag(tag) -> str:
    return "(" + ",".join(str(m) for m in tag) + ")"


def parse_tag(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.strip("()").split(","))


def _float_repr(value) -> str:
    return repr(float(value))


def front_rows(result: RunResult, seed) -> list[dict]:
    """One row per rank-1 solution of the final evaluated solution set; the
    solution id is the solution's position in that set."""
    rows = []
    for index, sol in enumerate(result.solutions):
        if sol.annotation.rank != 1:
            continue
        rows.append(
            {
                "perf": sol.perf,
                "complexity": sol.complexity,
                "tag": format_tag(sol.db.tag),
                "runSeed": seed,
                "solutionId": index,
            }
        )
    return rows


def write_front_csv(path, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(FRONT_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    _float_repr(row["perf"]),
                    int(row["complexity"]),
                    row["tag"],
                    int(row["runSeed"]),
                    int(row["solutionId"]),
                ]
            )


def read_front_csv(path) -> list[dict]:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != FRONT_COLUMNS:
            raise ValueError(f"{path} does not have the front schema {FRONT_COLUMNS}")
        rows = []
        for record in reader:
            rows.append(
                {
                    "perf": float(record[0]),
                    "complexity": int(record[1]),
                    "tag": record[2],
                    "runSeed": int(record[3]),
                    "solutionId": int(record[4]),
                }
            )
    return rows


def merge_fronts(paths):
    """Concatenate per-run front rows (overlay semantics, no re-sorting) and
    tabulate a complexity histogram."""
    if not paths:
        raise ValueError("need at least one front CSV")
    rows = []
    for path in paths:
        rows.extend(read_front_csv(path))
    histogram = sorted(Counter(row["complexity"] for row in rows).items())
    return rows, histogram


def serialize_frbs(
    db_genotype: DbGenotype,
    rb_genotype: RbGenotype,
    config: RunConfig,
    mc_config: McConfig = McConfig(),
    perf=None,
) -> dict:
    """Structured FRBS record: both genotypes plus the decoded phenotype."""
    tag = db_genotype.tag
    value_names = config.value_names_for_tag(tag)
    domains = (mc_config.position_bounds, mc_config.velocity_bounds)
    db = decode_db(db_genotype, domains, config.hyperparams.omega, value_names)
    rb = decode_rb(rb_genotype)
    frbs = Frbs(db, rb)
    data = {
        "tag": list(tag),
        "omega": config.hyperparams.omega,
        "feature_names": list(config.feature_names),
        "feature_domains": [list(p.feature_domain) for p in db.partitions],
        "value_names": [list(names) for names in value_names],
        "action_names": {str(a): n for a, n in config.action_names.items()},
        "db_genotype": serialize_db_genotype(db_genotype),
        "rb_genotype": serialize_rb_genotype(rb_genotype),
        "partitions": [
            {
                "feature": config.feature_names[i],
                "sets": [
                    {"kind": s.kind, "breakpoints": list(s.breakpoints)}
                    for s in p.sets
                ],
            }
            for i, p in enumerate(db.partitions)
        ],
        "rules": [
            {
                "masks": [
                    "".join("1" if mask >> j & 1 else "0" for j in range(m))
                    for mask, m in zip(rule.masks, tag)
                ],
                "action": rule.action,
            }
            for rule in rb.rules
        ],
        "rules_text": render_rules(
            frbs, value_names, config.feature_names, config.action_names
        ).splitlines(),
        "complexity": sum(r.decision_points() for r in rb.rules),
    }
    if perf is not None:
        data["perf"] = perf
    return data


def frbs_from_serialized(data: dict) -> Frbs:
    db_genotype = DbGenotype(data["db_genotype"]["alleles"], tuple(data["db_genotype"]["tag"]))
    rb_genotype = RbGenotype(
        data["rb_genotype"]["alleles"],
        tuple(data["rb_genotype"]["tag"]),
        data["rb_genotype"]["n_actions"],
    )
    domains = tuple(tuple(d) for d in data["feature_domains"])
    value_names = [tuple(names) for names in data["value_names"]]
    db = decode_db(db_genotype, domains, data["omega"], value_names)
    return Frbs(db, decode_rb(rb_genotype))


def _dump_json(path, data):
    with open(path, "w") as handle:
        json.dump(data, handle, indent=2, sort_keys=True)
        handle.write("\n")


def pick_best(result: RunResult):
    """Default best solution of a run: highest performance, then lowest
    complexity, then earliest in the solution set."""
    front = [(i, s) for i, s in enumerate(result.solutions) if s.annotation.rank == 1]
    return min(front, key=lambda pair: (-pair[1].perf, pair[1].complexity, pair[0]))


def run_experiment(config: RunConfig, mc_config: McConfig = McConfig()) -> dict:
    """Execute one seeded run and write its artifacts; returns their paths."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = run_fuzzy_mococo(config.hyperparams, config.seed, mc_config)

    paths = {
        "front": out / "front.csv",
        "gen_stats": out / "gen_stats.csv",
        "best_frbs": out / "best_frbs.json",
        "best_rules": out / "best_rules.txt",
        "front_solutions": out / "front_solutions.json",
        "manifest": out / "manifest.json",
    }

    write_front_csv(paths["front"], front_rows(result, config.seed))

    tags = config.hyperparams.subspecies_tags
    with open(paths["gen_stats"], "w", newline="") as handle:
        writer = csv.writer(handle)
        tag_cols = [f"db{format_tag(t)}" for t in tags] + [f"rb{format_tag(t)}" for t in tags]
        writer.writerow(["gen", "nSolutions", "front1Size", "bestPerf", "meanPerf"] + tag_cols)
        for rec in result.records:
            writer.writerow(
                [rec.gen, rec.n_solutions, rec.front1_size, _float_repr(rec.best_perf),
                 _float_repr(rec.mean_perf)]
                + [rec.db_tag_counts[t] for t in tags]
                + [rec.rb_tag_counts[t] for t in tags]
            )

    front_solutions = {
        str(index): {
            "perf": sol.perf,
            "complexity": sol.complexity,
            "tag": list(sol.db.tag),
            "db_genotype": serialize_db_genotype(sol.db.genotype),
            "rb_genotype": serialize_rb_genotype(sol.rb.genotype),
        }
        for index, sol in enumerate(result.solutions)
        if sol.annotation.rank == 1
    }
    _dump_json(paths["front_solutions"], front_solutions)

    best_id, best = pick_best(result)
    best_data = serialize_frbs(
        best.db.genotype, best.rb.genotype, config, mc_config, perf=best.perf
    )
    best_data["solution_id"] = best_id
    best_data["run_seed"] = config.seed
    _dump_json(paths["best_frbs"], best_data)
    with open(paths["best_rules"], "w") as handle:
        handle.write("\n".join(best_data["rules_text"]) + "\n")

    _dump_json(paths["manifest"], {"version": VERSION, "config": config.to_dict()})
    return {name: str(path) for name, path in paths.items()}


def run_oracle(bins: int, tol: float = 1e-6, eta: int = 30, state_seed: int = 0, out_dir=None):
    """Run the value-iteration oracle; optionally persist the policy and a
    report. Returns the report dict."""
    policy, perf = value_iteration_oracle(bins, tol, McConfig(), eta=eta, state_seed=state_seed)
    report = {"bins": bins, "perf": perf, "eta": eta, "state_seed": state_seed, "tol": tol}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        policy.save(out / "oracle_policy.npz")
        report["policy_path"] = str(out / "oracle_policy.npz")
        _dump_json(out / "oracle_report.json", report)
    return report

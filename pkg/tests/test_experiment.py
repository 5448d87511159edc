"""Experiment orchestration: configs, artifacts, rendering, merging and the
CLI surface."""

import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from fuzzymococo.cli import main as cli_main
from fuzzymococo.experiment import (
    RunConfig,
    config_from_dict,
    format_tag,
    frbs_from_serialized,
    load_run_config,
    merge_fronts,
    parse_tag,
    read_front_csv,
    render_rules,
    run_experiment,
    serialize_frbs,
    write_front_csv,
)
from fuzzymococo.coevo import Hyperparams
from fuzzymococo.frbs import Frbs
from fuzzymococo.genotype import DbGenotype, RbGenotype, decode_db, decode_rb

SMOKE_KEYS = dict(num_gens=4, db_pop_size=30, rb_pop_size=60, eta=5)


def smoke_config(tmp_path, seed=0):
    return RunConfig(Hyperparams(**SMOKE_KEYS), seed, str(tmp_path / f"run{seed}"))


class TestConfig:
    def test_round_trip_through_dict(self):
        config = RunConfig(Hyperparams(**SMOKE_KEYS), 3, "out")
        rebuilt = config_from_dict(config.to_dict())
        assert rebuilt == config

    def test_overrides(self, tmp_path):
        path = tmp_path / "config.json"
        data = dict(SMOKE_KEYS)
        path.write_text(json.dumps(data))
        config = load_run_config(path, seed=9, out_dir="elsewhere")
        assert config.seed == 9
        assert config.out_dir == "elsewhere"

    def test_missing_seed_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(dict(SMOKE_KEYS, out_dir="x")))
        with pytest.raises(ValueError, match="seed"):
            load_run_config(path)

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"seed": 1, "out_dir": "x", "typo_key": 2}))
        with pytest.raises(ValueError, match="typo_key"):
            load_run_config(path)

    def test_invalid_json_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text("{not json")
        with pytest.raises(ValueError, match="JSON"):
            load_run_config(path)

    def test_value_names_for_tag_defaults(self):
        config = RunConfig(Hyperparams(**SMOKE_KEYS), 0, "out")
        names = config.value_names_for_tag((4, 4))
        assert names[0] == ("FL", "L", "R", "FR")
        assert names[1] == ("VL", "L", "H", "VH")


class TestTagText:
    def test_round_trip(self):
        assert parse_tag(format_tag((4, 4))) == (4, 4)
        assert format_tag((2, 5)) == "(2,5)"


class TestRendering:
    def test_best_policy_style_listing(self):
        # a three-rule base in the shape of the published best policy
        db = decode_db(DbGenotype([0.5] * 8, (4, 4)), [(-1.2, 0.5), (-0.07, 0.07)])
        alleles = np.zeros(16, dtype=np.int64)
        # x is L and v is L -> 1; {FL,L,FR} and H -> 2; R and VH -> 2
        alleles[4 * 1 + 1] = 1
        alleles[4 * 0 + 2] = 2
        alleles[4 * 1 + 2] = 2
        alleles[4 * 3 + 2] = 2
        alleles[4 * 2 + 3] = 2
        rb = decode_rb(RbGenotype(alleles, (4, 4), 2))
        frbs = Frbs(db, rb)
        text = render_rules(
            frbs,
            [("FL", "L", "R", "FR"), ("VL", "L", "H", "VH")],
            ("x", "xdot"),
            {1: "Left", 2: "Right"},
        )
        lines = text.splitlines()
        assert len(lines) == 3
        assert "IF x is L and xdot is L THEN a is 1 (Left)" in lines
        assert "IF x is {FL or L or FR} and xdot is H THEN a is 2 (Right)" in lines
        assert "IF x is R and xdot is VH THEN a is 2 (Right)" in lines

    def test_full_mask_renders_hash(self):
        db = decode_db(DbGenotype([0.5] * 4, (2, 2)), [(0.0, 1.0)] * 2)
        rb = decode_rb(RbGenotype([2, 2, 2, 2], (2, 2), 2))
        text = render_rules(Frbs(db, rb), [("L", "H"), ("L", "H")])
        assert text == "IF x1 is # and x2 is # THEN a is 2"

    def test_name_mismatch_rejected(self):
        db = decode_db(DbGenotype([0.5] * 4, (2, 2)), [(0.0, 1.0)] * 2)
        rb = decode_rb(RbGenotype([1, 0, 0, 1], (2, 2), 2))
        with pytest.raises(ValueError):
            render_rules(Frbs(db, rb), [("L", "M", "H"), ("L", "H")])


class TestFrontCsv:
    def test_round_trip(self, tmp_path):
        rows = [
            {"perf": -123.456789, "complexity": 5, "tag": "(4,4)", "runSeed": 7, "solutionId": 12},
            {"perf": -200.0, "complexity": 2, "tag": "(2,2)", "runSeed": 7, "solutionId": 3},
        ]
        path = tmp_path / "front.csv"
        write_front_csv(path, rows)
        assert read_front_csv(path) == rows

    def test_schema_mismatch_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError, match="schema"):
            read_front_csv(path)


class TestMergeFronts:
    def test_concatenation_and_histogram(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        write_front_csv(
            a,
            [
                {"perf": -100.0, "complexity": 5, "tag": "(4,4)", "runSeed": 1, "solutionId": 0},
                {"perf": -200.0, "complexity": 2, "tag": "(2,2)", "runSeed": 1, "solutionId": 1},
            ],
        )
        write_front_csv(
            b,
            [
                {"perf": -150.0, "complexity": 5, "tag": "(3,3)", "runSeed": 2, "solutionId": 0},
            ],
        )
        rows, histogram = merge_fronts([a, b])
        assert len(rows) == 3
        assert [r["runSeed"] for r in rows] == [1, 1, 2]
        assert histogram == [(2, 1), (5, 2)]
        assert sum(count for _, count in histogram) == len(rows)

    def test_needs_input(self):
        with pytest.raises(ValueError):
            merge_fronts([])


class TestSerializedFrbs:
    def test_round_trip_preserves_policy(self):
        config = RunConfig(Hyperparams(**SMOKE_KEYS), 0, "out")
        rng = np.random.default_rng(3)
        db_g = DbGenotype(rng.random(8), (4, 4))
        alleles = rng.integers(0, 3, size=16)
        alleles[0] = 1
        rb_g = RbGenotype(alleles, (4, 4), 2)
        data = serialize_frbs(db_g, rb_g, config)
        frbs = frbs_from_serialized(data)
        assert frbs.db.tag == (4, 4)
        assert len(data["rules_text"]) == len(frbs.rb.rules)
        assert data["complexity"] == sum(r.decision_points() for r in frbs.rb.rules)


class TestRunExperiment:
    def test_artifacts_exist_and_parse(self, tmp_path):
        config = smoke_config(tmp_path)
        paths = run_experiment(config)
        for key in ("front", "gen_stats", "best_frbs", "best_rules", "manifest"):
            assert Path(paths[key]).exists()
        front = read_front_csv(paths["front"])
        assert front
        assert all(row["runSeed"] == 0 for row in front)
        manifest = json.loads(Path(paths["manifest"]).read_text())
        assert manifest["config"]["seed"] == 0

    def test_rerun_byte_identical(self, tmp_path):
        config_a = RunConfig(Hyperparams(**SMOKE_KEYS), 1, str(tmp_path / "a"))
        config_b = RunConfig(Hyperparams(**SMOKE_KEYS), 1, str(tmp_path / "b"))
        paths_a = run_experiment(config_a)
        paths_b = run_experiment(config_b)
        for key in ("front", "gen_stats", "best_frbs", "best_rules"):
            assert Path(paths_a[key]).read_bytes() == Path(paths_b[key]).read_bytes()

    def test_manifest_reproduces_run(self, tmp_path):
        config = smoke_config(tmp_path, seed=2)
        paths = run_experiment(config)
        manifest_config = load_run_config(paths["manifest"], out_dir=str(tmp_path / "replay"))
        replay_paths = run_experiment(manifest_config)
        assert (
            Path(paths["front"]).read_bytes() == Path(replay_paths["front"]).read_bytes()
        )


class TestCli:
    def test_run_and_render_and_merge(self, tmp_path, capsys):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(dict(SMOKE_KEYS, seed=0)))
        out = tmp_path / "run0"
        assert cli_main(["run", "--config", str(config_path), "--out", str(out)]) == 0
        capsys.readouterr()

        assert cli_main(["render", "--frbs", str(out / "best_frbs.json")]) == 0
        rendered = capsys.readouterr().out
        assert "IF " in rendered and "THEN a is" in rendered

        front_solutions = json.loads((out / "front_solutions.json").read_text())
        some_id = sorted(front_solutions, key=int)[0]
        assert cli_main(["render", "--run", str(out), "--solution-id", some_id]) == 0
        capsys.readouterr()

        merged = tmp_path / "merged.csv"
        assert (
            cli_main(["merge", str(out / "front.csv"), str(out / "front.csv"),
                      "--out", str(merged)])
            == 0
        )
        rows = read_front_csv(merged)
        assert len(rows) == 2 * len(read_front_csv(out / "front.csv"))
        assert (tmp_path / "merged_hist.csv").exists()

    def test_oracle_subcommand(self, tmp_path, capsys):
        assert (
            cli_main(
                ["oracle", "--bins", "50", "--eta", "3", "--state-seed", "0",
                 "--out", str(tmp_path / "oracle")]
            )
            == 0
        )
        out = capsys.readouterr().out
        assert "oracle perf" in out
        assert "eta=3" in out
        assert (tmp_path / "oracle" / "oracle_policy.npz").exists()
        report = json.loads((tmp_path / "oracle" / "oracle_report.json").read_text())
        assert report["bins"] == 50

    def test_bad_config_fails_with_diagnostic(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{broken")
        assert cli_main(["run", "--config", str(bad)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_solution_id_fails(self, tmp_path, capsys):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(dict(SMOKE_KEYS, seed=0)))
        out = tmp_path / "runx"
        cli_main(["run", "--config", str(config_path), "--out", str(out)])
        capsys.readouterr()
        assert cli_main(["render", "--run", str(out), "--solution-id", "999999"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_console_entry_point(self):
        result = subprocess.run(
            [sys.executable, "-m", "fuzzymococo.cli", "--help"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        for sub in ("run", "oracle", "render", "merge"):
            assert sub in result.stdout

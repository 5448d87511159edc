"""The plotting scripts must render the checked-in sample artifacts without
error and reject malformed inputs."""

import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
SAMPLE = HERE / "sample_run"

sys.path.insert(0, str(HERE))

import plot_fronts
import plot_fuzzy_sets


@pytest.fixture
def out_png(tmp_path):
    return tmp_path / "figure.png"


class TestPlotFronts:
    def test_renders_sample_merged_front(self, out_png):
        assert plot_fronts.main([str(SAMPLE / "merged.csv"), "--out", str(out_png)]) == 0
        assert out_png.exists() and out_png.stat().st_size > 0

    def test_jitter_seed_reproducible(self, tmp_path):
        a = tmp_path / "a.png"
        b = tmp_path / "b.png"
        for out in (a, b):
            assert (
                plot_fronts.main(
                    [str(SAMPLE / "merged.csv"), "--out", str(out), "--jitter-seed", "7"]
                )
                == 0
            )
        assert a.read_bytes() == b.read_bytes()

    def test_single_row_renders(self, tmp_path, out_png):
        source = (SAMPLE / "merged.csv").read_text().splitlines()
        single = tmp_path / "single.csv"
        single.write_text("\n".join(source[:2]) + "\n")
        assert plot_fronts.main([str(single), "--out", str(out_png)]) == 0
        assert out_png.exists()

    def test_empty_input_errors_without_image(self, tmp_path, out_png, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text("perf,complexity,tag,runSeed,solutionId\n")
        assert plot_fronts.main([str(empty), "--out", str(out_png)]) == 1
        assert "error:" in capsys.readouterr().err
        assert not out_png.exists()

    def test_schema_mismatch_rejected(self, tmp_path, out_png, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        assert plot_fronts.main([str(bad), "--out", str(out_png)]) == 1
        assert "error:" in capsys.readouterr().err


class TestPlotFuzzySets:
    def test_renders_sample_best_frbs(self, out_png):
        assert (
            plot_fuzzy_sets.main([str(SAMPLE / "best_frbs.json"), "--out", str(out_png)]) == 0
        )
        assert out_png.exists() and out_png.stat().st_size > 0

    def test_four_set_partitions_use_reference_labels(self):
        data = json.loads((SAMPLE / "best_frbs.json").read_text())
        tag = data["tag"]
        assert tag == [4, 4]
        assert data["value_names"][0] == ["FL", "L", "R", "FR"]
        assert data["value_names"][1] == ["VL", "L", "H", "VH"]
        kinds = [s["kind"] for s in data["partitions"][0]["sets"]]
        assert kinds == ["lower_trapezoid", "triangle", "triangle", "upper_trapezoid"]

    def test_no_valley_variant(self, out_png):
        assert (
            plot_fuzzy_sets.main(
                [str(SAMPLE / "best_frbs.json"), "--out", str(out_png), "--no-valley"]
            )
            == 0
        )
        assert out_png.exists()

    def test_missing_fields_rejected(self, tmp_path, out_png, capsys):
        broken = tmp_path / "broken.json"
        broken.write_text(json.dumps({"tag": [2, 2]}))
        assert plot_fuzzy_sets.main([str(broken), "--out", str(out_png)]) == 1
        assert "error:" in capsys.readouterr().err
        assert not out_png.exists()

    def test_membership_curves_bounded(self):
        data = json.loads((SAMPLE / "best_frbs.json").read_text())
        import numpy as np

        for partition, domain in zip(data["partitions"], data["feature_domains"]):
            xs = np.linspace(domain[0], domain[1], 500)
            for fuzzy_set in partition["sets"]:
                ys = plot_fuzzy_sets.membership_curve(fuzzy_set, xs)
                assert ys.min() >= 0.0 and ys.max() <= 1.0

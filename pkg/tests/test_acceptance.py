"""Acceptance criteria, one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s`. The end-to-end criterion
executes five full-scale evolution runs and dominates the runtime (a few
minutes per run); everything else finishes in seconds to a minute.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest

from fuzzymococo.coevo import Hyperparams, run_fuzzy_mococo
from fuzzymococo.experiment import RunConfig, run_experiment
from fuzzymococo.frbs import membership, select_action, Frbs
from fuzzymococo.genotype import (
    DbGenotype,
    RbGenotype,
    decode_db,
    decode_rb,
    genotypic_complexity,
    rb_genotype_length,
    subspace_value_indices,
)
from fuzzymococo.frbs import phenotypic_complexity
from fuzzymococo.mountain_car import McConfig, value_iteration_oracle
from fuzzymococo.nsga import (
    ObjectiveBounds,
    ObjectivePoint,
    crowded_comparison_sort,
    fast_non_dominated_sort,
)
from test_nsga import oracle_ranks, oracle_sorted_indices

pytestmark = pytest.mark.acceptance

TAGS = ((2, 2), (3, 3), (4, 4), (5, 5))
DOMAINS = (McConfig().position_bounds, McConfig().velocity_bounds)


def report(name, detail):
    print(f"\nACCEPTANCE PASS: {name} ({detail})")


class TestOracleBound:
    def test_oracle_perf_within_reference_band(self):
        start = time.time()
        _, perf = value_iteration_oracle(1000, eta=30, state_seed=0)
        elapsed = time.time() - start
        assert elapsed < 300.0
        assert -102.0 <= perf <= -96.0
        report("oracle bound", f"1000 bins, eta=30 -> perf {perf:.2f} in [-102, -96], {elapsed:.0f}s")


class TestRuspiniProperty:
    def test_memberships_sum_to_one(self):
        rng = np.random.default_rng(2001)
        worst = 0.0
        for index in range(1000):
            tag = TAGS[index % len(TAGS)]
            g = DbGenotype(rng.random(sum(tag)), tag)
            db = decode_db(g, DOMAINS)
            for partition in db.partitions:
                lo, hi = partition.feature_domain
                xs = rng.uniform(lo, hi, 1000)
                totals = np.zeros_like(xs)
                for fuzzy_set in partition.sets:
                    totals += np.array([membership(fuzzy_set, x) for x in xs])
                worst = max(worst, float(np.max(np.abs(totals - 1.0))))
        assert worst < 1e-9
        report("Ruspini property", f"1000 genotypes x 1000 points, worst |sum-1| = {worst:.2e}")


class TestComplexityIdentity:
    def test_worked_example_and_random_genotypes(self):
        worked = RbGenotype([2, 0, 1, 1, 2, 1], (3, 2), 2)
        assert genotypic_complexity(worked) == 5
        assert phenotypic_complexity(decode_rb(worked)) == 5
        rng = np.random.default_rng(2002)
        for index in range(10000):
            tag = TAGS[index % len(TAGS)]
            alleles = rng.integers(0, 3, size=rb_genotype_length(tag))
            g = RbGenotype(alleles, tag, 2)
            assert phenotypic_complexity(decode_rb(g)) == genotypic_complexity(g)
        report("complexity identity", "10000 genotypes, phenotypic == genotypic exactly")


class TestNsgaOracleEquivalence:
    def test_sorts_match_bruteforce(self):
        rng = np.random.default_rng(2003)
        bounds = ObjectiveBounds((-200.0, -96.0), (2.0, 25.0))
        for _ in range(1000):
            n = int(rng.integers(1, 51))
            points = [
                ObjectivePoint(float(np.round(rng.uniform(-200, -96), 1)), int(rng.integers(2, 26)))
                for _ in range(n)
            ]
            assert fast_non_dominated_sort(points) == oracle_ranks(points)
            ours = crowded_comparison_sort(list(range(n)), points=points, bounds=bounds)
            assert ours == oracle_sorted_indices(points, bounds)
        report("NSGA oracle equivalence", "1000 random sets of <= 50 points, exact match")


class TestEndToEndEvolution:
    def test_reference_config_five_seeds(self):
        seeds = (0, 1, 2, 3, 4)
        hits = 0
        comp2_runs = 0
        details = []
        for seed in seeds:
            start = time.time()
            result = run_fuzzy_mococo(Hyperparams(), seed=seed)
            elapsed = time.time() - start
            assert elapsed < 1800.0
            good = [s for s in result.front if s.perf >= -110.0 and s.complexity <= 10]
            has_comp2 = any(s.complexity == 2 for s in result.front)
            hits += bool(good)
            comp2_runs += has_comp2
            best = max(result.front, key=lambda s: s.perf)
            details.append(
                f"seed {seed}: best ({best.complexity}, {best.perf:.2f}), "
                f"good={len(good)}, comp2={has_comp2}, {elapsed:.0f}s"
            )
        print()
        for line in details:
            print("  " + line)
        assert hits >= 3, f"only {hits}/5 runs reached perf >= -110 at complexity <= 10"
        assert comp2_runs == len(seeds), f"only {comp2_runs}/5 fronts held a complexity-2 entry"
        report(
            "end-to-end evolution",
            f"{hits}/5 runs with (perf >= -110, complexity <= 10); comp-2 in {comp2_runs}/5 fronts",
        )

    def test_smoke_config_under_a_minute(self, tmp_path):
        hp = Hyperparams(num_gens=10, db_pop_size=60, rb_pop_size=120, eta=10)
        start = time.time()
        result = run_fuzzy_mococo(hp, seed=0)
        elapsed = time.time() - start
        assert elapsed < 60.0
        assert result.front
        report("smoke config", f"numGens=10, sizes 60/120, eta=10 finished in {elapsed:.1f}s")


class TestExactlyOnceEvaluation:
    def test_every_individual_credited_once(self):
        hp = Hyperparams(num_gens=12, db_pop_size=60, rb_pop_size=120, eta=10)
        result = run_fuzzy_mococo(hp, seed=11)
        counts = [idv.credit_assignments for idv in result.all_individuals]
        assert counts and all(c == 1 for c in counts)
        report("exactly-once evaluation", f"{len(counts)} individuals, all credited exactly once")


class TestDeterminism:
    def test_front_csv_and_manifest_byte_identical(self, tmp_path):
        hp_keys = dict(num_gens=8, db_pop_size=50, rb_pop_size=100, eta=8)
        paths = []
        for name in ("a", "b"):
            config = RunConfig(Hyperparams(**hp_keys), 21, str(tmp_path / name))
            paths.append(run_experiment(config))
        front_a = Path(paths[0]["front"]).read_bytes()
        front_b = Path(paths[1]["front"]).read_bytes()
        assert front_a == front_b
        manifest_a = json.loads(Path(paths[0]["manifest"]).read_text())
        manifest_b = json.loads(Path(paths[1]["manifest"]).read_text())
        manifest_a["config"].pop("out_dir")
        manifest_b["config"].pop("out_dir")
        assert manifest_a == manifest_b
        report("determinism", "same config+seed -> byte-identical front CSVs, equal manifests")


class TestPrototypeFidelity:
    def test_specified_subspace_prototypes_recover_alleles(self):
        rng = np.random.default_rng(2005)
        checked = 0
        for index in range(1000):
            tag = TAGS[index % len(TAGS)]
            db_g = DbGenotype(rng.random(sum(tag)), tag)
            alleles = rng.integers(0, 3, size=rb_genotype_length(tag))
            if not alleles.any():
                alleles[0] = 1
            rb_g = RbGenotype(alleles, tag, 2)
            frbs = Frbs(decode_db(db_g, DOMAINS), decode_rb(rb_g))
            prototypes = []
            for partition in frbs.db.partitions:
                refs = partition.reference_coordinates
                lo, hi = partition.feature_domain
                points = [(lo + refs[0]) / 2.0]
                points.extend(float(r) for r in refs[1:-1])
                points.append((refs[-1] + hi) / 2.0)
                prototypes.append(points)
            for indices, allele in zip(subspace_value_indices(tag), rb_g.alleles):
                if allele == 0:
                    continue
                x = [prototypes[i][j] for i, j in enumerate(indices)]
                assert select_action(frbs, x) == int(allele)
                checked += 1
        assert checked > 0
        report("prototype fidelity", f"{checked} specified prototype points all recover their allele")

"""Run a small coevolution and watch the performance/complexity front form.

Run: python demos/04_coevolution_smoke.py   (about half a minute)
"""

import time

from fuzzymococo.coevo import Hyperparams, run_fuzzy_mococo
from fuzzymococo.experiment import RunConfig, render_rules

hp = Hyperparams(num_gens=10, db_pop_size=60, rb_pop_size=120, eta=10)
start = time.time()
result = run_fuzzy_mococo(hp, seed=0)
print(f"10 generations in {time.time() - start:.1f}s")

print("\ngen  best     mean     |F1|")
for rec in result.records:
    print(f"{rec.gen:3d}  {rec.best_perf:7.1f}  {rec.mean_perf:7.1f}  {rec.front1_size:4d}")

front = sorted({(s.complexity, round(s.perf, 2)) for s in result.front})
print(f"\nfinal non-dominated front ({len(result.front)} solutions, "
      f"{len(front)} distinct objective points):")
for complexity, perf in front:
    print(f"  complexity {complexity:2d}: perf {perf:8.2f}")

best = max(result.front, key=lambda s: s.perf)
config = RunConfig(hp, 0, "unused")
print(f"\nbest solution (tag {best.db.tag}, perf {best.perf:.2f}):")
print(render_rules(
    best.frbs,
    config.value_names_for_tag(best.db.tag),
    config.feature_names,
    config.action_names,
))

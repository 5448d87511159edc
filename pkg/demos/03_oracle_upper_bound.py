"""Estimate the Mountain Car performance ceiling with value iteration at a
modest resolution, then roll the greedy policy out in the continuous
environment.

Run: python demos/03_oracle_upper_bound.py
(Use bins=1000 to reproduce the reference bound; that takes a few minutes.)
"""

import time

from fuzzymococo.mountain_car import (
    eval_performance,
    rollout,
    sample_initial_states,
    value_iteration_oracle,
)

for bins in (2, 50, 200):
    start = time.time()
    policy, perf = value_iteration_oracle(bins, eta=30, state_seed=0)
    print(f"bins={bins:4d}: perf={perf:8.2f}   ({time.time() - start:.1f}s)")

print("\nPer-start returns of the 200-bin policy:")
z = sample_initial_states(0, 10)
for s0 in z.states:
    print(f"  start x={s0.x:+.3f}: G={rollout(policy, s0):6.0f}")

print("\nCompare with trivial policies:")
always_left = lambda s: 1
pump = lambda s: 1 if s.v < 0 else 2
print(f"  always-left: {eval_performance(always_left, z).perf:8.2f}")
print(f"  pump:        {eval_performance(pump, z).perf:8.2f}")

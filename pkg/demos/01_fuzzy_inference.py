"""Walk through fuzzy inference by hand: decode a data base, inspect the
partitions, fire CNF rules and watch the action vote.

Run: python demos/01_fuzzy_inference.py
"""

import numpy as np

from fuzzymococo.frbs import Frbs, membership, select_action, voting_strengths
from fuzzymococo.genotype import DbGenotype, RbGenotype, decode_db, decode_rb

# A (3, 2) subspecies: three fuzzy sets on feature one, two on feature two.
tag = (3, 2)
domains = [(0.0, 1.0), (0.0, 1.0)]

db_genotype = DbGenotype([0.5, 0.5, 0.5, 0.25, 0.75], tag)
db = decode_db(db_genotype, domains)

print("Decoded partitions (reference coordinates):")
for i, partition in enumerate(db.partitions):
    refs = ", ".join(f"{r:.4f}" for r in partition.reference_coordinates)
    print(f"  feature {i + 1}: {partition.num_sets} sets at [{refs}]")

print("\nMembership sums stay at 1 across the domain (Ruspini property):")
for x in np.linspace(0, 1, 5):
    sums = [sum(membership(s, x) for s in p.sets) for p in db.partitions]
    print(f"  x={x:.2f}: " + ", ".join(f"{v:.12f}" for v in sums))

# One gene per fuzzy subspace, in nested-loop order; 0 leaves a gap.
rb_genotype = RbGenotype([2, 0, 1, 1, 2, 1], tag, 2)
rb = decode_rb(rb_genotype)

print("\nDecoded CNF rules (after merging):")
for rule in rb.rules:
    masks = [f"{m:0{w}b}"[::-1] for m, w in zip(rule.masks, tag)]
    print(f"  {' | '.join(masks)} -> action {rule.action}")

frbs = Frbs(db, rb)
print("\nVoting across a sweep of inputs:")
for x1 in (0.1, 0.5, 0.9):
    for x2 in (0.2, 0.8):
        g = voting_strengths(frbs, [x1, x2])
        action = select_action(frbs, [x1, x2])
        print(f"  x=({x1:.1f}, {x2:.1f}): g={np.round(g, 3)} -> action {action}")

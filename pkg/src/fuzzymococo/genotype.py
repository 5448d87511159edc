"""Genetic encodings for both coevolving species and their decoders.

Every individual carries an immutable subspecies tag: a tuple of per-feature
fuzzy-set counts. The tag fixes genotype lengths for both species and
restricts which individuals may cooperate.

Data-base genotypes hold one reference-coordinate fraction in [0, 1] per
fuzzy set. Rule-base genotypes hold one allele per fuzzy subspace, either an
action index or 0 for "unspecified"; decoding merges the specified subspaces
into CNF rules Karnaugh-map style.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod

import numpy as np

from .frbs import (
    LOWER_TRAPEZOID,
    TRIANGLE,
    UPPER_TRAPEZOID,
    CnfRule,
    DataBase,
    FuzzyPartition,
    FuzzySet,
    RuleBase,
)

DEFAULT_REFERENCE_MARGIN = 0.75


def validate_tag(tag) -> tuple[int, ...]:
    tag = tuple(int(m) for m in tag)
    if not tag or any(m < 2 for m in tag):
        raise ValueError(f"subspecies tag needs d integers >= 2, got {tag}")
    return tag


def db_genotype_length(tag) -> int:
    """Genes needed to encode the fuzzy sets of every feature: sum of counts."""
    return sum(validate_tag(tag))


def rb_genotype_length(tag) -> int:
    """One gene per fuzzy subspace: product of per-feature set counts."""
    return prod(validate_tag(tag))


def subspace_value_indices(tag):
    """Per-gene tuples of 0-based set indices, in gene order.

    Gene order follows nested loops over the features with the last feature
    varying fastest, e.g. tag (3, 2) yields (0,0) (0,1) (1,0) (1,1) (2,0) (2,1).
    """
    return itertools.product(*(range(m) for m in validate_tag(tag)))


@dataclass(eq=False)
class DbGenotype:
    """Reference-coordinate fractions in [0, 1], one per fuzzy set."""

    alleles: np.ndarray
    tag: tuple[int, ...]

    def __post_init__(self):
        self.tag = validate_tag(self.tag)
        self.alleles = np.asarray(self.alleles, dtype=float)
        if self.alleles.shape != (db_genotype_length(self.tag),):
            raise ValueError(
                f"tag {self.tag} needs {db_genotype_length(self.tag)} alleles, "
                f"got {self.alleles.shape}"
            )
        if np.any(self.alleles < 0.0) or np.any(self.alleles > 1.0):
            raise ValueError("alleles must lie in [0, 1]")
        self.alleles.flags.writeable = False


@dataclass(eq=False)
class RbGenotype:
    """Per-subspace action alleles; 0 leaves the subspace unspecified."""

    alleles: np.ndarray
    tag: tuple[int, ...]
    n_actions: int

    def __post_init__(self):
        self.tag = validate_tag(self.tag)
        self.alleles = np.asarray(self.alleles, dtype=np.int64)
        if self.alleles.shape != (rb_genotype_length(self.tag),):
            raise ValueError(
                f"tag {self.tag} needs {rb_genotype_length(self.tag)} alleles, "
                f"got {self.alleles.shape}"
            )
        if self.n_actions < 1:
            raise ValueError("need at least one action")
        if np.any(self.alleles < 0) or np.any(self.alleles > self.n_actions):
            raise ValueError(f"alleles must lie in 0..{self.n_actions}")
        self.alleles.flags.writeable = False


@dataclass(frozen=True)
class ComplexityBounds:
    """Inclusive rule-base complexity range over a set of subspecies tags."""

    min: int
    max: int

    def __post_init__(self):
        if self.min > self.max:
            raise ValueError(f"empty complexity range [{self.min}, {self.max}]")


def complexity_bounds(tags, n_actions: int) -> ComplexityBounds:
    """Minimum is the action count (one rule per action can always be afforded);
    maximum is the longest rule-base genotype over the tag set."""
    tags = list(tags)
    if not tags:
        raise ValueError("need at least one subspecies tag")
    return ComplexityBounds(n_actions, max(rb_genotype_length(t) for t in tags))


def genotypic_complexity(g: RbGenotype) -> int:
    """Number of specified alleles, identical to the decoded rule base's
    decision-point count."""
    return int(np.count_nonzero(g.alleles))


def default_value_names(m: int) -> tuple[str, ...]:
    return tuple(f"V{j + 1}" for j in range(m))


def decode_db(
    g: DbGenotype,
    domains,
    reference_margin: float = DEFAULT_REFERENCE_MARGIN,
    value_names=None,
) -> DataBase:
    """Decode reference-coordinate fractions into trapezoid/triangle partitions.

    Each feature domain is split into m equal subdomains. The central
    `reference_margin` fraction of each subdomain is its valid region, and the
    allele places a reference coordinate inside it, measuring from the left.
    The first and last coordinates anchor trapezoidal shoulders, the rest are
    triangle peaks; keeping coordinates inside valid regions enforces a
    minimum separation of (1 - margin) * subdomain width between neighbours.
    """
    if not 0.0 < reference_margin <= 1.0:
        raise ValueError(f"reference margin must be in (0, 1], got {reference_margin}")
    if len(domains) != len(g.tag):
        raise ValueError("one domain interval per feature required")
    partitions = []
    offset = 0
    for i, m in enumerate(g.tag):
        f_min, f_max = (float(b) for b in domains[i])
        width = (f_max - f_min) / m
        alleles = g.alleles[offset : offset + m]
        offset += m
        valid_width = reference_margin * width
        starts = f_min + np.arange(m) * width + 0.5 * (width - valid_width)
        refs = starts + alleles * valid_width
        sets = [FuzzySet(LOWER_TRAPEZOID, (float(refs[0]), float(refs[1])))]
        for j in range(1, m - 1):
            sets.append(
                FuzzySet(TRIANGLE, (float(refs[j - 1]), float(refs[j]), float(refs[j + 1])))
            )
        sets.append(FuzzySet(UPPER_TRAPEZOID, (float(refs[m - 2]), float(refs[m - 1]))))
        names = tuple(value_names[i]) if value_names is not None else default_value_names(m)
        partitions.append(FuzzyPartition((f_min, f_max), tuple(sets), names))
    return DataBase(tuple(partitions), g.tag)


def _merge_once(rules: list[CnfRule]) -> bool:
    """Merge the first mergeable rule pair in ascending index order.

    Two rules merge iff they vote for the same action and their masks agree in
    all clauses but exactly one; the differing clause becomes the union. The
    earlier rule absorbs the later one. Returns True if a merge happened.
    """
    for i in range(len(rules)):
        for j in range(i + 1, len(rules)):
            a, b = rules[i], rules[j]
            if a.action != b.action:
                continue
            differing = [k for k, (ma, mb) in enumerate(zip(a.masks, b.masks)) if ma != mb]
            if len(differing) != 1:
                continue
            k = differing[0]
            masks = list(a.masks)
            masks[k] = a.masks[k] | b.masks[k]
            rules[i] = CnfRule(tuple(masks), a.action)
            del rules[j]
            return True
    return False


def decode_rb(g: RbGenotype) -> RuleBase:
    """Decode subspace alleles into merged CNF rules.

    Every specified allele first becomes an elementary rule (one value per
    clause); the rule list is then merged to a fixpoint, rescanning from the
    start after every merge so the merge order is fixed. An all-unspecified
    genotype decodes to an empty rule base.
    """
    rules: list[CnfRule] = []
    for indices, allele in zip(subspace_value_indices(g.tag), g.alleles):
        if allele != 0:
            masks = tuple(1 << j for j in indices)
            rules.append(CnfRule(masks, int(allele)))
    while _merge_once(rules):
        pass
    return RuleBase(tuple(rules), g.tag, g.n_actions)


def serialize_db_genotype(g: DbGenotype) -> dict:
    return {"tag": list(g.tag), "alleles": [float(a) for a in g.alleles]}


def serialize_rb_genotype(g: RbGenotype) -> dict:
    return {
        "tag": list(g.tag),
        "alleles": [int(a) for a in g.alleles],
        "n_actions": g.n_actions,
    }

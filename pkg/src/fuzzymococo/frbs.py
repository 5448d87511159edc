"""Zero-order Takagi-Sugeno-Kang fuzzy rule-based systems.

A system pairs per-feature fuzzy partitions (the data base) with CNF fuzzy
rules acting over those partitions (the rule base). Each rule votes fully for
a single action, weighted by its firing strength; the system's complexity is
the number of elementary decision points its rules span.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LOWER_TRAPEZOID = "lower_trapezoid"
TRIANGLE = "triangle"
UPPER_TRAPEZOID = "upper_trapezoid"

_NUM_BREAKPOINTS = {LOWER_TRAPEZOID: 2, TRIANGLE: 3, UPPER_TRAPEZOID: 2}


class CoverageFailure(Exception):
    """No rule fires at the queried input state."""


@dataclass(frozen=True)
class FuzzySet:
    """A piecewise-linear fuzzy set: trapezoidal shoulder or triangle.

    Breakpoints by kind:
      lower_trapezoid  (plateau_end, zero): 1 on [domain_min, plateau_end],
                       descending to 0 at `zero`
      triangle         (left_zero, peak, right_zero)
      upper_trapezoid  (zero, plateau_start): 0 up to `zero`, ascending to 1
                       at plateau_start, 1 beyond
    """

    kind: str
    breakpoints: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in _NUM_BREAKPOINTS:
            raise ValueError(f"unknown fuzzy set kind {self.kind!r}")
        if len(self.breakpoints) != _NUM_BREAKPOINTS[self.kind]:
            raise ValueError(
                f"{self.kind} needs {_NUM_BREAKPOINTS[self.kind]} breakpoints, "
                f"got {len(self.breakpoints)}"
            )
        if not all(a < b for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError(f"breakpoints must be strictly increasing: {self.breakpoints}")


def membership(fset: FuzzySet, x: float) -> float:
    """Degree of membership of x in fset, in [0, 1].

    Piecewise-linear interpolation of the set's geometry; 1 on plateaus and
    peaks, 0 outside the support.
    """
    if fset.kind == LOWER_TRAPEZOID:
        plateau_end, zero = fset.breakpoints
        if x <= plateau_end:
            return 1.0
        if x >= zero:
            return 0.0
        return (zero - x) / (zero - plateau_end)
    if fset.kind == UPPER_TRAPEZOID:
        zero, plateau_start = fset.breakpoints
        if x <= zero:
            return 0.0
        if x >= plateau_start:
            return 1.0
        return (x - zero) / (plateau_start - zero)
    left, peak, right = fset.breakpoints
    if x <= left or x >= right:
        return 0.0
    if x <= peak:
        return (x - left) / (peak - left)
    return (right - x) / (right - peak)


@dataclass(frozen=True)
class FuzzyPartition:
    """An ordered fuzzy partition of one feature domain.

    The first set is a lower trapezoid, the last an upper trapezoid and all
    inner sets triangles, so that memberships sum to 1 everywhere on the
    domain (Ruspini partition) when built by the genotype decoder.
    """

    feature_domain: tuple[float, float]
    sets: tuple[FuzzySet, ...]
    value_names: tuple[str, ...]

    def __post_init__(self):
        lo, hi = self.feature_domain
        if not lo < hi:
            raise ValueError(f"empty feature domain [{lo}, {hi}]")
        m = len(self.sets)
        if m < 2:
            raise ValueError("a partition needs at least 2 fuzzy sets")
        if self.sets[0].kind != LOWER_TRAPEZOID or self.sets[-1].kind != UPPER_TRAPEZOID:
            raise ValueError("outer sets must be trapezoidal shoulders")
        if any(s.kind != TRIANGLE for s in self.sets[1:-1]):
            raise ValueError("inner sets must be triangles")
        if len(self.value_names) != m:
            raise ValueError(f"need {m} value names, got {len(self.value_names)}")

    @property
    def num_sets(self) -> int:
        return len(self.sets)

    def clamp(self, x: float) -> float:
        lo, hi = self.feature_domain
        return min(max(x, lo), hi)

    def fuzzify(self, x: float) -> np.ndarray:
        """Memberships of x (clamped to the domain) in every set."""
        xc = self.clamp(x)
        return np.array([membership(s, xc) for s in self.sets])

    @property
    def reference_coordinates(self) -> np.ndarray:
        """The m reference coordinates the partition was drawn through."""
        refs = [self.sets[0].breakpoints[0]]
        refs += [s.breakpoints[1] for s in self.sets[1:-1]]
        refs.append(self.sets[-1].breakpoints[1])
        return np.array(refs)


@dataclass(frozen=True)
class DataBase:
    """The fuzzy partitions for all features, at the granularity of `tag`."""

    partitions: tuple[FuzzyPartition, ...]
    tag: tuple[int, ...]

    def __post_init__(self):
        if len(self.partitions) != len(self.tag):
            raise ValueError("one partition per feature required")
        for i, (p, m) in enumerate(zip(self.partitions, self.tag)):
            if p.num_sets != m:
                raise ValueError(f"partition {i} has {p.num_sets} sets, tag says {m}")

    def fuzzify(self, x) -> list[np.ndarray]:
        return [p.fuzzify(xi) for p, xi in zip(self.partitions, x)]


@dataclass(frozen=True)
class CnfRule:
    """A CNF fuzzy rule: per-feature disjunction masks and a single action.

    masks[i] is a bitmask over feature i's linguistic values (bit j set means
    value j is selected); the antecedent is the conjunction over features of
    those disjunctions. GABIL-style, with a one-hot consequent reduced to the
    action index.
    """

    masks: tuple[int, ...]
    action: int

    def __post_init__(self):
        if any(m <= 0 for m in self.masks):
            raise ValueError("every clause must select at least one linguistic value")
        if self.action < 1:
            raise ValueError(f"action indices start at 1, got {self.action}")

    def decision_points(self) -> int:
        """Number of elementary rules (fuzzy subspaces) this rule spans."""
        n = 1
        for m in self.masks:
            n *= m.bit_count()
        return n


@dataclass(frozen=True)
class RuleBase:
    """An ordered list of CNF rules over the subspaces of `tag`."""

    rules: tuple[CnfRule, ...]
    tag: tuple[int, ...]
    n_actions: int

    def __post_init__(self):
        for r in self.rules:
            if len(r.masks) != len(self.tag):
                raise ValueError("rule arity does not match tag dimensionality")
            for mask, m in zip(r.masks, self.tag):
                if mask >= (1 << m):
                    raise ValueError(f"mask {mask:b} out of range for {m} values")
            if r.action > self.n_actions:
                raise ValueError(f"action {r.action} exceeds n_actions={self.n_actions}")
        # No two rules may claim a common fuzzy subspace (no redundancy and no
        # contradictions, regardless of consequent).
        for i in range(len(self.rules)):
            for j in range(i + 1, len(self.rules)):
                a, b = self.rules[i], self.rules[j]
                if all(ma & mb for ma, mb in zip(a.masks, b.masks)):
                    raise ValueError(f"rules {i} and {j} overlap in a fuzzy subspace")


@dataclass(frozen=True)
class Frbs:
    """An executable policy: a rule base paired with its data base."""

    db: DataBase
    rb: RuleBase

    def __post_init__(self):
        if self.db.tag != self.rb.tag:
            raise ValueError(f"tag mismatch: db {self.db.tag} vs rb {self.rb.tag}")


def rule_firing_strength(rule: CnfRule, memberships) -> float:
    """Antecedent truth value: min over clauses of max over selected degrees."""
    tau = 1.0
    for mask, degrees in zip(rule.masks, memberships):
        clause = 0.0
        for j, d in enumerate(degrees):
            if mask >> j & 1 and d > clause:
                clause = float(d)
        if clause < tau:
            tau = clause
    return tau


def voting_strengths(frbs: Frbs, x) -> np.ndarray:
    """Normalized per-action voting strengths at state x.

    Raises CoverageFailure when no rule fires (total firing strength is
    exactly zero, which happens iff x lies outside every rule's support).
    """
    memberships = frbs.db.fuzzify(x)
    g = np.zeros(frbs.rb.n_actions)
    total = 0.0
    for rule in frbs.rb.rules:
        tau = rule_firing_strength(rule, memberships)
        g[rule.action - 1] += tau
        total += tau
    if total == 0.0:
        raise CoverageFailure(f"no rule covers state {x}")
    return g / total


def select_action(frbs: Frbs, x) -> int:
    """Action with the largest voting strength; ties go to the lowest index."""
    return int(np.argmax(voting_strengths(frbs, x))) + 1


def phenotypic_complexity(rb: RuleBase) -> int:
    """Total decision points across the rule base (sum of per-rule products)."""
    return sum(r.decision_points() for r in rb.rules)


def format_mask(mask: int, names) -> str:
    """One antecedent clause: a name, an {a or b} disjunction, or '#'."""
    selected = [names[j] for j in range(len(names)) if mask >> j & 1]
    if len(selected) == len(names):
        return "#"
    if len(selected) == 1:
        return selected[0]
    return "{" + " or ".join(selected) + "}"


def render_rule(rule: CnfRule, value_names, feature_names, action_names=None) -> str:
    """Render one rule as 'IF x1 is ... and x2 is ... THEN a is K (Name)'."""
    clauses = [
        f"{fname} is {format_mask(mask, names)}"
        for fname, mask, names in zip(feature_names, rule.masks, value_names)
    ]
    text = f"IF {' and '.join(clauses)} THEN a is {rule.action}"
    if action_names and rule.action in action_names:
        text += f" ({action_names[rule.action]})"
    return text

"""The multiobjective cooperative-coevolution engine.

Two species evolve side by side: data-base individuals (fuzzy partitions) and
rule-base individuals (subspace action maps). Individuals carry immutable
subspecies tags and cooperate only intra-tag. Each generation builds full
solutions by pairing the population under evaluation with collaborators drawn
from the parent populations, scores the solutions on (performance,
complexity), credits each individual with the objectives of the best solution
it joined, then archives parents and breeds children NSGA-II style with
per-tag resource allocation.

The bootstrap generation evaluates the initial parents against each other;
every later generation evaluates the freshly bred children against parent
collaborators, so every individual is evaluated exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fastsim import eval_frbs_performance
from .frbs import Frbs
from .genotype import (
    DbGenotype,
    RbGenotype,
    complexity_bounds,
    db_genotype_length,
    decode_db,
    decode_rb,
    genotypic_complexity,
    rb_genotype_length,
    validate_tag,
)
from .mountain_car import InitialStateSet, McConfig, sample_initial_states
from .nsga import (
    MoAnnotation,
    ObjectiveBounds,
    ObjectivePoint,
    _crowding_from_arrays,
    annotate,
    dominance_matrix,
)

DB_SPECIES = "db"
RB_SPECIES = "rb"


@dataclass(eq=False)
class Individual:
    """One member of either species; the tag never changes and the credited
    objective pair is assigned exactly once, when its birth cohort is
    evaluated."""

    genotype: DbGenotype | RbGenotype
    credit: tuple[float, float] | None = None
    credit_assignments: int = 0

    @property
    def tag(self) -> tuple[int, ...]:
        return self.genotype.tag

    @property
    def species(self) -> str:
        return DB_SPECIES if isinstance(self.genotype, DbGenotype) else RB_SPECIES


@dataclass(frozen=True)
class SubspeciesPmf:
    """Probability mass over subspecies tags, used to allocate search effort."""

    tags: tuple[tuple[int, ...], ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        if len(self.tags) != len(self.probabilities) or not self.tags:
            raise ValueError("need one probability per tag")
        if any(p <= 0 for p in self.probabilities):
            raise ValueError("probabilities must be positive")
        if abs(sum(self.probabilities) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {sum(self.probabilities)}, not 1")

    def prob(self, tag) -> float:
        return self.probabilities[self.tags.index(tag)]

    def sample(self, rng: np.random.Generator) -> tuple[int, ...]:
        cumulative = np.cumsum(self.probabilities)
        return self.tags[int(np.searchsorted(cumulative, rng.random(), side="right"))]

    def restricted_to(self, tags) -> "SubspeciesPmf":
        keep = [t for t in self.tags if t in set(tags)]
        if not keep:
            raise ValueError("cannot restrict PMF to an empty tag set")
        total = sum(self.prob(t) for t in keep)
        return SubspeciesPmf(tuple(keep), tuple(self.prob(t) / total for t in keep))


@dataclass(frozen=True)
class Hyperparams:
    """All evolutionary knobs. Defaults are the reference Mountain Car setup."""

    num_gens: int = 50
    db_pop_size: int = 300
    rb_pop_size: int = 600
    db_p_cross: float = 0.75
    db_mut_sigma: float = 0.02
    rb_p_cross: float = 0.25
    rb_p_mut: float = 0.05
    rb_p_unspec: float = 0.1
    beta: float = 1.125
    eta: int = 30
    omega: float = 0.75
    subspecies_tags: tuple[tuple[int, ...], ...] = ((2, 2), (3, 3), (4, 4), (5, 5))

    def __post_init__(self):
        for name in ("db_p_cross", "rb_p_cross", "rb_p_mut", "rb_p_unspec"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} is not a probability")
        if self.db_mut_sigma < 0:
            raise ValueError("db_mut_sigma must be nonnegative")
        if self.beta < 1.0:
            raise ValueError("beta must be >= 1")
        if self.num_gens < 1 or self.db_pop_size < 1 or self.rb_pop_size < 1:
            raise ValueError("generation count and population sizes must be positive")
        if self.eta < 1:
            raise ValueError("eta must be positive")
        if not 0.0 < self.omega <= 1.0:
            raise ValueError("omega must lie in (0, 1]")
        tags = tuple(validate_tag(t) for t in self.subspecies_tags)
        if len(set(len(t) for t in tags)) != 1:
            raise ValueError("all subspecies tags must share dimensionality")
        if len(set(tags)) != len(tags):
            raise ValueError("duplicate subspecies tags")
        object.__setattr__(self, "subspecies_tags", tags)


@dataclass(eq=False)
class Solution:
    """A decoded FRBS plus the identities of the individuals that formed it."""

    db: Individual
    rb: Individual
    frbs: Frbs
    complexity: int
    perf: float | None = None
    failed: bool = False
    annotation: MoAnnotation | None = None

    @property
    def objectives(self) -> ObjectivePoint:
        return ObjectivePoint(self.perf, self.complexity)


@dataclass
class GenerationRecord:
    gen: int
    n_solutions: int
    front1_size: int
    best_perf: float
    mean_perf: float
    db_tag_counts: dict = field(default_factory=dict)
    rb_tag_counts: dict = field(default_factory=dict)


@dataclass
class RunResult:
    """Final combined populations, the last evaluated solution set and its
    non-dominated front, plus bookkeeping for reproducibility checks."""

    db_population: list
    rb_population: list
    solutions: list
    front: list
    all_individuals: list
    records: list
    initial_states: InitialStateSet
    bounds: ObjectiveBounds


def make_subspecies_dists(tags, beta: float):
    """Per-species tag PMFs proportional to beta ** genotype_length, so larger
    search spaces receive more of the population."""
    tags = tuple(validate_tag(t) for t in tags)
    if beta < 1.0:
        raise ValueError("beta must be >= 1")
    dists = []
    for length in (db_genotype_length, rb_genotype_length):
        weights = np.array([float(beta) ** length(t) for t in tags])
        probs = weights / weights.sum()
        dists.append(SubspeciesPmf(tags, tuple(float(p) for p in probs)))
    return dists[0], dists[1]


def init_db_pop(pmf: SubspeciesPmf, size: int, rng: np.random.Generator) -> list[Individual]:
    """Tags sampled from the PMF, alleles i.i.d. uniform on [0, 1]."""
    pop = []
    for _ in range(size):
        tag = pmf.sample(rng)
        alleles = rng.random(db_genotype_length(tag))
        pop.append(Individual(DbGenotype(alleles, tag)))
    return pop


def _repair_rb_alleles(alleles: np.ndarray, n_actions: int, rng: np.random.Generator):
    """Raise the genotype to minimum complexity: specify random unspecified
    alleles with random actions until n_actions alleles are specified."""
    while np.count_nonzero(alleles) < n_actions:
        unspecified = np.flatnonzero(alleles == 0)
        position = unspecified[int(rng.integers(len(unspecified)))]
        alleles[position] = int(rng.integers(1, n_actions + 1))


def init_rb_pop(
    pmf: SubspeciesPmf,
    size: int,
    rb_p_unspec: float,
    n_actions: int,
    rng: np.random.Generator,
) -> list[Individual]:
    """Each allele is unspecified with probability rb_p_unspec, otherwise a
    uniform action; repaired up to minimum complexity."""
    pop = []
    for _ in range(size):
        tag = pmf.sample(rng)
        length = rb_genotype_length(tag)
        unspecified = rng.random(length) < rb_p_unspec
        actions = rng.integers(1, n_actions + 1, size=length)
        alleles = np.where(unspecified, 0, actions)
        _repair_rb_alleles(alleles, n_actions, rng)
        pop.append(Individual(RbGenotype(alleles, tag, n_actions)))
    return pop


def group_by_tag(population) -> dict:
    groups: dict = {}
    for idv in population:
        groups.setdefault(idv.tag, []).append(idv)
    return groups


def _credit_points(subpop) -> list[ObjectivePoint]:
    return [ObjectivePoint(idv.credit[0], idv.credit[1]) for idv in subpop]


def _merit_key(annotations, points):
    """Crowded-comparison order with deterministic merit tie-breaking.

    Exact (rank, crowding) ties are frequent here because whole clusters of
    equal objective vectors share boundary status; resolving them by input
    order would freeze accidents of the initial shuffle into selection, so
    ties fall through to higher performance, then lower complexity.
    """

    def key(i):
        a = annotations[i]
        p = points[i]
        return (a.rank, -a.crowding_dist, -p.perf, p.complexity)

    return key


def select_collabrs(subpop, gen: int, rng: np.random.Generator, bounds: ObjectiveBounds):
    """Two collaborators from one subpopulation.

    The bootstrap generation picks two uniformly at random (without
    replacement when possible); later generations pick the crowded-comparison
    best (merit ties, so the top performer among boundary-tied members) plus
    one uniform pick from the remainder. A singleton subpopulation is
    duplicated, an empty one yields no collaborators.
    """
    if not subpop:
        return []
    if len(subpop) == 1:
        return [subpop[0], subpop[0]]
    if gen == 0:
        first, second = rng.choice(len(subpop), size=2, replace=False)
        return [subpop[int(first)], subpop[int(second)]]
    points = _credit_points(subpop)
    annotations = annotate(points, bounds)
    best = min(range(len(subpop)), key=_merit_key(annotations, points))
    rest = [i for i in range(len(subpop)) if i != best]
    return [subpop[best], subpop[rest[int(rng.integers(len(rest)))]]]


def build_collabr_map(p1, p2, tags, gen, rng, bounds) -> dict:
    """Collaborators per (species index, tag), drawn from the parent pops."""
    chi = {}
    for i, pop in ((1, p1), (2, p2)):
        groups = group_by_tag(pop)
        for tag in tags:
            chi[(i, tag)] = select_collabrs(groups.get(tag, []), gen, rng, bounds)
    return chi


def make_solution(db_idv: Individual, rb_idv: Individual, domains, omega: float) -> Solution:
    if db_idv.tag != rb_idv.tag:
        raise ValueError("cooperation is restricted to matching tags")
    frbs = Frbs(decode_db(db_idv.genotype, domains, omega), decode_rb(rb_idv.genotype))
    return Solution(db_idv, rb_idv, frbs, genotypic_complexity(rb_idv.genotype))


def build_soln_set(o1, o2, tags, chi, domains, omega: float) -> list[Solution]:
    """Pair every individual with its opposite-species collaborators;
    duplicate pairings collapse to the first occurrence."""
    solutions: dict = {}
    for i, pop in ((1, o1), (2, o2)):
        j = 2 if i == 1 else 1
        groups = group_by_tag(pop)
        for tag in tags:
            collabrs = chi.get((j, tag), [])
            for idv in groups.get(tag, []):
                for collabr in collabrs:
                    db, rb = (idv, collabr) if i == 1 else (collabr, idv)
                    key = (id(db), id(rb))
                    if key not in solutions:
                        solutions[key] = make_solution(db, rb, domains, omega)
    return list(solutions.values())


def eval_soln_set(solutions, z: InitialStateSet, config: McConfig, bounds: ObjectiveBounds):
    """Score every solution and attach global front ranks and crowding."""
    if not solutions:
        return
    for sol in solutions:
        result = eval_frbs_performance(sol.frbs, z, config)
        sol.perf = result.perf
        sol.failed = result.failed
    annotations = annotate([s.objectives for s in solutions], bounds)
    for sol, ann in zip(solutions, annotations):
        sol.annotation = ann


def assign_indivs_credit(population, solutions, worst_credit):
    """Credit each individual with the objectives of the best solution it
    participated in, under the solution set's global annotations. Individuals
    that joined no solution get the worst corner of the objective space."""
    containing: dict = {}
    for sol in solutions:
        containing.setdefault(id(sol.db), []).append(sol)
        containing.setdefault(id(sol.rb), []).append(sol)
    for idv in population:
        own = containing.get(id(idv))
        if not own:
            idv.credit = worst_credit
        else:
            best = min(own, key=lambda s: (s.annotation.rank, -s.annotation.crowding_dist))
            idv.credit = (best.perf, float(best.complexity))
        idv.credit_assignments += 1


class _TagPool:
    """Archive bookkeeping for one tag: dominance relations are fixed, so they
    are computed once and fronts are re-peeled over the still-alive members
    after each removal (removals can change ranks and crowding).

    Crowding ties alternate between preferring higher performance and lower
    complexity on successive extractions, so both objective extremes keep
    population share: performance-only ties let one good cluster monopolise
    the archive and starve the minimum-complexity niche, while input-order
    ties let early junk clusters crowd everything else out.
    """

    def __init__(self, members, bounds: ObjectiveBounds):
        self.members = members
        self.bounds = bounds
        perf = np.array([m.credit[0] for m in members])
        comp = np.array([m.credit[1] for m in members])
        self.perf = perf
        self.comp = comp
        self.dom = dominance_matrix(perf, comp)
        self.alive = np.ones(len(members), dtype=bool)
        self.remaining = len(members)
        self.taken = 0

    def take_best(self) -> Individual:
        alive_idx = np.flatnonzero(self.alive)
        sub = self.dom[np.ix_(alive_idx, alive_idx)]
        front = alive_idx[sub.sum(axis=0) == 0]
        crowding = _crowding_from_arrays(self.perf[front], self.comp[front], self.bounds)
        if self.taken % 2 == 0:
            key = lambda i: (-crowding[i], -self.perf[front[i]], self.comp[front[i]])
        else:
            key = lambda i: (-crowding[i], self.comp[front[i]], -self.perf[front[i]])
        best = int(front[min(range(len(front)), key=key)])
        self.alive[best] = False
        self.remaining -= 1
        self.taken += 1
        return self.members[best]


def archive_parent_pop(
    combined,
    pmf: SubspeciesPmf,
    num_parents: int,
    bounds: ObjectiveBounds,
    rng: np.random.Generator,
    max_misses: int = 100,
) -> list[Individual]:
    """Refill the parent population by repeatedly drawing a tag from the PMF
    and moving that subpopulation's crowded-comparison best across.

    After max_misses consecutive draws of exhausted tags the PMF is
    renormalised over the tags that still have members, guarding against
    starvation.
    """
    if len(combined) < num_parents:
        raise ValueError(f"cannot archive {num_parents} parents from {len(combined)}")
    pools = {tag: _TagPool(members, bounds) for tag, members in group_by_tag(combined).items()}
    parents: list[Individual] = []
    current = pmf
    misses = 0
    while len(parents) < num_parents:
        tag = current.sample(rng)
        pool = pools.get(tag)
        if pool is None or pool.remaining == 0:
            misses += 1
            if misses >= max_misses:
                non_empty = [t for t, p in pools.items() if p.remaining > 0]
                current = pmf.restricted_to(non_empty)
                misses = 0
            continue
        parents.append(pool.take_best())
        misses = 0
    return parents


def _tournament(subpop, annotations, points, rng: np.random.Generator) -> Individual:
    first, second = rng.integers(len(subpop), size=2)
    key = _merit_key(annotations, points)
    return subpop[int(second)] if key(int(second)) < key(int(first)) else subpop[int(first)]


def db_cross_mutate(
    a: DbGenotype,
    b: DbGenotype,
    p_cross: float,
    mut_sigma: float,
    rng: np.random.Generator,
):
    """Line recombination (single blend factor in [-0.25, 1.25], mirrored
    children) followed by Gaussian noise on every gene; clamped to [0, 1]."""
    if a.tag != b.tag:
        raise ValueError("parents must share a tag")
    first, second = a.alleles.copy(), b.alleles.copy()
    if rng.random() < p_cross:
        t = rng.uniform(-0.25, 1.25)
        first, second = t * first + (1 - t) * second, (1 - t) * first + t * second
    children = []
    for genes in (first, second):
        mutated = np.clip(genes + rng.normal(0.0, mut_sigma, genes.shape), 0.0, 1.0)
        children.append(DbGenotype(mutated, a.tag))
    return children[0], children[1]


def rb_cross_mutate_repair(
    a: RbGenotype,
    b: RbGenotype,
    p_cross: float,
    p_mut: float,
    rng: np.random.Generator,
):
    """Per-allele uniform crossover, then per-allele mutation to one of the
    other k values of {0} union actions, then repair to minimum complexity."""
    if a.tag != b.tag or a.n_actions != b.n_actions:
        raise ValueError("parents must share a tag and action set")
    k = a.n_actions
    first, second = a.alleles.copy(), b.alleles.copy()
    swap = rng.random(first.shape) < p_cross
    first[swap], second[swap] = second[swap], first[swap].copy()
    children = []
    for alleles in (first, second):
        mutate = np.flatnonzero(rng.random(alleles.shape) < p_mut)
        if mutate.size:
            draws = rng.integers(0, k, size=mutate.size)
            # position r in the sorted complement of the current value
            alleles[mutate] = draws + (draws >= alleles[mutate])
        _repair_rb_alleles(alleles, k, rng)
        children.append(RbGenotype(alleles, a.tag, k))
    return children[0], children[1]


def breed_children(
    parents,
    pmf: SubspeciesPmf,
    hp: Hyperparams,
    species: str,
    bounds: ObjectiveBounds,
    rng: np.random.Generator,
) -> list[Individual]:
    """Size-preserving intra-tag breeding: draw a tag from the PMF (resampling
    over tags absent from the parents), run two size-2 tournaments under the
    crowded comparison recomputed over that subpopulation, and apply the
    species' crossover-mutate(-repair) operators."""
    groups = group_by_tag(parents)
    points_by_tag = {tag: _credit_points(subpop) for tag, subpop in groups.items()}
    annotations_by_tag = {
        tag: annotate(points, bounds) for tag, points in points_by_tag.items()
    }
    children: list[Individual] = []
    while len(children) < len(parents):
        tag = pmf.sample(rng)
        subpop = groups.get(tag)
        if not subpop:
            continue
        annotations = annotations_by_tag[tag]
        points = points_by_tag[tag]
        mother = _tournament(subpop, annotations, points, rng)
        father = _tournament(subpop, annotations, points, rng)
        if species == DB_SPECIES:
            genotypes = db_cross_mutate(
                mother.genotype, father.genotype, hp.db_p_cross, hp.db_mut_sigma, rng
            )
        else:
            genotypes = rb_cross_mutate_repair(
                mother.genotype, father.genotype, hp.rb_p_cross, hp.rb_p_mut, rng
            )
        children.extend(Individual(g) for g in genotypes)
    del children[len(parents) :]
    return children


def _tag_counts(population, tags) -> dict:
    groups = group_by_tag(population)
    return {tag: len(groups.get(tag, [])) for tag in tags}


def run_fuzzy_mococo(
    hp: Hyperparams,
    seed,
    config: McConfig = McConfig(),
    n_actions: int = 2,
    record_sink=None,
) -> RunResult:
    """Run the full coevolution; a pure function of (hp, seed, config).

    Randomness is split into independent named streams (initialisation,
    collaborator selection, archiving, breeding, initial-state sampling) so
    the evolutionary trajectory is reproducible regardless of how solution
    evaluations are scheduled.
    """
    tags = hp.subspecies_tags
    if min(rb_genotype_length(t) for t in tags) < n_actions:
        raise ValueError("smallest rule-base genotype cannot hold one rule per action")
    comp_bounds = complexity_bounds(tags, n_actions)
    bounds = ObjectiveBounds(config.perf_bounds(), (float(comp_bounds.min), float(comp_bounds.max)))
    worst_credit = (config.perf_lower_bound, float(comp_bounds.max))
    domains = (config.position_bounds, config.velocity_bounds)

    seed_seq = np.random.SeedSequence(seed)
    init_rng, collab_rng, archive_rng, breed_rng = (
        np.random.default_rng(s) for s in seed_seq.spawn(4)
    )
    states_seq = seed_seq.spawn(1)[0]

    delta1, delta2 = make_subspecies_dists(tags, hp.beta)
    p1 = init_db_pop(delta1, hp.db_pop_size, init_rng)
    p2 = init_rb_pop(delta2, hp.rb_pop_size, hp.rb_p_unspec, n_actions, init_rng)
    z = sample_initial_states(states_seq, hp.eta)
    q1: list[Individual] = []
    q2: list[Individual] = []
    all_individuals = list(p1) + list(p2)
    records: list[GenerationRecord] = []
    solutions: list[Solution] = []

    for gen in range(hp.num_gens):
        chi = build_collabr_map(p1, p2, tags, gen, collab_rng, bounds)
        eval1, eval2 = (p1, p2) if gen == 0 else (q1, q2)
        solutions = build_soln_set(eval1, eval2, tags, chi, domains, hp.omega)
        eval_soln_set(solutions, z, config, bounds)
        assign_indivs_credit(eval1, solutions, worst_credit)
        assign_indivs_credit(eval2, solutions, worst_credit)

        perfs = [s.perf for s in solutions]
        record = GenerationRecord(
            gen=gen,
            n_solutions=len(solutions),
            front1_size=sum(1 for s in solutions if s.annotation.rank == 1),
            best_perf=max(perfs) if perfs else config.perf_lower_bound,
            mean_perf=float(np.mean(perfs)) if perfs else config.perf_lower_bound,
            db_tag_counts=_tag_counts(eval1, tags),
            rb_tag_counts=_tag_counts(eval2, tags),
        )
        records.append(record)
        if record_sink is not None:
            record_sink(record)

        r1 = p1 + q1
        r2 = p2 + q2
        p1 = archive_parent_pop(r1, delta1, hp.db_pop_size, bounds, archive_rng)
        p2 = archive_parent_pop(r2, delta2, hp.rb_pop_size, bounds, archive_rng)
        if gen < hp.num_gens - 1:
            # The final iteration's children would never be evaluated or
            # returned, so they are not bred at all.
            q1 = breed_children(p1, delta1, hp, DB_SPECIES, bounds, breed_rng)
            q2 = breed_children(p2, delta2, hp, RB_SPECIES, bounds, breed_rng)
            all_individuals.extend(q1)
            all_individuals.extend(q2)

    front = [s for s in solutions if s.annotation.rank == 1]
    return RunResult(r1, r2, solutions, front, all_individuals, records, z, bounds)

"""Batch evaluation of fuzzy policies on Mountain Car, JIT-compiled.

This mirrors the reference path (frbs.select_action driving
mountain_car.rollout / eval_performance) operation for operation so results
are bit-identical, but runs all rollouts of one evaluation in compiled code.
The evolutionary engine routes every performance evaluation through here.
"""

from __future__ import annotations

import numba
import numpy as np

from .frbs import Frbs
from .mountain_car import InitialStateSet, McConfig, PerfResult


def kernel_arrays(frbs: Frbs):
    """Flatten an FRBS into the arrays the JIT kernel consumes.

    refs holds each partition's reference coordinates (padded); rule masks
    become a dense boolean cube. Membership of set j is reconstructed from
    consecutive reference coordinates exactly as frbs.membership computes it.
    """
    d = len(frbs.db.tag)
    m_max = max(frbs.db.tag)
    refs = np.zeros((d, m_max))
    set_counts = np.array(frbs.db.tag, dtype=np.int64)
    domains = np.zeros((d, 2))
    for i, p in enumerate(frbs.db.partitions):
        refs[i, : p.num_sets] = p.reference_coordinates
        domains[i] = p.feature_domain
    n_rules = len(frbs.rb.rules)
    masks = np.zeros((n_rules, d, m_max), dtype=np.bool_)
    actions = np.zeros(n_rules, dtype=np.int64)
    for r, rule in enumerate(frbs.rb.rules):
        actions[r] = rule.action - 1
        for i, mask in enumerate(rule.masks):
            for j in range(set_counts[i]):
                masks[r, i, j] = bool(mask >> j & 1)
    return refs, set_counts, domains, masks, actions


@numba.njit(cache=True)
def _membership(refs, m, j, x):
    # Set 0 is the lower trapezoid, set m-1 the upper one, the rest triangles;
    # branch arithmetic matches frbs.membership exactly.
    if j == 0:
        if x <= refs[0]:
            return 1.0
        if x >= refs[1]:
            return 0.0
        return (refs[1] - x) / (refs[1] - refs[0])
    if j == m - 1:
        if x <= refs[m - 2]:
            return 0.0
        if x >= refs[m - 1]:
            return 1.0
        return (x - refs[m - 2]) / (refs[m - 1] - refs[m - 2])
    if x <= refs[j - 1] or x >= refs[j + 1]:
        return 0.0
    if x <= refs[j]:
        return (x - refs[j - 1]) / (refs[j] - refs[j - 1])
    return (refs[j + 1] - x) / (refs[j + 1] - refs[j])


@numba.njit(cache=True)
def _evaluate(
    refs,
    set_counts,
    domains,
    masks,
    rule_actions,
    n_actions,
    starts_x,
    starts_v,
    x_min,
    x_max,
    v_min,
    v_max,
    goal,
    force,
    gravity,
    t_max,
    step_reward,
):
    d = set_counts.shape[0]
    m_max = refs.shape[1]
    n_rules = rule_actions.shape[0]
    eta = starts_x.shape[0]
    degrees = np.empty((d, m_max))
    votes = np.empty(n_actions)
    total_return = 0.0
    for e in range(eta):
        x = starts_x[e]
        v = starts_v[e]
        episode_return = 0.0
        for t in range(t_max):
            for i in range(d):
                xi = x if i == 0 else v
                lo = domains[i, 0]
                hi = domains[i, 1]
                if xi < lo:
                    xi = lo
                elif xi > hi:
                    xi = hi
                for j in range(set_counts[i]):
                    degrees[i, j] = _membership(refs[i], set_counts[i], j, xi)
            for a in range(n_actions):
                votes[a] = 0.0
            total_tau = 0.0
            for r in range(n_rules):
                tau = 1.0
                for i in range(d):
                    clause = 0.0
                    for j in range(set_counts[i]):
                        if masks[r, i, j] and degrees[i, j] > clause:
                            clause = degrees[i, j]
                    if clause < tau:
                        tau = clause
                votes[rule_actions[r]] += tau
                total_tau += tau
            if total_tau == 0.0:
                return 0.0, True
            best = 0
            for a in range(1, n_actions):
                if votes[a] > votes[best]:
                    best = a
            applied = -force if best == 0 else force
            v = v + applied - gravity * np.cos(3.0 * x)
            if v < v_min:
                v = v_min
            elif v > v_max:
                v = v_max
            x = x + v
            if x < x_min:
                x = x_min
            elif x > x_max:
                x = x_max
            if x == x_min:
                v = 0.0
            episode_return += step_reward
            if x >= goal:
                break
        total_return += episode_return
    return total_return / eta, False


def eval_frbs_performance(
    frbs: Frbs, z: InitialStateSet, config: McConfig = McConfig()
) -> PerfResult:
    """Drop-in fast equivalent of eval_performance over an FRBS policy."""
    if len(frbs.db.tag) != 2:
        raise ValueError("the rollout kernel expects the two Mountain Car features")
    refs, set_counts, domains, masks, actions = kernel_arrays(frbs)
    starts_x = np.array([s.x for s in z.states])
    starts_v = np.array([s.v for s in z.states])
    perf, failed = _evaluate(
        refs,
        set_counts,
        domains,
        masks,
        actions,
        frbs.rb.n_actions,
        starts_x,
        starts_v,
        config.position_bounds[0],
        config.position_bounds[1],
        config.velocity_bounds[0],
        config.velocity_bounds[1],
        config.goal_position,
        config.force,
        config.gravity,
        config.t_max,
        config.step_reward,
    )
    if failed:
        return PerfResult(config.perf_lower_bound, True)
    return PerfResult(perf, False)

"""Mountain Car dynamics, rollouts, performance evaluation and a
value-iteration performance oracle.

Actions are 1 (push left) and 2 (push right); there is no coast action.
Reward is -1 on every step including the terminal one, episodes are capped at
t_max steps and returns are undiscounted, so a rollout's return is the
negated step count and performance is the mean return over a fixed set of
initial states. If the policy fails to cover any visited state, the whole
evaluation is scored at the environmental lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frbs import CoverageFailure

ACTIONS = (1, 2)

# Documented performance bounds for this environment: the lower bound is all
# rollouts timing out; the upper bound is the mean return of an approximately
# optimal policy (value iteration at 1000 bins per feature, rounded).
PERF_UPPER_BOUND = -96.0


@dataclass(frozen=True)
class McConfig:
    position_bounds: tuple[float, float] = (-1.2, 0.5)
    velocity_bounds: tuple[float, float] = (-0.07, 0.07)
    goal_position: float = 0.5
    force: float = 0.001
    gravity: float = 0.0025
    t_max: int = 200
    step_reward: float = -1.0
    discount: float = 1.0

    def __post_init__(self):
        if self.t_max <= 0:
            raise ValueError("t_max must be positive")

    @property
    def perf_lower_bound(self) -> float:
        return self.t_max * self.step_reward

    def perf_bounds(self) -> tuple[float, float]:
        return (self.perf_lower_bound, PERF_UPPER_BOUND)


@dataclass(frozen=True)
class McState:
    x: float
    v: float


@dataclass(frozen=True)
class InitialStateSet:
    states: tuple[McState, ...]
    seed: object


@dataclass(frozen=True)
class PerfResult:
    perf: float
    failed: bool


def step_batch(x, v, actions, config: McConfig = McConfig()):
    """Vectorised dynamics step; returns (x', v', done) arrays.

    Velocity is clipped, then position; reaching the left wall zeroes the
    velocity. `done` is True where the goal position is reached.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    actions = np.asarray(actions)
    if np.any((actions != 1) & (actions != 2)):
        raise ValueError("actions must be 1 (left) or 2 (right)")
    force = np.where(actions == 1, -config.force, config.force)
    v2 = np.clip(v + force - config.gravity * np.cos(3.0 * x), *config.velocity_bounds)
    x2 = np.clip(x + v2, *config.position_bounds)
    v2 = np.where(x2 == config.position_bounds[0], 0.0, v2)
    return x2, v2, x2 >= config.goal_position


def mc_step(state: McState, action: int, config: McConfig = McConfig()):
    """One dynamics step; returns (next_state, reward, done)."""
    x2, v2, done = step_batch(
        np.array([state.x]), np.array([state.v]), np.array([action]), config
    )
    return McState(float(x2[0]), float(v2[0])), config.step_reward, bool(done[0])


def sample_initial_states(seed, count: int) -> InitialStateSet:
    """Draw `count` start states: position uniform in [-0.6, -0.4], zero
    velocity. Reproducible from the seed."""
    if count < 1:
        raise ValueError("need at least one initial state")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-0.6, -0.4, size=count)
    return InitialStateSet(tuple(McState(float(x), 0.0) for x in xs), seed)


def rollout(policy, s0: McState, config: McConfig = McConfig()) -> float:
    """Simulate up to t_max steps; return the undiscounted return, i.e. the
    negated number of steps taken. CoverageFailure from the policy propagates."""
    state = s0
    ret = 0.0
    for _ in range(config.t_max):
        action = policy(state)
        state, reward, done = mc_step(state, action, config)
        ret += reward
        if done:
            break
    return ret


def eval_performance(policy, z: InitialStateSet, config: McConfig = McConfig()) -> PerfResult:
    """Mean return over the initial-state set.

    If any rollout hits an uncovered state the whole evaluation scores the
    environmental lower bound with the failed flag set.
    """
    if not z.states:
        raise ValueError("initial state set is empty")
    total = 0.0
    for s0 in z.states:
        try:
            total += rollout(policy, s0, config)
        except CoverageFailure:
            return PerfResult(config.perf_lower_bound, True)
    return PerfResult(total / len(z.states), False)


class DiscretePolicy:
    """Greedy policy over a bins x bins action grid, queried by containing bin."""

    def __init__(self, actions: np.ndarray, config: McConfig):
        if actions.ndim != 2 or actions.shape[0] != actions.shape[1]:
            raise ValueError("action grid must be square")
        self.actions = actions
        self.config = config
        self.bins = actions.shape[0]

    def bin_of(self, state: McState) -> tuple[int, int]:
        (x_min, x_max) = self.config.position_bounds
        (v_min, v_max) = self.config.velocity_bounds
        wx = (x_max - x_min) / self.bins
        wv = (v_max - v_min) / self.bins
        ix = min(max(int((state.x - x_min) / wx), 0), self.bins - 1)
        iv = min(max(int((state.v - v_min) / wv), 0), self.bins - 1)
        return ix, iv

    def __call__(self, state: McState) -> int:
        ix, iv = self.bin_of(state)
        return int(self.actions[ix, iv])

    def save(self, path):
        """Persist the action grid with a small header (bins and bounds)."""
        np.savez(
            path,
            actions=self.actions.astype(np.int8),
            bins=np.array([self.bins]),
            position_bounds=np.array(self.config.position_bounds),
            velocity_bounds=np.array(self.config.velocity_bounds),
        )

    @classmethod
    def load(cls, path, config: McConfig = McConfig()) -> "DiscretePolicy":
        data = np.load(path)
        pb = tuple(data["position_bounds"])
        vb = tuple(data["velocity_bounds"])
        if pb != config.position_bounds or vb != config.velocity_bounds:
            raise ValueError("stored policy bounds do not match the configuration")
        return cls(data["actions"].astype(np.int64), config)


def value_iteration_oracle(
    bins: int,
    convergence_tol: float = 1e-6,
    config: McConfig = McConfig(),
    eta: int = 30,
    state_seed=0,
):
    """Approximately optimal policy and its performance upper-bound estimate.

    Discretises each feature into `bins` equal-width intervals, computes
    deterministic bin-to-bin transitions by stepping from bin centres, and
    runs undiscounted value iteration with the goal absorbing at value 0
    until the Bellman residual drops below `convergence_tol`. Values are
    floored at the per-episode lower bound so that states which cannot reach
    the goal converge instead of diverging. The greedy policy is then scored
    with eval_performance on the continuous environment.
    """
    if bins < 2:
        raise ValueError("need at least 2 bins per feature")
    (x_min, x_max) = config.position_bounds
    (v_min, v_max) = config.velocity_bounds
    wx = (x_max - x_min) / bins
    wv = (v_max - v_min) / bins
    centers_x = x_min + (np.arange(bins) + 0.5) * wx
    centers_v = v_min + (np.arange(bins) + 0.5) * wv
    grid_x, grid_v = np.meshgrid(centers_x, centers_v, indexing="ij")
    flat_x, flat_v = grid_x.ravel(), grid_v.ravel()
    # Bins whose centre already sits at the goal are absorbing with value 0.
    at_goal = flat_x >= config.goal_position

    next_index, next_done = [], []
    for action in ACTIONS:
        x2, v2, done = step_batch(flat_x, flat_v, np.full(flat_x.shape, action), config)
        ix = np.clip(((x2 - x_min) / wx).astype(np.int64), 0, bins - 1)
        iv = np.clip(((v2 - v_min) / wv).astype(np.int64), 0, bins - 1)
        next_index.append(ix * bins + iv)
        next_done.append(done)

    lower = config.perf_lower_bound
    values = np.zeros(bins * bins)
    while True:
        q = [
            config.step_reward + np.where(next_done[a], 0.0, values[next_index[a]])
            for a in range(len(ACTIONS))
        ]
        new_values = np.maximum(np.maximum(q[0], q[1]), lower)
        new_values[at_goal] = 0.0
        residual = float(np.max(np.abs(new_values - values)))
        values = new_values
        if residual < convergence_tol:
            break
    # Greedy actions; exact Q ties resolve to the lower action index.
    actions = np.where(q[0] >= q[1], ACTIONS[0], ACTIONS[1])
    actions[at_goal] = ACTIONS[0]
    policy = DiscretePolicy(actions.reshape(bins, bins), config)
    z = sample_initial_states(state_seed, eta)
    result = eval_performance(policy, z, config)
    return policy, result.perf

"""Optimal trajectory computation for both intent kinds.

Goal intents admit a closed form: drive straight at the goal at max speed,
then park. Every state's distance term is individually minimized subject to
the per-tick displacement bound, so the line is provably optimal for the
point robot. Learned feature costs use projected gradient descent over the
waypoints with a backtracking line search.

Plan states are generated by the same one-step recurrence the simulator
integrates, so an episode that executes a plan's velocities reproduces the
plan's states bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Action, Trajectory, State, WorldConfig
from .errors import InvalidHorizonError
from .intents import FeatureCost, GoalCost, Intent, cost

MAX_ITERS = 200
REL_TOL = 1e-6
MAX_HALVINGS = 20


@dataclass(frozen=True)
class Plan:
    """A fixed-horizon optimal trajectory; inputs are zeroed placeholders."""

    trajectory: Trajectory
    total_cost: float
    first_action: Action
    cost_history: tuple = field(default=(), compare=False)  # waypoint optimizer trace

    @property
    def states(self) -> np.ndarray:
        return self.trajectory.states

    def velocity_at(self, offset: int, tick_rate: float) -> np.ndarray:
        """Velocity of the plan's segment starting at `offset`; zero past the end."""
        s = self.states
        if offset + 1 >= s.shape[0]:
            return np.zeros(s.shape[1])
        return (s[offset + 1] - s[offset]) * tick_rate


def goal_velocity(x: np.ndarray, goal: np.ndarray, config: WorldConfig) -> np.ndarray:
    """Velocity of the closed-form goal plan at position x."""
    delta = goal - x
    d = float(np.linalg.norm(delta))
    if d == 0.0:
        return np.zeros_like(x)
    if d * config.tick_rate <= config.max_speed:
        return delta * config.tick_rate  # land on the goal this tick
    return delta * (config.max_speed / d)


def _goal_states(start: np.ndarray, goal: np.ndarray, horizon: int, config: WorldConfig) -> np.ndarray:
    xs = np.empty((horizon + 1, start.shape[0]))
    xs[0] = start
    x = start
    for i in range(1, horizon + 1):
        x = x + goal_velocity(x, goal, config) / config.tick_rate
        xs[i] = x
    return xs


def _project(states: np.ndarray, start: np.ndarray, config: WorldConfig) -> np.ndarray:
    """Clamp waypoints to the workspace, then clip each segment to the speed bound."""
    s = np.clip(states, config.bounds_lo, config.bounds_hi)
    s[0] = start
    step = config.step_length
    seg = np.linalg.norm(np.diff(s, axis=0), axis=1)
    if np.all(seg <= step):
        return s
    for i in range(1, s.shape[0]):
        d = s[i] - s[i - 1]
        n = float(np.linalg.norm(d))
        if n > step:
            s[i] = s[i - 1] + d * (step / n)
    return s


def _optimize_waypoints(
    start: np.ndarray, fc: FeatureCost, horizon: int, config: WorldConfig
) -> tuple[np.ndarray, list]:
    states = _goal_states(start, fc.best_center(), horizon, config)
    history = [float(np.sum(fc.state_costs(states)))]
    for _ in range(MAX_ITERS):
        g = fc.state_cost_grad(states)
        g[0] = 0.0  # start is pinned
        gmax = float(np.max(np.abs(g)))
        if gmax == 0.0:
            break
        eta = config.step_length / gmax
        base = history[-1]
        accepted = None
        for _ in range(MAX_HALVINGS + 1):
            cand = _project(states - eta * g, start, config)
            c = float(np.sum(fc.state_costs(cand)))
            if c <= base:
                accepted = (cand, c)
                break
            eta *= 0.5
        if accepted is None:
            break
        states, c = accepted
        history.append(c)
        # stop on vanishing relative improvement, measured against the total
        # decrease so far: differences are invariant to constant cost offsets
        if base - c < REL_TOL * max(history[0] - c, 1.0):
            break
    return states, history


def plan(start: State, intent: Intent, horizon: int, config: WorldConfig) -> Plan:
    """Optimal trajectory of `horizon` ticks from `start` under the intent's cost."""
    if horizon < 1:
        raise InvalidHorizonError("horizon must be at least one tick")
    x0 = np.asarray(start.x, dtype=float)
    history: tuple = ()
    if isinstance(intent.cost_model, GoalCost):
        states = _goal_states(x0, intent.cost_model.goal, horizon, config)
    else:
        states, hist = _optimize_waypoints(x0, intent.cost_model, horizon, config)
        history = tuple(hist)
    traj = Trajectory.from_states(states)
    u0 = (states[1] - states[0]) * config.tick_rate
    if isinstance(intent.cost_model, GoalCost):
        u0 = goal_velocity(x0, intent.cost_model.goal, config)
    return Plan(
        trajectory=traj,
        total_cost=cost(intent, traj),
        first_action=Action(u0),
        cost_history=history,
    )


def remaining_plan(prefix_end: State, intent: Intent, remaining_horizon: int, config: WorldConfig) -> Plan:
    """Optimal completion from the current state over the remaining ticks."""
    return plan(prefix_end, intent, remaining_horizon, config)

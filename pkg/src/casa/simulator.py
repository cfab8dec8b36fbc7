"""Deterministic episode engine.

One episode owns a growing state/input history and steps the point robot
under blended control. Inference runs every inference_period_ticks; between
inference ticks the last arbitration is reused with a cheaply refreshed
assist action (closed form for goal intents, cached plan tail for learned
ones). Scripted operators drive headless runs for experiments and tests.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .arbitration import (
    NONE,
    ArbitrationConfig,
    ArbitrationResult,
    arbitrate,
    blend,
)
from .core import Action, HumanInput, State, Trajectory, WorldConfig, teleop_map
from .errors import IncompleteInputError, InvalidStateError
from .inference import ConfidenceEstimate
from .intents import GoalCost, Intent, IntentSet, state_costs
from .irl import DemoSet, IrlConfig, learn_intent
from .planner import Plan, goal_velocity, plan


@dataclass
class Episode:
    """A single teleoperation episode; the sole owner of its history."""

    world: WorldConfig
    intents: IntentSet
    method: str
    start: State
    reference: Trajectory | None = None
    acfg: ArbitrationConfig = field(default_factory=ArbitrationConfig)

    def __post_init__(self):
        self.tick = 0
        self._states = [np.asarray(self.start.x, dtype=float)]
        self._inputs = [np.zeros(self.world.state_dim)]
        self.assist_log: list[ArbitrationResult] = []
        self.tick_log: list[dict] = []
        self.terminated = False
        self._alpha = 1.0
        self._theta: str | None = None
        self._cached_plan: Plan | None = None
        self._cached_plan_tick = 0
        self._optimal_costs: dict[str, np.ndarray] = {}

    @property
    def history(self) -> Trajectory:
        return Trajectory(
            states=np.array(self._states),
            inputs=np.array(self._inputs),
            ticks=np.arange(len(self._states)),
        )

    @property
    def state(self) -> State:
        return State(self._states[-1])

    @property
    def last_alpha(self) -> float:
        return self._alpha

    @property
    def last_result(self) -> ArbitrationResult | None:
        return self.assist_log[-1] if self.assist_log else None

    def finish(self) -> None:
        self.terminated = True

    def _optimal_cost_cache(self) -> dict:
        """Per-intent state costs of the optimal trajectory from the episode start."""
        for intent in self.intents:
            if intent.id not in self._optimal_costs:
                p = plan(self.start, intent, self.world.planning_horizon, self.world)
                self._optimal_costs[intent.id] = state_costs(intent, p.states)
        return self._optimal_costs

    def _is_inference_tick(self) -> bool:
        return (
            self.method != NONE
            and self.tick > 0
            and self.tick % self.world.inference_period_ticks == 0
        )

    def _held_u_star(self) -> Action:
        """Refresh the assist action between inference ticks."""
        intent = self.intents.get(self._theta)
        if isinstance(intent.cost_model, GoalCost):
            return Action(goal_velocity(self._states[-1], intent.cost_model.goal, self.world))
        offset = self.tick - self._cached_plan_tick
        return Action(self._cached_plan.velocity_at(offset, self.world.tick_rate))

    def step(self, inp: HumanInput) -> tuple[State, ArbitrationResult | None]:
        """Advance one tick under the given input; returns the new state and,
        on inference ticks, the fresh arbitration."""
        if self.terminated:
            raise InvalidStateError("episode already terminated")
        self._inputs[-1] = np.asarray(inp.command, dtype=float)
        result = None
        if self._is_inference_tick():
            result = arbitrate(
                self.method,
                self.history,
                self.intents,
                self.world,
                self.acfg,
                t=self.tick // self.world.inference_period_ticks,
                optimal_costs=self._optimal_cost_cache(),
            )
            self.assist_log.append(result)
            self._alpha = result.alpha
            self._theta = result.theta_star
            self._cached_plan = result.plan
            self._cached_plan_tick = self.tick
            u = result.u
        elif self.method == NONE or self._theta is None:
            u = teleop_map(inp, self.world)
        else:
            u = blend(inp, self._held_u_star(), self._alpha, self.world)

        x = self.world.clamp(self._states[-1] + u.velocity / self.world.tick_rate)
        self.tick_log.append(
            {
                "tick": self.tick,
                "x": [float(v) for v in self._states[-1]],
                "a": [float(v) for v in inp.command],
                "u": [float(v) for v in u.velocity],
                "alpha": self._alpha,
                "theta_star": self._theta,
                "inference": None if result is None else result.to_json(),
            }
        )
        self._states.append(x)
        self._inputs.append(np.zeros(self.world.state_dim))
        self.tick += 1
        return State(x), result


@dataclass(frozen=True)
class ScriptedOperator:
    """Headless stand-in for the human operator.

    optimal_tracker steers along the target intent's optimal plan;
    noisy_tracker adds seeded Gaussian noise in input space; replay feeds
    recorded inputs verbatim. stop_alpha > 0 makes the operator release the
    controls for good once the executed alpha drops below it.
    """

    kind: str                       # optimal_tracker | noisy_tracker | replay
    target: Intent | None = None
    replay: Trajectory | None = None
    noise_std: float = 0.0
    seed: int = 0
    stop_alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in ("optimal_tracker", "noisy_tracker", "replay"):
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.noise_std < 0:
            raise ValueError("noise_std must be nonnegative")
        if self.kind == "replay" and self.replay is None:
            raise ValueError("replay operator needs a trajectory")
        if self.kind != "replay" and self.target is None:
            raise ValueError("tracker operators need a target intent")


def _tracker_velocity(
    episode: Episode, target: Intent, cache: dict
) -> np.ndarray:
    """Assist-optimal velocity toward the operator's target from the current state."""
    x = episode._states[-1]
    if isinstance(target.cost_model, GoalCost):
        return goal_velocity(x, target.cost_model.goal, episode.world)
    # learned target: follow the cached plan while on it, replan when pushed off
    p: Plan | None = cache.get("plan")
    offset = episode.tick - cache.get("tick", 0)
    on_plan = (
        p is not None
        and offset + 1 < p.states.shape[0]
        and float(np.linalg.norm(p.states[offset] - x)) < 1e-9
    )
    if not on_plan:
        horizon = max(episode.world.planning_horizon - episode.tick, 1)
        p = plan(State(x), target, horizon, episode.world)
        cache["plan"] = p
        cache["tick"] = episode.tick
        offset = 0
    return p.velocity_at(offset, episode.world.tick_rate)


def run_scripted(episode: Episode, operator: ScriptedOperator, n_ticks: int) -> Episode:
    """Drive the episode with operator-generated inputs for n_ticks."""
    if n_ticks < 1:
        raise ValueError("n_ticks must be >= 1")
    rng = np.random.default_rng(operator.seed)
    k = episode.world.state_dim
    stopped = False
    plan_cache: dict = {}
    for i in range(n_ticks):
        if episode.terminated:
            break
        if operator.stop_alpha > 0 and episode.last_alpha < operator.stop_alpha:
            stopped = True
        if stopped:
            a = HumanInput.zero(k)
        elif operator.kind == "replay":
            if i >= len(operator.replay):
                warnings.warn("replay exhausted before n_ticks; episode ends early")
                episode.finish()
                break
            a = HumanInput(operator.replay.inputs[i])
        else:
            u = _tracker_velocity(episode, operator.target, plan_cache)
            cmd = u / episode.world.max_speed
            if operator.kind == "noisy_tracker":
                cmd = np.clip(cmd + rng.normal(0.0, operator.noise_std, size=k), -1.0, 1.0)
            a = HumanInput(cmd)
        episode.step(a)
    return episode


def detect_misspecification(betas: dict, epsilon: float) -> bool:
    """True iff no known intent reaches the confidence threshold."""
    if not betas:
        raise IncompleteInputError("misspecification check needs at least one beta")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    values = [b.beta if isinstance(b, ConfidenceEstimate) else float(b) for b in betas.values()]
    return max(values) < epsilon


def lifelong_update(
    intents: IntentSet, demos: DemoSet, cfg: IrlConfig, world: WorldConfig, **kwargs
) -> IntentSet:
    """Learn the missing intent and return the enlarged repertoire."""
    existing = set(intents.ids)
    intent = learn_intent(demos, cfg, world, **kwargs)
    if intent.id in existing:
        intent = Intent(id=f"{intent.id}-{len(existing)}", kind=intent.kind, cost_model=intent.cost_model)
    return intents.with_intent(intent)

"""Blending coefficient computation and the full assist step.

alpha is the human's control authority: the executed action is
alpha * T(a) + (1 - alpha) * u_star. The confidence-aware rule sets
alpha = min(1, 1/beta-hat) for the most likely intent; the distance
baseline scales alpha with the distance to the predicted goal assuming
beta = 1; the belief baseline maps the posterior peak onto [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Action, HumanInput, Trajectory, State, WorldConfig, clip_speed, teleop_map
from .errors import (
    InvalidAlphaError,
    InvalidArityError,
    InvalidThresholdError,
)
from .inference import (
    ConfidenceEstimate,
    Suboptimality,
    beta_map,
    beta_mle,
    loglik_from_suboptimality,
    posterior_from_logliks,
    suboptimality,
)
from .intents import GoalCost, Intent, IntentSet
from .planner import remaining_plan

CASA = "casa"
PBA = "pba"
BELIEF = "belief"
NONE = "none"

METHODS = (CASA, PBA, BELIEF, NONE)


@dataclass(frozen=True)
class ArbitrationConfig:
    """Knobs for the assist stack; defaults match the shipped behavior."""

    estimator: str = "map"      # "map" (finite everywhere) or "mle"
    map_lambda: float = 1.0
    pba_threshold: float = 1.0  # D: distance past which the robot does not assist, meters
    epsilon: float = 2.0        # misspecification threshold on max beta-hat


@dataclass(frozen=True)
class ArbitrationResult:
    """One inference tick's full trace."""

    method: str
    alpha: float
    theta_star: str | None
    u_star: Action | None
    u: Action
    betas: dict = field(default_factory=dict)
    posterior: dict = field(default_factory=dict)
    alphas: dict = field(default_factory=dict)
    tick: int | None = None
    plan: object = field(default=None, compare=False, repr=False)  # u_star's full plan

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "alpha": self.alpha,
            "theta_star": self.theta_star,
            "u_star": None if self.u_star is None else [float(v) for v in self.u_star.velocity],
            "u": [float(v) for v in self.u.velocity],
            "betas": self.betas,
            "posterior": self.posterior,
            "alphas": self.alphas,
            "tick": self.tick,
        }


def casa_alpha(beta_star: float | ConfidenceEstimate) -> float:
    """Human authority min(1, 1/beta-hat); full authority at beta-hat = 0."""
    b = beta_star.beta if isinstance(beta_star, ConfidenceEstimate) else float(beta_star)
    if b < 0:
        raise ValueError("beta-hat must be nonnegative")
    if b <= 1.0:
        return 1.0
    return 1.0 / b


def pba_alpha(distance: float, threshold: float) -> float:
    """Distance arbitration min(1, d/D)."""
    if threshold <= 0:
        raise InvalidThresholdError("distance threshold must be positive")
    if distance < 0:
        raise ValueError("distance must be nonnegative")
    return min(1.0, distance / threshold)


def belief_alpha(p_star: float, n_intents: int) -> float:
    """Human authority complement of the belief ramp.

    The ramp is 0 at the uniform belief 1/n and 1 at certainty, so a belief
    that saturates drives the user's control authority to zero.
    """
    if n_intents < 2:
        raise InvalidArityError("belief arbitration needs at least two intents")
    if not 0.0 <= p_star <= 1.0:
        raise ValueError("p_star must lie in [0, 1]")
    ramp = (p_star * n_intents - 1.0) / (n_intents - 1.0)
    return 1.0 - min(1.0, max(0.0, ramp))


def blend(inp: HumanInput, u_star: Action, alpha: float, config: WorldConfig) -> Action:
    """Convex combination of the teleop image and the assist action, speed-clipped.

    The endpoints are returned exactly (also when both coincide), which keeps
    no-assist episodes bit-identical to direct teleoperation.
    """
    if not 0.0 <= alpha <= 1.0:
        raise InvalidAlphaError("alpha must lie in [0, 1]")
    t = teleop_map(inp, config)
    if alpha == 1.0:
        return t
    if alpha == 0.0:
        return u_star
    if np.array_equal(t.velocity, u_star.velocity):
        return t
    v = alpha * t.velocity + (1.0 - alpha) * u_star.velocity
    return Action(clip_speed(v, config.max_speed))


def pba_distance(intent: Intent, x: np.ndarray) -> float:
    """Distance from the current state to the intent's assist target.

    Goal intents use the goal position; learned intents use the cost's
    best RBF center as a deterministic surrogate.
    """
    if isinstance(intent.cost_model, GoalCost):
        target = intent.cost_model.goal
    else:
        target = intent.cost_model.best_center()
    return float(np.linalg.norm(x - target))


def estimate_beta(s: Suboptimality, acfg: ArbitrationConfig) -> ConfidenceEstimate:
    if acfg.estimator == "mle":
        return beta_mle(s)
    return beta_map(s, acfg.map_lambda)


def arbitrate(
    method: str,
    traj: Trajectory,
    intents: IntentSet,
    config: WorldConfig,
    acfg: ArbitrationConfig = ArbitrationConfig(),
    t: int | None = None,
    optimal_costs: dict | None = None,
) -> ArbitrationResult:
    """Run one full assist step over the observed prefix.

    The trajectory's last step carries the operator's current input. Method
    "none" performs no inference and no planning. `optimal_costs` may carry
    per-intent cached per-state costs of the optimal trajectory from the
    episode start.
    """
    if method not in METHODS:
        raise ValueError(f"unknown arbitration method {method!r}")
    _, current_input = traj.step(len(traj) - 1)
    tick = int(traj.ticks[-1])

    if method == NONE:
        u = teleop_map(current_input, config)
        return ArbitrationResult(
            method=NONE, alpha=1.0, theta_star=None, u_star=None, u=u,
            alphas={NONE: 1.0}, tick=tick,
        )

    if len(intents) == 0:
        raise ValueError("arbitration needs a non-empty intent set")

    subopts, betas = {}, {}
    for intent in intents:
        cached = None if optimal_costs is None else optimal_costs.get(intent.id)
        s = suboptimality(traj, intent, config, t=t, optimal_costs=cached)
        subopts[intent.id] = s
        betas[intent.id] = estimate_beta(s, acfg)

    ids = intents.ids
    posterior = posterior_from_logliks(
        ids, [loglik_from_suboptimality(subopts[i], betas[i].beta) for i in ids]
    )
    flat_posterior = posterior_from_logliks(
        ids, [loglik_from_suboptimality(subopts[i], 1.0) for i in ids]
    )

    x_now = traj.states[-1]
    alphas = {
        CASA: casa_alpha(betas[posterior.argmax]),
        PBA: pba_alpha(
            pba_distance(intents.get(flat_posterior.argmax), x_now), acfg.pba_threshold
        ),
    }
    if len(intents) >= 2:
        alphas[BELIEF] = belief_alpha(posterior.p_star, len(intents))
    elif method == BELIEF:
        raise InvalidArityError("belief arbitration needs at least two intents")

    theta_star = flat_posterior.argmax if method == PBA else posterior.argmax
    moves = int(traj.ticks[-1] - traj.ticks[0])
    horizon = max(config.planning_horizon - moves, 1)
    star_plan = remaining_plan(State(x_now), intents.get(theta_star), horizon, config)
    u_star = star_plan.first_action
    alpha = alphas[method]
    u = blend(current_input, u_star, alpha, config)

    return ArbitrationResult(
        method=method,
        alpha=alpha,
        theta_star=theta_star,
        u_star=u_star,
        u=u,
        betas={i: betas[i].beta for i in ids},
        posterior=posterior.probabilities,
        alphas=alphas,
        tick=tick,
        plan=star_plan,
    )

"""Trajectory likelihoods, intent posterior, and situational confidence.

The likelihood of a partial trajectory under an intent is approximated with
Laplace's method around the optimal completion and the optimal full
trajectory. The exponent collapses to the suboptimality S of the observed
prefix; the Hessian-determinant ratio is taken as 1 throughout.

Per-intent confidence beta-hat is estimated in closed form from S. A high
beta-hat means the intent's cost explains the operator's input well; when
every intent scores low, the repertoire is missing the operator's intent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Trajectory, State, WorldConfig
from .errors import IncompleteInputError, InvalidBetaError, InvalidPriorError
from .intents import Intent, IntentSet, state_costs
from .planner import remaining_plan

S_FLOOR = 1e-9    # below this the prefix is treated as exactly optimal
BETA_CAP = 1e6    # MLE cap when S is degenerate
PROB_FLOOR = 1e-300


@dataclass(frozen=True)
class Suboptimality:
    """Cost decomposition S = observed + completion - optimal.

    completion_cost counts only the states strictly after the junction
    (the prefix's final state already carries that state's cost), so the
    three state-count weights cancel exactly and tracking an optimal
    trajectory gives S = 0. The stored value is the jointly accumulated
    sum (exact cancellation of matching terms), clamped at zero.
    """

    observed_cost: float
    completion_cost: float
    optimal_cost: float
    value: float
    t: int   # inference steps observed
    k: int   # action dimensionality


@dataclass(frozen=True)
class ConfidenceEstimate:
    """Situational confidence beta-hat for one intent."""

    beta: float
    suboptimality: Suboptimality | None
    estimator: str

    def __float__(self) -> float:
        return self.beta


@dataclass(frozen=True)
class IntentPosterior:
    probabilities: dict
    argmax: str

    @property
    def p_star(self) -> float:
        return self.probabilities[self.argmax]


def _beta_value(b) -> float:
    return float(b.beta) if isinstance(b, ConfidenceEstimate) else float(b)


def suboptimality(
    traj: Trajectory,
    intent: Intent,
    config: WorldConfig,
    t: int | None = None,
    optimal_costs: np.ndarray | None = None,
) -> Suboptimality:
    """Suboptimality of an observed prefix w.r.t. one intent.

    `t` defaults to the number of whole inference periods the prefix spans.
    `optimal_costs` may supply precomputed per-state costs of the optimal
    full trajectory from the prefix's first state (episode-level cache).
    """
    if len(traj) == 0:
        raise ValueError("suboptimality of an empty trajectory is undefined")
    moves = int(traj.ticks[-1] - traj.ticks[0])
    if t is None:
        t = max(1, moves // config.inference_period_ticks)
    horizon = config.planning_horizon
    remaining = max(horizon - moves, 0)

    observed = state_costs(intent, traj.states)
    if remaining == 0:  # episode at or past the horizon: nothing left to complete
        completion = np.zeros(0)
    else:
        completion_plan = remaining_plan(State(traj.states[-1]), intent, remaining, config)
        completion = state_costs(intent, completion_plan.states[1:])
    if optimal_costs is None:
        optimal_costs = state_costs(
            intent, remaining_plan(State(traj.states[0]), intent, horizon, config).states
        )

    # One fsum over all signed terms: matching observed/completion vs optimal
    # state costs cancel exactly, so tracking the optimum yields S == 0.0.
    terms = list(observed) + list(completion) + [-c for c in optimal_costs]
    s_value = math.fsum(terms)
    return Suboptimality(
        observed_cost=math.fsum(observed),
        completion_cost=math.fsum(completion),
        optimal_cost=math.fsum(optimal_costs),
        value=max(s_value, 0.0),
        t=t,
        k=traj.k,
    )


def beta_mle(s: Suboptimality, beta_cap: float = BETA_CAP) -> ConfidenceEstimate:
    """Maximum-likelihood confidence t*k / (2*S), capped when S vanishes."""
    if s.value < S_FLOOR:
        return ConfidenceEstimate(beta=beta_cap, suboptimality=s, estimator="mle")
    return ConfidenceEstimate(beta=s.t * s.k / (2.0 * s.value), suboptimality=s, estimator="mle")


def beta_map(s: Suboptimality, lam: float) -> ConfidenceEstimate:
    """MAP confidence t*k / (2*(lambda + S)) under an exponential prior."""
    if lam <= 0:
        raise InvalidPriorError("prior parameter lambda must be positive")
    return ConfidenceEstimate(
        beta=s.t * s.k / (2.0 * (lam + s.value)),
        suboptimality=s,
        estimator=f"map({lam:g})",
    )


def loglik_from_suboptimality(s: Suboptimality, beta: float) -> float:
    """Log of the Laplace-approximated prefix likelihood (Hessian ratio = 1)."""
    if beta <= 0:
        raise InvalidBetaError("beta must be positive")
    return -beta * s.value + 0.5 * s.t * s.k * math.log(beta / (2.0 * math.pi))


def log_likelihood(traj: Trajectory, intent: Intent, beta: float, config: WorldConfig) -> float:
    return loglik_from_suboptimality(suboptimality(traj, intent, config), beta)


def posterior_from_logliks(ids: list, logliks: list) -> IntentPosterior:
    """Normalize log-likelihoods into a posterior; ties go to the earlier intent."""
    ll = np.asarray(logliks, dtype=float)
    w = np.exp(ll - ll.max())
    w[w < PROB_FLOOR] = 0.0
    p = w / w.sum()
    return IntentPosterior(
        probabilities={i: float(v) for i, v in zip(ids, p)},
        argmax=ids[int(np.argmax(p))],
    )


def intent_posterior(
    traj: Trajectory,
    intents: IntentSet,
    betas: dict,
    config: WorldConfig,
) -> IntentPosterior:
    """Posterior over intents, each intent scored with its own beta."""
    if len(intents) == 0:
        raise ValueError("posterior over an empty intent set is undefined")
    logliks = []
    for intent in intents:
        if intent.id not in betas:
            raise IncompleteInputError(f"no beta for intent {intent.id!r}")
        s = suboptimality(traj, intent, config)
        logliks.append(loglik_from_suboptimality(s, _beta_value(betas[intent.id])))
    return posterior_from_logliks(intents.ids, logliks)

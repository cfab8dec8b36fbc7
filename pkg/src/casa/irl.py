"""Learning a missing intent from demonstrations via maximum-entropy IRL.

The learned cost is linear in RBF features, so the objective gradient is
the difference between demonstration and sample feature expectations, and
descending it drives the demonstrated trajectories toward low cost until
the expectations match.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .core import State, Trajectory, WorldConfig
from .errors import DimensionError
from .intents import FeatureCost, Intent, RbfBasis, cost_gradient
from .planner import plan

L2_WEIGHT = 1e-3


@dataclass(frozen=True)
class DemoSet:
    """Recorded direct-teleoperation demonstrations of one missing intent."""

    demos: tuple
    intent_hint: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "demos", tuple(self.demos))
        if len(self.demos) == 0:
            raise ValueError("a demo set needs at least one demonstration")
        k = self.demos[0].k
        if any(d.k != k for d in self.demos):
            raise DimensionError("all demonstrations must share the state dimension")

    @property
    def starts(self) -> list:
        return [State(d.states[0]) for d in self.demos]

    def to_json(self) -> list:
        return [d.to_json() for d in self.demos]

    @classmethod
    def from_json(cls, records: list, intent_hint: str | None = None) -> "DemoSet":
        return cls(tuple(Trajectory.from_json(r) for r in records), intent_hint=intent_hint)


@dataclass(frozen=True)
class IrlConfig:
    n_samples: int = 16
    noise_scale: float = 0.05     # waypoint perturbation std, meters
    learning_rate: float = 0.1
    max_iters: int = 500
    grad_tol: float = 1e-4
    seed: int = 0
    l2_weight: float = L2_WEIGHT  # pulls phi toward a bounded fixed point

    def __post_init__(self):
        if min(self.n_samples, self.max_iters) < 1 or min(
            self.noise_scale, self.learning_rate, self.grad_tol
        ) <= 0:
            raise ValueError("IRL configuration values must be positive")
        if self.l2_weight < 0:
            raise ValueError("l2_weight must be nonnegative")


def irl_gradient(demos: DemoSet, samples: list, intent: Intent) -> np.ndarray:
    """Demo-minus-sample feature expectation difference."""
    if len(samples) == 0:
        raise ValueError("gradient needs a non-empty sample set")
    demo_mean = np.mean([cost_gradient(intent, d) for d in demos.demos], axis=0)
    sample_mean = np.mean([cost_gradient(intent, s) for s in samples], axis=0)
    return demo_mean - sample_mean


def sample_near_optimal(
    intent: Intent,
    starts: list,
    cfg: IrlConfig,
    world: WorldConfig,
    rng: np.random.Generator | None = None,
    horizon: int | None = None,
) -> list:
    """Noisy executions near the current cost's optimum, one plan per start.

    Gaussian noise perturbs the interior waypoints of the optimal plan from
    each start (cycled to n_samples), then segments are re-clipped to the
    speed bound.
    """
    if len(starts) == 0:
        raise ValueError("sampling needs at least one start state")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    if horizon is None:
        horizon = world.planning_horizon
    plans = {i: plan(s, intent, horizon, world).states for i, s in enumerate(starts)}
    step = world.step_length
    out = []
    for i in itertools.islice(itertools.cycle(range(len(starts))), cfg.n_samples):
        states = plans[i].copy()
        if states.shape[0] > 2:
            states[1:-1] += rng.normal(0.0, cfg.noise_scale, size=states[1:-1].shape)
        states = world.clamp(states)
        for j in range(1, states.shape[0]):
            d = states[j] - states[j - 1]
            n = float(np.linalg.norm(d))
            if n > step:
                states[j] = states[j - 1] + d * (step / n)
        out.append(Trajectory.from_states(states))
    return out


def learn_intent(
    demos: DemoSet,
    cfg: IrlConfig,
    world: WorldConfig,
    basis: RbfBasis | None = None,
    intent_id: str | None = None,
    progress: "callable | None" = None,
) -> Intent:
    """Fit a feature cost that makes the demonstrations look near-optimal.

    Iterates sample / gradient / descend until the gradient norm falls below
    grad_tol or max_iters is reached; on non-convergence the best iterate by
    gradient norm is returned and a warning is issued. Deterministic for a
    fixed cfg.seed.
    """
    if basis is None:
        basis = RbfBasis.for_world(world)
    if intent_id is None:
        intent_id = f"learned-{demos.intent_hint or 'intent'}-{cfg.seed}"
    rng = np.random.default_rng(cfg.seed)
    horizon = max(len(d) for d in demos.demos) - 1
    starts = demos.starts

    phi = np.zeros(basis.size)
    best_phi, best_norm = phi, np.inf
    converged = False
    for it in range(cfg.max_iters):
        intent = Intent.learned(intent_id, phi, basis)
        samples = sample_near_optimal(intent, starts, cfg, world, rng=rng, horizon=horizon)
        grad = irl_gradient(demos, samples, intent)
        gnorm = float(np.linalg.norm(grad))
        if progress is not None:
            progress(it, gnorm)
        if gnorm < best_norm:
            best_phi, best_norm = phi, gnorm
        if gnorm < cfg.grad_tol:
            converged = True
            break
        phi = phi - cfg.learning_rate * (grad + cfg.l2_weight * phi)
    if not converged:
        warnings.warn(
            f"IRL did not reach grad_tol={cfg.grad_tol:g} within {cfg.max_iters} iters "
            f"(best gradient norm {best_norm:.3g}); returning best iterate",
            RuntimeWarning,
        )
        phi = best_phi
    return Intent.learned(intent_id, phi, basis)

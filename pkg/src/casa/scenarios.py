"""Named episode fixtures and the scenario file format.

Three tasks ship as builtins on a 2 m square workspace: a well-specified
known_goal run, an unknown_goal run whose operator heads for a goal the
robot does not know, and an unknown_skill run whose operator executes a
corridor-shaped feature cost. A scenario file is JSON with keys
{world, intents, method, operator, n_ticks, seed, start, reference}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .arbitration import ArbitrationConfig
from .core import State, Trajectory, WorldConfig
from .errors import ScenarioError
from .intents import Intent, IntentSet, RbfBasis
from .planner import plan
from .simulator import Episode, ScriptedOperator

BUILTINS = ("known_goal", "unknown_goal", "unknown_skill", "smoke")


@dataclass(frozen=True)
class Scenario:
    name: str
    world: WorldConfig
    intents: IntentSet
    method: str
    operator: ScriptedOperator
    n_ticks: int
    seed: int = 0
    start: State = None
    reference: Trajectory | str | None = "auto"
    acfg: ArbitrationConfig = field(default_factory=ArbitrationConfig)

    def resolve_reference(self) -> Trajectory | None:
        """The intended trajectory: explicit, or the target's optimal plan."""
        if isinstance(self.reference, Trajectory) or self.reference is None:
            return self.reference
        if self.operator.target is None:
            return None
        return plan(self.start, self.operator.target, self.n_ticks, self.world).trajectory

    def build_episode(self, method: str | None = None, seed: int | None = None) -> tuple:
        op = self.operator if seed is None else replace(self.operator, seed=seed)
        episode = Episode(
            world=self.world,
            intents=self.intents,
            method=method or self.method,
            start=self.start,
            reference=self.resolve_reference(),
            acfg=self.acfg,
        )
        return episode, op

    def to_json(self) -> dict:
        op = {
            "kind": self.operator.kind,
            "noise_std": self.operator.noise_std,
            "seed": self.operator.seed,
            "stop_alpha": self.operator.stop_alpha,
        }
        if self.operator.target is not None:
            op["target"] = self.operator.target.to_json()
        if self.operator.replay is not None:
            op["replay"] = self.operator.replay.to_json()
        return {
            "name": self.name,
            "world": self.world.to_json(),
            "intents": self.intents.to_json(),
            "method": self.method,
            "operator": op,
            "n_ticks": self.n_ticks,
            "seed": self.seed,
            "start": [float(v) for v in self.start.x],
            "reference": self.reference.to_json()
            if isinstance(self.reference, Trajectory)
            else self.reference,
            "arbitration": {
                "estimator": self.acfg.estimator,
                "map_lambda": self.acfg.map_lambda,
                "pba_threshold": self.acfg.pba_threshold,
                "epsilon": self.acfg.epsilon,
            },
        }

    @classmethod
    def from_json(cls, d: dict) -> "Scenario":
        try:
            op = d["operator"]
            operator = ScriptedOperator(
                kind=op["kind"],
                target=Intent.from_json(op["target"]) if "target" in op else None,
                replay=Trajectory.from_json(op["replay"]) if "replay" in op else None,
                noise_std=float(op.get("noise_std", 0.0)),
                seed=int(op.get("seed", 0)),
                stop_alpha=float(op.get("stop_alpha", 0.0)),
            )
            ref = d.get("reference", "auto")
            if isinstance(ref, list):
                ref = Trajectory.from_json(ref)
            ac = d.get("arbitration", {})
            return cls(
                name=d.get("name", "scenario"),
                world=WorldConfig.from_json(d["world"]),
                intents=IntentSet.from_json(d["intents"]),
                method=d["method"],
                operator=operator,
                n_ticks=int(d["n_ticks"]),
                seed=int(d.get("seed", 0)),
                start=State(np.array(d["start"], dtype=float)),
                reference=ref,
                acfg=ArbitrationConfig(
                    estimator=ac.get("estimator", "map"),
                    map_lambda=float(ac.get("map_lambda", 1.0)),
                    pba_threshold=float(ac.get("pba_threshold", 1.0)),
                    epsilon=float(ac.get("epsilon", 2.0)),
                ),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ScenarioError(f"malformed scenario: {e}") from e


def load_scenario(source: str) -> Scenario:
    """Load a builtin scenario by name or a scenario file by path."""
    if source in BUILTINS:
        return builtin(source)
    try:
        with open(source) as f:
            data = json.load(f)
    except OSError as e:
        raise ScenarioError(f"cannot read scenario {source!r}: {e}") from e
    except json.JSONDecodeError as e:
        raise ScenarioError(f"scenario {source!r} is not valid JSON at line {e.lineno}: {e.msg}") from e
    return Scenario.from_json(data)


def _default_world() -> WorldConfig:
    return WorldConfig()


def _corridor_intent(world: WorldConfig) -> Intent:
    """Ground-truth 'pour' skill: a low-cost corridor ending in a deep well."""
    basis = RbfBasis.for_world(world)
    centers = basis.centers
    phi = np.zeros(basis.size)
    waypoints = [(0.5, 1.5), (1.0, 1.5), (1.5, 1.5), (1.5, 1.0)]
    for w in waypoints:
        idx = int(np.argmin(np.linalg.norm(centers - np.array(w), axis=1)))
        phi[idx] = -1.0
    pour = int(np.argmin(np.linalg.norm(centers - np.array([1.5, 0.5]), axis=1)))
    phi[pour] = -4.0
    return Intent.learned("pour-truth", phi, basis)


def builtin(name: str, method: str = "casa", seed: int = 0) -> Scenario:
    world = _default_world()
    if name == "known_goal":
        green = Intent.goal("green", (1.7, 1.0))
        purple = Intent.goal("purple", (0.9, 0.25))
        return Scenario(
            name=name,
            world=world,
            intents=IntentSet((green, purple)),
            method=method,
            operator=ScriptedOperator(kind="optimal_tracker", target=green, seed=seed),
            n_ticks=world.planning_horizon,
            seed=seed,
            start=State(np.array([0.2, 1.0])),
        )
    if name == "unknown_goal":
        green = Intent.goal("green", (1.0, 1.5))
        purple = Intent.goal("purple", (0.3, 0.2))
        hidden = Intent.goal("hidden-red", (1.8, 1.0))
        return Scenario(
            name=name,
            world=world,
            intents=IntentSet((green, purple)),
            method=method,
            operator=ScriptedOperator(kind="optimal_tracker", target=hidden, seed=seed),
            n_ticks=world.planning_horizon,
            seed=seed,
            start=State(np.array([0.2, 1.0])),
        )
    if name == "unknown_skill":
        green = Intent.goal("green", (1.0, 1.75))
        purple = Intent.goal("purple", (0.25, 0.5))
        truth = _corridor_intent(world)
        return Scenario(
            name=name,
            world=world,
            intents=IntentSet((green, purple)),
            method=method,
            operator=ScriptedOperator(kind="optimal_tracker", target=truth, seed=seed),
            n_ticks=world.planning_horizon,
            seed=seed,
            start=State(np.array([0.5, 1.5])),
        )
    if name == "smoke":
        world = WorldConfig(tick_rate=100.0, inference_period_ticks=5, planning_horizon=100)
        goal = Intent.goal("target", (0.7, 1.0))
        return Scenario(
            name=name,
            world=world,
            intents=IntentSet((goal,)),
            method=method,
            operator=ScriptedOperator(kind="optimal_tracker", target=goal, seed=seed),
            n_ticks=60,
            seed=seed,
            start=State(np.array([0.2, 1.0])),
        )
    raise ScenarioError(f"unknown builtin scenario {name!r}")

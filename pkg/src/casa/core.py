"""Core vocabulary: world configuration, states, inputs, actions, trajectories.

All quantities live in a k-dimensional Euclidean workspace. The robot is a
velocity-controlled point; positions are in meters, velocities in m/s and
inputs are unitless axis levels in [-1, 1].
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, EmptyPrefixError, InvalidInputError


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class WorldConfig:
    """Static episode configuration shared by every module.

    state_dim is the action dimensionality k; planning_horizon is the episode
    duration in ticks. inference_period_ticks=5 at tick_rate=10 runs inference
    twice per second.
    """

    state_dim: int = 2
    workspace_bounds: tuple = ((0.0, 2.0), (0.0, 2.0))  # (min, max) per axis, meters
    max_speed: float = 1.0          # m/s
    tick_rate: float = 10.0         # control ticks per second
    inference_period_ticks: int = 5
    planning_horizon: int = 100     # ticks

    def __post_init__(self):
        if self.state_dim < 1:
            raise ValueError("state_dim must be >= 1")
        if self.max_speed <= 0:
            raise ValueError("max_speed must be positive")
        if self.inference_period_ticks < 1:
            raise ValueError("inference_period_ticks must be >= 1")
        if self.planning_horizon < 1:
            raise ValueError("planning_horizon must be >= 1")
        if len(self.workspace_bounds) != self.state_dim:
            raise DimensionError("workspace_bounds must have one (min, max) per axis")
        for lo, hi in self.workspace_bounds:
            if not lo < hi:
                raise ValueError("workspace bounds must be non-degenerate (min < max)")

    @property
    def step_length(self) -> float:
        """Maximum displacement per tick, meters."""
        return self.max_speed / self.tick_rate

    @property
    def bounds_lo(self) -> np.ndarray:
        return np.array([b[0] for b in self.workspace_bounds])

    @property
    def bounds_hi(self) -> np.ndarray:
        return np.array([b[1] for b in self.workspace_bounds])

    def clamp(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.bounds_lo, self.bounds_hi)

    def to_json(self) -> dict:
        return {
            "state_dim": self.state_dim,
            "workspace_bounds": [list(b) for b in self.workspace_bounds],
            "max_speed": self.max_speed,
            "tick_rate": self.tick_rate,
            "inference_period_ticks": self.inference_period_ticks,
            "planning_horizon": self.planning_horizon,
        }

    @classmethod
    def from_json(cls, d: dict) -> "WorldConfig":
        return cls(
            state_dim=int(d.get("state_dim", 2)),
            workspace_bounds=tuple(tuple(b) for b in d["workspace_bounds"])
            if "workspace_bounds" in d
            else ((0.0, 2.0),) * int(d.get("state_dim", 2)),
            max_speed=float(d.get("max_speed", 1.0)),
            tick_rate=float(d.get("tick_rate", 10.0)),
            inference_period_ticks=int(d.get("inference_period_ticks", 5)),
            planning_horizon=int(d.get("planning_horizon", 100)),
        )


@dataclass(frozen=True)
class State:
    """Robot position x, meters."""

    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _freeze(np.atleast_1d(self.x)))
        if not np.all(np.isfinite(self.x)):
            raise InvalidInputError("state components must be finite")

    @property
    def k(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class HumanInput:
    """Interface axis levels a, one per workspace dimension, each in [-1, 1]."""

    command: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "command", _freeze(np.atleast_1d(self.command)))
        if not np.all(np.isfinite(self.command)):
            raise InvalidInputError("input components must be finite")
        if np.any(np.abs(self.command) > 1.0):
            raise InvalidInputError("input components must lie in [-1, 1]")

    @property
    def pressed(self) -> bool:
        return bool(np.any(self.command != 0.0))

    @classmethod
    def zero(cls, k: int) -> "HumanInput":
        return cls(np.zeros(k))


@dataclass(frozen=True)
class Action:
    """Robot velocity command u, m/s."""

    velocity: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "velocity", _freeze(np.atleast_1d(self.velocity)))

    @classmethod
    def zero(cls, k: int) -> "Action":
        return cls(np.zeros(k))


@dataclass(frozen=True)
class Trajectory:
    """Time-stamped sequence of (state, input) pairs.

    Stored column-wise: states is (n, k), inputs is (n, k), ticks is (n,).
    Tick indices are strictly increasing; costs only ever read the states.
    """

    states: np.ndarray
    inputs: np.ndarray
    ticks: np.ndarray

    def __post_init__(self):
        states = np.atleast_2d(np.asarray(self.states, dtype=np.float64))
        inputs = np.atleast_2d(np.asarray(self.inputs, dtype=np.float64))
        ticks = np.atleast_1d(np.asarray(self.ticks, dtype=np.int64))
        if states.shape != inputs.shape or states.shape[0] != ticks.shape[0]:
            raise DimensionError("states, inputs and ticks must have matching lengths")
        if ticks.shape[0] > 1 and not np.all(np.diff(ticks) > 0):
            raise ValueError("tick indices must be strictly increasing")
        if not np.all(np.isfinite(states)):
            raise InvalidInputError("trajectory states must be finite")
        object.__setattr__(self, "states", _freeze(states))
        object.__setattr__(self, "inputs", _freeze(inputs))
        ticks = np.ascontiguousarray(ticks)
        ticks.flags.writeable = False
        object.__setattr__(self, "ticks", ticks)

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def k(self) -> int:
        return self.states.shape[1]

    def step(self, i: int) -> tuple[State, HumanInput]:
        return State(self.states[i]), HumanInput(self.inputs[i])

    @classmethod
    def from_steps(
        cls, steps: Iterable[tuple[State, HumanInput]], ticks: Sequence[int] | None = None
    ) -> "Trajectory":
        pairs = list(steps)
        if ticks is None:
            ticks = list(range(len(pairs)))
        return cls(
            states=np.array([s.x for s, _ in pairs]),
            inputs=np.array([a.command for _, a in pairs]),
            ticks=np.array(ticks),
        )

    @classmethod
    def from_states(cls, states: np.ndarray, ticks: Sequence[int] | None = None) -> "Trajectory":
        states = np.atleast_2d(states)
        if ticks is None:
            ticks = np.arange(states.shape[0])
        return cls(states=states, inputs=np.zeros_like(states), ticks=np.asarray(ticks))

    def to_json(self) -> list[dict]:
        return [
            {"tick": int(t), "x": [float(v) for v in x], "a": [float(v) for v in a]}
            for t, x, a in zip(self.ticks, self.states, self.inputs)
        ]

    @classmethod
    def from_json(cls, records: list[dict]) -> "Trajectory":
        return cls(
            states=np.array([r["x"] for r in records]),
            inputs=np.array([r["a"] for r in records]),
            ticks=np.array([r["tick"] for r in records]),
        )

    def dump(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_json(), f)

    @classmethod
    def load(cls, path) -> "Trajectory":
        with open(path) as f:
            return cls.from_json(json.load(f))


def teleop_map(inp: HumanInput, config: WorldConfig) -> Action:
    """Direct teleoperation: scale axis levels by max speed, clip to the speed limit."""
    if inp.command.shape[0] != config.state_dim:
        raise DimensionError("input dimensionality does not match the world")
    v = inp.command * config.max_speed
    return Action(clip_speed(v, config.max_speed))


def clip_speed(v: np.ndarray, max_speed: float) -> np.ndarray:
    """Norm-clip a velocity. Exact no-op when the norm is already within bounds."""
    n = float(np.linalg.norm(v))
    if n <= max_speed:
        return v
    return v * (max_speed / n)


def trajectory_prefix(traj: Trajectory, t: int) -> Trajectory:
    """All steps with tick index <= t, order preserved."""
    if len(traj) == 0 or t < int(traj.ticks[0]):
        raise EmptyPrefixError(f"no steps at or before tick {t}")
    keep = traj.ticks <= t
    return Trajectory(states=traj.states[keep], inputs=traj.inputs[keep], ticks=traj.ticks[keep])

"""Intent set and cost models.

An intent is a trajectory cost: hand-specified distance-to-goal costs for
known goals, and linear costs over a Gaussian RBF feature basis for intents
learned from demonstrations. Both are additive along the trajectory, which
is what makes prefix likelihoods factor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .core import State, Trajectory, WorldConfig
from .errors import DimensionError, UnsupportedIntentError


@dataclass(frozen=True)
class RbfBasis:
    """Gaussian bumps on a uniform grid over the workspace, plus a constant bias.

    Feature j at position x is exp(-|x - c_j|^2 / (2 sigma^2)), so every
    component lies in (0, 1]. The bias component is identically 1.
    """

    grid_dims: tuple       # bumps per axis, e.g. (5, 5)
    bandwidth: float       # sigma, meters
    bounds: tuple          # (min, max) per axis
    include_bias: bool = True

    @classmethod
    def for_world(cls, config: WorldConfig, per_axis: int = 5) -> "RbfBasis":
        spacing = max(
            (hi - lo) / (per_axis - 1) for lo, hi in config.workspace_bounds
        )
        return cls(
            grid_dims=(per_axis,) * config.state_dim,
            bandwidth=spacing,
            bounds=tuple(tuple(b) for b in config.workspace_bounds),
        )

    @property
    def centers(self) -> np.ndarray:
        axes = [
            np.linspace(lo, hi, n)
            for (lo, hi), n in zip(self.bounds, self.grid_dims)
        ]
        return np.array(list(itertools.product(*axes)))

    @property
    def size(self) -> int:
        m = 1
        for n in self.grid_dims:
            m *= n
        return m + (1 if self.include_bias else 0)

    def features(self, xs: np.ndarray) -> np.ndarray:
        """Feature matrix for a batch of positions, shape (n, m)."""
        xs = np.atleast_2d(xs)
        d2 = ((xs[:, None, :] - self.centers[None, :, :]) ** 2).sum(axis=2)
        phi = np.exp(-d2 / (2.0 * self.bandwidth**2))
        if self.include_bias:
            phi = np.hstack([phi, np.ones((xs.shape[0], 1))])
        return phi

    def to_json(self) -> dict:
        return {
            "grid_dims": list(self.grid_dims),
            "bandwidth": self.bandwidth,
            "bounds": [list(b) for b in self.bounds],
            "include_bias": self.include_bias,
        }

    @classmethod
    def from_json(cls, d: dict) -> "RbfBasis":
        return cls(
            grid_dims=tuple(d["grid_dims"]),
            bandwidth=float(d["bandwidth"]),
            bounds=tuple(tuple(b) for b in d["bounds"]),
            include_bias=bool(d.get("include_bias", True)),
        )


@dataclass(frozen=True)
class GoalCost:
    """Per-state cost is the Euclidean distance to the goal position."""

    goal: np.ndarray

    def __post_init__(self):
        g = np.ascontiguousarray(np.atleast_1d(self.goal), dtype=np.float64)
        g.flags.writeable = False
        object.__setattr__(self, "goal", g)

    def state_costs(self, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(xs)
        if xs.shape[1] != self.goal.shape[0]:
            raise DimensionError("state and goal dimensions differ")
        return np.linalg.norm(xs - self.goal[None, :], axis=1)


@dataclass(frozen=True)
class FeatureCost:
    """Linear cost phi . f(x) over an RBF feature basis."""

    phi: np.ndarray
    basis: RbfBasis

    def __post_init__(self):
        p = np.ascontiguousarray(np.atleast_1d(self.phi), dtype=np.float64)
        if p.shape[0] != self.basis.size:
            raise DimensionError(
                f"phi has {p.shape[0]} weights but the basis has {self.basis.size} features"
            )
        if p.shape[0] < 1 or not np.all(np.isfinite(p)):
            raise DimensionError("phi must be non-empty and finite")
        p.flags.writeable = False
        object.__setattr__(self, "phi", p)

    def state_costs(self, xs: np.ndarray) -> np.ndarray:
        return self.basis.features(xs) @ self.phi

    def state_cost_grad(self, xs: np.ndarray) -> np.ndarray:
        """d(phi . f(x))/dx for a batch of positions, shape (n, k)."""
        xs = np.atleast_2d(xs)
        centers = self.basis.centers
        n_rbf = centers.shape[0]
        w = self.phi[:n_rbf]
        feats = self.basis.features(xs)[:, :n_rbf]
        wf = feats * w[None, :]
        # grad of each bump is f_j(x) (c_j - x) / sigma^2; bias contributes nothing
        return (wf @ centers - wf.sum(axis=1, keepdims=True) * xs) / self.basis.bandwidth**2

    def best_center(self) -> np.ndarray:
        """RBF center with the lowest per-state cost (first on ties)."""
        centers = self.basis.centers
        return centers[int(np.argmin(self.state_costs(centers)))]


@dataclass(frozen=True)
class Intent:
    """A candidate task: an id plus the cost model that encodes it."""

    id: str
    kind: str                      # "goal" or "learned"
    cost_model: GoalCost | FeatureCost = None

    def __post_init__(self):
        if self.kind not in ("goal", "learned"):
            raise ValueError(f"unknown intent kind {self.kind!r}")

    @classmethod
    def goal(cls, id: str, goal) -> "Intent":
        return cls(id=id, kind="goal", cost_model=GoalCost(np.asarray(goal, dtype=float)))

    @classmethod
    def learned(cls, id: str, phi, basis: RbfBasis) -> "Intent":
        return cls(id=id, kind="learned", cost_model=FeatureCost(np.asarray(phi, dtype=float), basis))

    def to_json(self) -> dict:
        d = {"id": self.id, "kind": self.kind}
        if self.kind == "goal":
            d["goal"] = [float(v) for v in self.cost_model.goal]
        else:
            d["phi"] = [float(v) for v in self.cost_model.phi]
            d["basis"] = self.cost_model.basis.to_json()
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Intent":
        if d["kind"] == "goal":
            return cls.goal(d["id"], d["goal"])
        return cls.learned(d["id"], d["phi"], RbfBasis.from_json(d["basis"]))


@dataclass(frozen=True)
class IntentSet:
    """Ordered repertoire of known intents with unique ids."""

    intents: tuple

    def __post_init__(self):
        object.__setattr__(self, "intents", tuple(self.intents))
        ids = [i.id for i in self.intents]
        if len(set(ids)) != len(ids):
            raise ValueError("intent ids must be unique")

    def __len__(self) -> int:
        return len(self.intents)

    def __iter__(self):
        return iter(self.intents)

    @property
    def ids(self) -> list[str]:
        return [i.id for i in self.intents]

    def get(self, id: str) -> Intent:
        for i in self.intents:
            if i.id == id:
                return i
        raise KeyError(id)

    def with_intent(self, intent: Intent) -> "IntentSet":
        return IntentSet(self.intents + (intent,))

    def without(self, id: str) -> "IntentSet":
        return IntentSet(tuple(i for i in self.intents if i.id != id))

    def to_json(self) -> list[dict]:
        return [i.to_json() for i in self.intents]

    @classmethod
    def from_json(cls, items: list[dict]) -> "IntentSet":
        return cls(tuple(Intent.from_json(d) for d in items))


def state_costs(intent: Intent, xs: np.ndarray) -> np.ndarray:
    """Per-state costs for a batch of positions."""
    return intent.cost_model.state_costs(xs)


def cost(intent: Intent, traj: Trajectory) -> float:
    """Trajectory cost: sum of per-state costs. Additive along the trajectory."""
    if len(traj) == 0:
        raise ValueError("cost of an empty trajectory is undefined")
    return float(np.sum(state_costs(intent, traj.states)))


def cost_gradient(intent: Intent, traj: Trajectory) -> np.ndarray:
    """Gradient of a learned intent's cost w.r.t. its weights: summed features."""
    if intent.kind != "learned":
        raise UnsupportedIntentError("cost_gradient is defined for learned intents only")
    return intent.cost_model.basis.features(traj.states).sum(axis=0)


def feature_vector(basis: RbfBasis, x: State) -> np.ndarray:
    """Feature vector of a single state."""
    return basis.features(x.x[None, :])[0]

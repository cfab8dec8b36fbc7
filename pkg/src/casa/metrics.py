"""Objective episode measures and the experiment harness.

Error compares executed and intended trajectories after arc-length
resampling both to a fixed number of points; efficiency cost sums squared
velocities; effort counts ticks with any key held. The harness runs a
scenario over seeds and methods, dumping JSON reports, JSON-lines episode
logs and a CSV time series per run.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import HumanInput, Trajectory, WorldConfig
from .scenarios import Scenario
from .simulator import Episode, run_scripted

RESAMPLE_POINTS = 100


@dataclass(frozen=True)
class MetricsReport:
    error: float
    efficiency_cost: float
    effort: int
    method: str
    scenario: str
    seed: int
    effort_relative: float | None = None  # effort / no-assist effort, same scenario+seed

    def to_json(self) -> dict:
        return {
            "error": self.error,
            "efficiency_cost": self.efficiency_cost,
            "effort": self.effort,
            "effort_relative": self.effort_relative,
            "method": self.method,
            "scenario": self.scenario,
            "seed": self.seed,
        }


def resample_arclength(states: np.ndarray, n: int = RESAMPLE_POINTS) -> np.ndarray:
    """Resample a polyline to n points equally spaced in arc length."""
    states = np.atleast_2d(states)
    if states.shape[0] == 1:
        return np.repeat(states, n, axis=0)
    seg = np.linalg.norm(np.diff(states, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    if total == 0.0:
        return np.repeat(states[:1], n, axis=0)
    grid = np.linspace(0.0, total, n)
    return np.stack([np.interp(grid, s, states[:, d]) for d in range(states.shape[1])], axis=1)


def error_metric(executed: Trajectory, reference: Trajectory) -> float:
    """Sum of squared pointwise differences after arc-length resampling."""
    a = resample_arclength(executed.states)
    b = resample_arclength(reference.states)
    return float(np.sum((a - b) ** 2))


def efficiency_cost(executed: Trajectory, config: WorldConfig) -> float:
    """Sum of squared per-tick velocities."""
    if len(executed) < 2:
        raise ValueError("efficiency cost needs at least two states")
    v = np.diff(executed.states, axis=0) * config.tick_rate
    return float(np.sum(v**2))


def effort(inputs: list[HumanInput]) -> int:
    """Number of ticks with any key held."""
    return sum(1 for a in inputs if a.pressed)


def episode_effort(episode: Episode) -> int:
    traj = episode.history
    return int(np.sum(np.any(traj.inputs[:-1] != 0.0, axis=1)))


def episode_metrics(episode: Episode, scenario_name: str, seed: int) -> MetricsReport:
    traj = episode.history
    ref = episode.reference
    return MetricsReport(
        error=error_metric(traj, ref) if ref is not None else float("nan"),
        efficiency_cost=efficiency_cost(traj, episode.world),
        effort=episode_effort(episode),
        method=episode.method,
        scenario=scenario_name,
        seed=seed,
    )


# CSV column order: tick, beta_<id> per intent (intent order), p_<id> per
# intent, then alpha_casa, alpha_pba, alpha_belief.
def timeseries_rows(episode: Episode) -> tuple[list[str], list[list]]:
    ids = episode.intents.ids
    header = (
        ["tick"]
        + [f"beta_{i}" for i in ids]
        + [f"p_{i}" for i in ids]
        + ["alpha_casa", "alpha_pba", "alpha_belief"]
    )
    rows = []
    for r in episode.assist_log:
        rows.append(
            [r.tick]
            + [r.betas.get(i, float("nan")) for i in ids]
            + [r.posterior.get(i, float("nan")) for i in ids]
            + [r.alphas.get(m, float("nan")) for m in ("casa", "pba", "belief")]
        )
    return header, rows


def dump_episode_log(episode: Episode, path) -> None:
    with open(path, "w") as f:
        for rec in episode.tick_log:
            f.write(json.dumps(rec) + "\n")


def run_episode(scenario: Scenario, method: str | None = None, seed: int | None = None) -> Episode:
    episode, operator = scenario.build_episode(method=method, seed=seed)
    return run_scripted(episode, operator, scenario.n_ticks)


def run_experiment(
    scenario: Scenario,
    methods: list[str] | None = None,
    seeds: list[int] | None = None,
    out_dir: str | Path | None = None,
) -> list[MetricsReport]:
    """Run scenario x method x seed cells; deterministic per seed.

    Reports gain effort_relative when the no-assist baseline is among the
    methods. With out_dir set, writes <scenario>_<method>_<seed>.{jsonl,csv}
    and a combined report.json.
    """
    methods = methods or [scenario.method]
    seeds = seeds if seeds is not None else [scenario.seed]
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    reports: list[MetricsReport] = []
    baseline_effort: dict[int, int] = {}
    episodes: dict[tuple[str, int], Episode] = {}
    for method in methods:
        for seed in seeds:
            ep = run_episode(scenario, method=method, seed=seed)
            episodes[(method, seed)] = ep
            if method == "none":
                baseline_effort[seed] = episode_effort(ep)
    for method in methods:
        for seed in seeds:
            ep = episodes[(method, seed)]
            rep = episode_metrics(ep, scenario.name, seed)
            if seed in baseline_effort and baseline_effort[seed] > 0:
                rep = MetricsReport(
                    **{**rep.to_json(), "effort_relative": rep.effort / baseline_effort[seed]}
                )
            reports.append(rep)
            if out is not None:
                stem = f"{scenario.name}_{method}_{seed}"
                dump_episode_log(ep, out / f"{stem}.jsonl")
                header, rows = timeseries_rows(ep)
                with open(out / f"{stem}.csv", "w", newline="") as f:
                    w = csv.writer(f)
                    w.writerow(header)
                    w.writerows(rows)
    if out is not None:
        with open(out / "report.json", "w") as f:
            json.dump([r.to_json() for r in reports], f, indent=2)
    return reports

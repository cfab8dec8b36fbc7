"""Reproduce the headless case study: three tasks, four arbitration methods.

Writes per-run CSV time series and episode logs plus comparison plots under
out/case_study/. The unknown-goal and unknown-skill tasks are also re-run
after learning the missing intent from five scripted demonstrations.

Usage:  python3 scripts/run_case_study.py [--out out/case_study]
"""

import argparse
import warnings
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from casa.core import State
from casa.irl import DemoSet, IrlConfig
from casa.metrics import run_experiment, run_episode, timeseries_rows
from casa.scenarios import builtin
from casa.simulator import Episode, ScriptedOperator, lifelong_update, run_scripted

DEMO_STARTS = {
    "unknown_goal": [(0.2, 1.0), (0.3, 0.7), (0.25, 1.3), (0.5, 0.9), (0.4, 1.2)],
    "unknown_skill": [(0.5, 1.5), (0.4, 1.3), (0.6, 1.7), (0.3, 1.5), (0.7, 1.4)],
}


def plot_alpha_series(episode, title, path):
    rows = episode.assist_log
    ticks = [r.tick for r in rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 3.2))
    for intent_id in episode.intents.ids:
        ax1.plot(ticks, [r.betas[intent_id] for r in rows], label=intent_id)
    ax1.set_xlabel("tick"), ax1.set_ylabel("confidence"), ax1.legend(fontsize=7)
    for method in ("casa", "pba", "belief"):
        if all(method in r.alphas for r in rows):
            ax2.plot(ticks, [r.alphas[method] for r in rows], label=method)
    ax2.set_xlabel("tick"), ax2.set_ylabel("human authority"), ax2.set_ylim(-0.05, 1.05)
    ax2.legend(fontsize=7)
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def record_demos(scenario, starts):
    demos = []
    for s in starts:
        ep = Episode(
            world=scenario.world, intents=scenario.intents, method="none",
            start=State(np.array(s)),
        )
        run_scripted(
            ep, ScriptedOperator(kind="optimal_tracker", target=scenario.operator.target),
            scenario.n_ticks,
        )
        demos.append(ep.history)
    return DemoSet(tuple(demos))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out/case_study")
    ap.add_argument("--seeds", default="0,1,2")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seeds = [int(s) for s in args.seeds.split(",")]

    for name in ("known_goal", "unknown_goal", "unknown_skill"):
        sc = builtin(name)
        reports = run_experiment(sc, methods=["casa", "pba", "belief", "none"],
                                 seeds=seeds, out_dir=out / name)
        for r in reports:
            print(r.to_json())
        ep = run_episode(sc, method="casa")
        plot_alpha_series(ep, f"{name} (before learning)", out / f"{name}_before.png")

        if name in DEMO_STARTS:
            demos = record_demos(sc, DEMO_STARTS[name])
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                enlarged = lifelong_update(
                    sc.intents, demos,
                    IrlConfig(seed=2, max_iters=80, noise_scale=5e-3), sc.world,
                )
            ep2 = Episode(world=sc.world, intents=enlarged, method="casa", start=sc.start)
            run_scripted(ep2, sc.operator, sc.n_ticks)
            plot_alpha_series(ep2, f"{name} (after learning)", out / f"{name}_after.png")
    print(f"artifacts in {out}/")


if __name__ == "__main__":
    main()

"""Command line entry points.

casa run <scenario> --method casa,pba,none --seeds 1,2,3 --out dir/
casa replay <log.jsonl> [--scenario s]
casa learn <demos.json> --out intent.json
casa serve [--host H] [--port P] [--ui dir] [--manual-clock]

Exit code 0 on success, 2 on scenario errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import ScenarioError
from .core import Trajectory
from .irl import DemoSet, IrlConfig, learn_intent
from .metrics import episode_metrics, run_experiment
from .scenarios import load_scenario
from .simulator import ScriptedOperator, run_scripted


def _cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    methods = args.method.split(",") if args.method else None
    seeds = [int(s) for s in args.seeds.split(",")] if args.seeds else None
    reports = run_experiment(scenario, methods=methods, seeds=seeds, out_dir=args.out)
    for r in reports:
        print(json.dumps(r.to_json()))
    return 0


def _cmd_replay(args) -> int:
    records = []
    with open(args.log) as f:
        for line in f:
            if line.strip():
                records.append(json.loads(line))
    if not records:
        print("empty log", file=sys.stderr)
        return 2
    scenario = load_scenario(args.scenario)
    inputs = np.array([r["a"] for r in records])
    states = np.array([r["x"] for r in records])
    replay = Trajectory(states=states, inputs=inputs, ticks=np.arange(len(records)))
    episode, _ = scenario.build_episode()
    run_scripted(episode, ScriptedOperator(kind="replay", replay=replay), len(records))
    replayed = episode.history.states[:-1]
    identical = replayed.shape == states.shape and bool(np.array_equal(replayed, states))
    print(f"replayed {len(records)} ticks; states identical: {identical}")
    rep = episode_metrics(episode, scenario.name, scenario.seed)
    print(json.dumps(rep.to_json()))
    return 0 if identical else 2


def _cmd_learn(args) -> int:
    with open(args.demos) as f:
        demo_records = json.load(f)
    demos = DemoSet.from_json(demo_records)
    scenario = load_scenario(args.scenario)
    cfg = IrlConfig(seed=args.seed, max_iters=args.iters)
    intent = learn_intent(demos, cfg, scenario.world)
    with open(args.out, "w") as f:
        json.dump(intent.to_json(), f, indent=2)
    print(f"learned intent {intent.id!r} -> {args.out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        tick_mode="manual" if args.manual_clock else "realtime",
        ui_dir=args.ui,
    )
    print(f"casa-serve: listening on {args.host}:{args.port}", flush=True)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="casa")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario headlessly and report metrics")
    run.add_argument("scenario", help="builtin name or scenario.json path")
    run.add_argument("--method", default=None, help="comma list: casa,pba,belief,none")
    run.add_argument("--seeds", default=None, help="comma list of integer seeds")
    run.add_argument("--out", default=None, help="output directory for logs/CSV/report")
    run.set_defaults(fn=_cmd_run)

    rep = sub.add_parser("replay", help="re-execute a recorded episode log")
    rep.add_argument("log", help="episode .jsonl log")
    rep.add_argument("--scenario", default="known_goal", help="scenario the log came from")
    rep.set_defaults(fn=_cmd_replay)

    lrn = sub.add_parser("learn", help="learn an intent from demonstration files")
    lrn.add_argument("demos", help="JSON list of trajectory records")
    lrn.add_argument("--out", required=True, help="output intent .json")
    lrn.add_argument("--scenario", default="known_goal", help="world configuration source")
    lrn.add_argument("--seed", type=int, default=0)
    lrn.add_argument("--iters", type=int, default=200)
    lrn.set_defaults(fn=_cmd_learn)

    srv = sub.add_parser("serve", help="run the live teleoperation service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.add_argument("--ui", default=None, help="static directory with the browser client")
    srv.add_argument("--manual-clock", action="store_true", help="tick only on advance messages")
    srv.set_defaults(fn=_cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ScenarioError as e:
        print(f"scenario error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Regenerate golden fixture files for the regression tests.

Run from the repo root:  python3 scripts/freeze_goldens.py
Overwrites tests/goldens/*.json. Inspect diffs before committing.
"""

import json
from pathlib import Path

from casa.metrics import error_metric, run_episode
from casa.scenarios import builtin

GOLDEN_DIR = Path(__file__).resolve().parent.parent / "tests" / "goldens"


def fig3_series() -> dict:
    """Arbitration comparison on the unknown_goal task with the optimal
    scripted operator: per-inference-step confidences, posterior and the
    alpha each method would apply."""
    sc = builtin("unknown_goal", method="casa")
    ep = run_episode(sc)
    return {
        "scenario": sc.name,
        "rows": [
            {
                "tick": r.tick,
                "betas": r.betas,
                "posterior": r.posterior,
                "alphas": r.alphas,
                "theta_star": r.theta_star,
            }
            for r in ep.assist_log
        ],
    }


def known_goal_error() -> dict:
    sc = builtin("known_goal", method="casa")
    ep = run_episode(sc)
    return {"error_vs_reference": error_metric(ep.history, ep.reference)}


def main() -> None:
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    for name, payload in [
        ("fig3_unknown_goal.json", fig3_series()),
        ("known_goal_error.json", known_goal_error()),
    ]:
        path = GOLDEN_DIR / name
        path.write_text(json.dumps(payload, indent=1))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()

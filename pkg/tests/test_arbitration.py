import numpy as np
import pytest
from hypothesis import given, strategies as st

import casa.planner as planner_module
from casa.arbitration import (
    ArbitrationConfig,
    arbitrate,
    belief_alpha,
    blend,
    casa_alpha,
    pba_alpha,
)
from casa.core import Action, HumanInput, State, Trajectory, WorldConfig, teleop_map
from casa.errors import InvalidAlphaError, InvalidArityError, InvalidThresholdError
from casa.intents import Intent, IntentSet
from casa.planner import plan


def test_casa_alpha_examples():
    assert casa_alpha(2.0) == 0.5
    assert casa_alpha(0.5) == 1.0
    assert casa_alpha(1e6) == 1e-6
    assert casa_alpha(0.0) == 1.0


@given(b1=st.floats(0, 1e7), b2=st.floats(0, 1e7))
def test_casa_alpha_nonincreasing(b1, b2):
    lo, hi = sorted((b1, b2))
    assert casa_alpha(lo) >= casa_alpha(hi)


def test_casa_alpha_continuous_at_one():
    eps = 1e-9
    assert abs(casa_alpha(1.0 + eps) - casa_alpha(1.0 - eps)) < 1e-8
    assert casa_alpha(1.0) == 1.0


def test_pba_alpha_examples():
    assert pba_alpha(1.0, 1.0) == 1.0
    assert pba_alpha(0.0, 1.0) == 0.0
    assert pba_alpha(0.25, 1.0) == 0.25
    with pytest.raises(InvalidThresholdError):
        pba_alpha(0.5, 0.0)


def test_belief_alpha_examples():
    assert belief_alpha(0.5, 2) == 1.0       # uniform belief -> full human authority
    assert belief_alpha(1.0, 2) == 0.0       # certain belief -> robot authority
    assert belief_alpha(0.0, 2) == 1.0       # below uniform clamps
    assert belief_alpha(1.0 / 3.0, 3) == 1.0
    with pytest.raises(InvalidArityError):
        belief_alpha(0.5, 1)


def test_blend_endpoints_exact(world):
    inp = HumanInput(np.array([0.4, -0.2]))
    u_star = Action(np.array([0.1, 0.9]))
    t = teleop_map(inp, world)
    assert np.array_equal(blend(inp, u_star, 1.0, world).velocity, t.velocity)
    assert blend(inp, u_star, 0.0, world) is u_star


def test_blend_midpoint(world):
    out = blend(HumanInput(np.array([1.0, 0.0])), Action(np.array([0.0, 1.0])), 0.5, world)
    assert np.allclose(out.velocity, [0.5, 0.5])
    assert np.linalg.norm(out.velocity) <= world.max_speed


def test_blend_invalid_alpha(world):
    with pytest.raises(InvalidAlphaError):
        blend(HumanInput.zero(2), Action.zero(2), 1.5, world)


@given(
    a0=st.floats(-1, 1), a1=st.floats(-1, 1),
    u0=st.floats(-1, 1), u1=st.floats(-1, 1),
    alpha=st.floats(0, 1),
)
def test_blend_within_hull(a0, a1, u0, u1, alpha):
    world = WorldConfig()
    inp = HumanInput(np.array([a0, a1]))
    u_star = Action(np.array([u0, u1]) * world.max_speed / max(1.0, np.hypot(u0, u1)))
    out = blend(inp, u_star, alpha, world).velocity
    t = teleop_map(inp, world).velocity
    # convex combination before clipping: within the segment's bounding box
    lo = np.minimum(t, u_star.velocity) - 1e-9
    hi = np.maximum(t, u_star.velocity) + 1e-9
    if np.linalg.norm(alpha * t + (1 - alpha) * u_star.velocity) <= world.max_speed:
        assert np.all(out >= lo) and np.all(out <= hi)
    assert np.linalg.norm(out) <= world.max_speed + 1e-12


def _tracking_episode_prefix(world, intent, n_moves):
    p = plan(State(np.array([0.2, 1.0])), intent, world.planning_horizon, world)
    return Trajectory.from_states(p.states[: n_moves + 1])


def test_arbitrate_tracking_known_goal(world, two_goals):
    # 20 inference steps of exact tracking: beta = 20*2/(2*1) = 20, alpha = 0.05
    traj = _tracking_episode_prefix(world, two_goals.get("a"), 100)
    res = arbitrate("casa", traj, two_goals, world, t=20)
    assert res.betas["a"] == 20.0
    assert res.alpha == 0.05
    assert res.theta_star == "a"


def test_arbitrate_all_low_beta_gives_full_teleop(world, two_goals):
    # inputs orthogonal to both goals: betas end <= 1, alpha = 1, u = teleop
    states = np.column_stack([np.full(11, 1.0), np.linspace(1.0, 0.2, 11)])
    inputs = np.zeros((11, 2))
    inputs[-1] = [0.0, -0.8]
    traj = Trajectory(states=states, inputs=inputs, ticks=np.arange(11))
    res = arbitrate("casa", traj, two_goals, world)
    assert all(b <= 1.0 for b in res.betas.values())
    assert res.alpha == 1.0
    assert np.array_equal(res.u.velocity, teleop_map(HumanInput(inputs[-1]), world).velocity)


def test_arbitrate_none_never_plans(world, two_goals, monkeypatch):
    calls = {"n": 0}
    orig = planner_module.plan

    def counting_plan(*a, **kw):
        calls["n"] += 1
        return orig(*a, **kw)

    monkeypatch.setattr(planner_module, "plan", counting_plan)
    traj = Trajectory.from_states(np.ones((6, 2)))
    res = arbitrate("none", traj, two_goals, world)
    assert res.alpha == 1.0
    assert res.theta_star is None
    assert calls["n"] == 0


def test_arbitrate_reports_all_alphas(world, two_goals):
    traj = _tracking_episode_prefix(world, two_goals.get("a"), 10)
    res = arbitrate("casa", traj, two_goals, world)
    assert set(res.alphas) == {"casa", "pba", "belief"}
    assert 0.0 <= min(res.alphas.values()) and max(res.alphas.values()) <= 1.0
    assert np.isclose(sum(res.posterior.values()), 1.0)


def test_arbitrate_pba_uses_distance(world, two_goals):
    traj = _tracking_episode_prefix(world, two_goals.get("a"), 10)
    res = arbitrate("pba", traj, two_goals, world)
    d = float(np.linalg.norm(traj.states[-1] - np.array([1.5, 1.0])))
    assert np.isclose(res.alphas["pba"], min(1.0, d / ArbitrationConfig().pba_threshold))


def test_arbitrate_mle_estimator(world, two_goals):
    traj = _tracking_episode_prefix(world, two_goals.get("a"), 10)
    res = arbitrate("casa", traj, two_goals, world, ArbitrationConfig(estimator="mle"))
    assert res.betas["a"] >= 1e6  # exact tracking, capped MLE
    assert res.alpha <= 1e-6

import numpy as np
import pytest
from fastapi.testclient import TestClient

from casa.service import OutBuffer, create_app


@pytest.fixture
def client():
    app = create_app(tick_mode="manual")
    with TestClient(app) as c:
        yield c


def _drain_until(ws, mtype, limit=200):
    """Receive messages until one of the given type arrives."""
    seen = []
    for _ in range(limit):
        msg = ws.receive_json()
        seen.append(msg)
        if msg["type"] == mtype:
            return msg, seen
    raise AssertionError(f"no {mtype!r} within {limit} messages: {[m['type'] for m in seen]}")


def test_start_echoes_config(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "start", "scenario": "known_goal", "method": "casa"})
        msg, _ = _drain_until(ws, "started")
        cfg = msg["config"]
        assert cfg["scenario"] == "known_goal"
        assert cfg["method"] == "casa"
        assert cfg["world"]["tick_rate"] == 10.0
        assert [i["id"] for i in cfg["intents"]] == ["green", "purple"]
        assert cfg["epsilon"] == 2.0


def test_input_then_tick_advances_state(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "start", "scenario": "known_goal", "method": "none"})
        _drain_until(ws, "started")
        ws.send_json({"type": "input", "a": [1.0, 0.0]})
        ws.send_json({"type": "advance", "n": 1})
        msg, _ = _drain_until(ws, "state")
        assert msg["tick"] == 1
        assert np.allclose(msg["x"], [0.3, 1.0])  # start (0.2, 1.0) + max_speed/tick_rate
        assert msg["alpha"] == 1.0


def test_inference_message_schema(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "start", "scenario": "known_goal", "method": "casa"})
        _drain_until(ws, "started")
        ws.send_json({"type": "input", "a": [1.0, 0.0]})
        ws.send_json({"type": "advance", "n": 6})
        msg, _ = _drain_until(ws, "inference")
        assert msg["tick"] == 5
        assert set(msg["betas"]) == {"green", "purple"}
        assert set(msg["posterior"]) == {"green", "purple"}
        assert msg["theta_star"] in ("green", "purple")
        assert set(msg["alphas"]) == {"casa", "pba", "belief"}
        assert isinstance(msg["misspecified"], bool)
        assert msg["epsilon"] == 2.0


def test_malformed_message_keeps_session(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "bogus"})
        msg, _ = _drain_until(ws, "error")
        assert msg["code"] == "bad_message"
        ws.send_json({"type": "start", "scenario": "known_goal", "method": "none"})
        _drain_until(ws, "started")


def test_bad_input_rejected(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "start", "scenario": "known_goal", "method": "none"})
        _drain_until(ws, "started")
        ws.send_json({"type": "input", "a": [5.0, 0.0]})
        msg, _ = _drain_until(ws, "error")
        assert msg["code"] == "bad_input"


def test_demo_recording_flow(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "start", "scenario": "unknown_goal", "record_demo": True})
        msg, _ = _drain_until(ws, "started")
        assert msg["config"]["method"] == "none"  # demos force direct teleoperation
        ws.send_json({"type": "input", "a": [1.0, 0.0]})
        ws.send_json({"type": "advance", "n": 7})
        ws.send_json({"type": "finish_demo"})
        msg, _ = _drain_until(ws, "demo_saved")
        assert msg["id"] == "demo-1"
        assert msg["length"] == 7


def test_irl_requires_demos(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "start", "scenario": "unknown_goal", "method": "casa"})
        _drain_until(ws, "started")
        ws.send_json({"type": "start_irl", "demo_ids": []})
        msg, _ = _drain_until(ws, "error")
        assert msg["code"] == "no_demos"


def _record_demo(ws, ticks=40):
    ws.send_json({"type": "start", "scenario": "unknown_goal", "record_demo": True})
    _drain_until(ws, "started")
    ws.send_json({"type": "input", "a": [1.0, 0.0]})
    ws.send_json({"type": "advance", "n": ticks})
    ws.send_json({"type": "finish_demo"})
    msg, _ = _drain_until(ws, "demo_saved")
    return msg["id"]


def test_irl_job_and_next_episode_uses_intent(client):
    with client.websocket_connect("/ws") as ws:
        demo_id = _record_demo(ws)
        ws.send_json(
            {
                "type": "start_irl",
                "demo_ids": [demo_id],
                "cfg": {"max_iters": 4, "n_samples": 4, "seed": 1},
            }
        )
        done, seen = _drain_until(ws, "irl_done")
        assert any(m["type"] == "irl_progress" for m in seen)
        new_id = done["intent_id"]
        ws.send_json({"type": "start", "scenario": "unknown_goal", "method": "casa"})
        msg, _ = _drain_until(ws, "started")
        assert new_id in [i["id"] for i in msg["config"]["intents"]]


def test_irl_busy_error(client):
    with client.websocket_connect("/ws") as ws:
        demo_id = _record_demo(ws)
        ws.send_json(
            {
                "type": "start_irl",
                "demo_ids": [demo_id],
                "cfg": {"max_iters": 60, "n_samples": 8, "seed": 1},
            }
        )
        ws.send_json({"type": "start_irl", "demo_ids": [demo_id]})
        msg, seen = _drain_until(ws, "error")
        assert msg["code"] == "busy"
        _drain_until(ws, "irl_done", limit=500)


def test_irl_cancel_keeps_intents(client):
    with client.websocket_connect("/ws") as ws:
        demo_id = _record_demo(ws)
        ws.send_json(
            {
                "type": "start_irl",
                "demo_ids": [demo_id],
                "cfg": {"max_iters": 5000, "n_samples": 16, "seed": 1},
            }
        )
        ws.send_json({"type": "cancel_irl"})
        _drain_until(ws, "irl_cancelled", limit=2000)
        ws.send_json({"type": "start", "scenario": "unknown_goal", "method": "casa"})
        msg, _ = _drain_until(ws, "started")
        assert [i["id"] for i in msg["config"]["intents"]] == ["green", "purple"]


def test_no_mid_episode_intent_swap(client):
    with client.websocket_connect("/ws") as ws:
        demo_id = _record_demo(ws)
        ws.send_json({"type": "start", "scenario": "unknown_goal", "method": "casa"})
        _drain_until(ws, "started")
        ws.send_json({"type": "input", "a": [1.0, 0.0]})
        # the tick-5 inference runs while consuming the input of the 6th step
        ws.send_json({"type": "advance", "n": 6})
        _drain_until(ws, "inference")
        ws.send_json(
            {
                "type": "start_irl",
                "demo_ids": [demo_id],
                "cfg": {"max_iters": 3, "n_samples": 2, "seed": 0},
            }
        )
        _drain_until(ws, "irl_done")
        ws.send_json({"type": "advance", "n": 5})
        msg, _ = _drain_until(ws, "inference")
        assert set(msg["betas"]) == {"green", "purple"}  # unchanged mid-episode


def test_irl_end_to_end_confidence_rises(client):
    """Record a real demonstration, learn from it, and verify the next
    assisted episode trusts the new intent: its confidence rises and the
    robot takes some control."""
    with client.websocket_connect("/ws") as ws:
        # demo: straight run toward the hidden goal, then hold position
        ws.send_json({"type": "start", "scenario": "unknown_goal", "record_demo": True})
        _drain_until(ws, "started")
        ws.send_json({"type": "input", "a": [1.0, 0.0]})
        ws.send_json({"type": "advance", "n": 80})
        ws.send_json({"type": "input", "a": [0.0, 0.0]})
        ws.send_json({"type": "advance", "n": 20})
        ws.send_json({"type": "finish_demo"})
        demo = _drain_until(ws, "demo_saved")[0]

        ws.send_json(
            {
                "type": "start_irl",
                "demo_ids": [demo["id"]],
                "cfg": {"max_iters": 80, "noise_scale": 0.005, "seed": 2},
            }
        )
        done, _ = _drain_until(ws, "irl_done", limit=2000)
        new_id = done["intent_id"]

        ws.send_json({"type": "start", "scenario": "unknown_goal", "method": "casa"})
        _drain_until(ws, "started")
        ws.send_json({"type": "input", "a": [1.0, 0.0]})
        ws.send_json({"type": "advance", "n": 80})
        ws.send_json({"type": "input", "a": [0.0, 0.0]})
        ws.send_json({"type": "advance", "n": 20})
        ws.send_json({"type": "stop"})
        betas, alphas = [], []
        while True:
            m = ws.receive_json()
            if m["type"] == "inference":
                betas.append(m["betas"][new_id])
                alphas.append(m["alphas"]["casa"])
            elif m["type"] == "stopped":
                break
        assert len(betas) >= 10
        assert betas[-1] > betas[0]
        assert max(betas) > 2.0
        assert min(alphas) < 1.0


def test_replayed_message_log_reproduces_streams():
    script = [
        {"type": "start", "scenario": "known_goal", "method": "casa", "seed": 7},
        {"type": "input", "a": [1.0, 0.0]},
        {"type": "advance", "n": 8},
        {"type": "input", "a": [0.5, -0.5]},
        {"type": "advance", "n": 7},
        {"type": "stop"},
    ]

    def run():
        app = create_app(tick_mode="manual")
        out = []
        with TestClient(app) as c:
            with c.websocket_connect("/ws") as ws:
                for msg in script:
                    ws.send_json(msg)
                while True:
                    m = ws.receive_json()
                    out.append(m)
                    if m["type"] == "stopped":
                        break
        return out

    assert run() == run()


def test_stop_without_episode(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "stop"})
        msg, _ = _drain_until(ws, "stopped")
        assert msg["tick"] is None


def test_outbuffer_drops_oldest_droppable():
    buf = OutBuffer(cap=3)
    buf.push({"type": "inference", "tick": 0})
    for i in range(5):
        buf.push({"type": "state", "tick": i}, droppable=True)
    msgs = buf.pop_all()
    states = [m["tick"] for m in msgs if m["type"] == "state"]
    assert states == [2, 3, 4]  # oldest states dropped
    assert any(m["type"] == "inference" for m in msgs)  # never dropped
    assert len(buf) == 0

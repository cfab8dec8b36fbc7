"""Live teleoperation session server.

JSON text messages over a WebSocket. The server is authoritative: it ticks
each session's episode on its own clock, consuming the latest held input
(last-writer-wins between ticks), and streams `state` after every tick and
`inference` after every inference tick. Demonstrations are recorded under
forced direct teleoperation; IRL jobs run off the session loop and publish
their intent through an atomic library swap applied at the next episode
start.

Construct the app with tick_mode="manual" to drive time with `advance`
messages instead of the wall clock (used by tests and deterministic
replays; clients still never advance simulation in realtime mode).
"""

from __future__ import annotations

import asyncio
import threading
from collections import deque
from dataclasses import replace

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .arbitration import NONE
from .core import HumanInput
from .errors import CasaError, ScenarioError
from .irl import DemoSet, IrlConfig, learn_intent
from .scenarios import load_scenario
from .simulator import detect_misspecification

STATE_BUFFER_CAP = 512  # droppable state messages held for a slow client


class OutBuffer:
    """Outbound queue that drops oldest droppable messages under backpressure."""

    def __init__(self, cap: int = STATE_BUFFER_CAP):
        self._items: deque = deque()
        self._cap = cap
        self._droppable = 0
        self.event = asyncio.Event()

    def push(self, msg: dict, droppable: bool = False) -> None:
        self._items.append((droppable, msg))
        if droppable:
            self._droppable += 1
        while self._droppable > self._cap:
            for i, (d, _) in enumerate(self._items):
                if d:
                    del self._items[i]
                    self._droppable -= 1
                    break
        self.event.set()

    def pop_all(self) -> list:
        out = [m for _, m in self._items]
        self._items.clear()
        self._droppable = 0
        self.event.clear()
        return out

    def __len__(self) -> int:
        return len(self._items)


class _IrlCancelled(Exception):
    pass


class Session:
    """One client connection: at most one live episode plus a demo store."""

    def __init__(self, session_id: str, tick_mode: str):
        self.id = session_id
        self.tick_mode = tick_mode
        self.episode = None
        self.scenario = None
        self.recording_demo = False
        self.held = None
        self.demos: dict[str, object] = {}
        self._demo_counter = 0
        self._learned_counter = 0
        self.library: list = []  # learned intents, applied at next start
        self.outbox = OutBuffer()
        self.irl_task: asyncio.Task | None = None
        self.irl_cancel = threading.Event()

    def push(self, msg: dict, droppable: bool = False) -> None:
        self.outbox.push(msg, droppable)

    def error(self, code: str, detail: str) -> None:
        self.push({"type": "error", "code": code, "detail": detail})

    # -- episode control ---------------------------------------------------

    def start_episode(self, msg: dict) -> None:
        name = msg.get("scenario", "known_goal")
        try:
            scenario = load_scenario(name)
        except ScenarioError as e:
            self.error("bad_scenario", str(e))
            return
        method = msg.get("method", scenario.method)
        self.recording_demo = bool(msg.get("record_demo", False))
        if self.recording_demo:
            method = NONE  # demonstrations are pure direct teleoperation
        seed = int(msg.get("seed", scenario.seed))
        intents = scenario.intents
        for intent in self.library:
            if intent.id not in intents.ids:
                intents = intents.with_intent(intent)
        scenario = replace(scenario, intents=intents, method=method, seed=seed)
        self.scenario = scenario
        self.episode, _ = scenario.build_episode()
        self.held = HumanInput.zero(scenario.world.state_dim)
        self.push(
            {
                "type": "started",
                "config": {
                    "scenario": scenario.name,
                    "method": method,
                    "seed": seed,
                    "record_demo": self.recording_demo,
                    "world": scenario.world.to_json(),
                    "intents": scenario.intents.to_json(),
                    "epsilon": scenario.acfg.epsilon,
                    "start": [float(v) for v in scenario.start.x],
                    "reference": [
                        [float(v) for v in row]
                        for row in (
                            scenario.resolve_reference().states
                            if scenario.resolve_reference() is not None
                            else []
                        )
                    ],
                },
            }
        )

    def set_input(self, msg: dict) -> None:
        if self.episode is None:
            self.error("no_episode", "send start first")
            return
        a = msg.get("a")
        k = self.episode.world.state_dim
        try:
            arr = np.asarray(a, dtype=float)
            if arr.shape != (k,):
                raise ValueError(f"expected {k} axes")
            self.held = HumanInput(arr)
        except (CasaError, TypeError, ValueError) as e:
            self.error("bad_input", str(e))

    def tick_once(self) -> None:
        """Advance the episode one tick; queue state/inference messages."""
        ep = self.episode
        if ep is None or ep.terminated or ep.tick >= self.scenario.n_ticks:
            return
        _, result = ep.step(self.held)
        rec = ep.tick_log[-1]
        self.push(
            {
                "type": "state",
                "tick": ep.tick,
                "x": [float(v) for v in ep.state.x],
                "alpha": rec["alpha"],
                "u": rec["u"],
            },
            droppable=True,
        )
        if result is not None:
            self.push(
                {
                    "type": "inference",
                    "tick": result.tick,
                    "betas": result.betas,
                    "posterior": result.posterior,
                    "theta_star": result.theta_star,
                    "alphas": result.alphas,
                    "misspecified": detect_misspecification(
                        result.betas, self.scenario.acfg.epsilon
                    ),
                    "epsilon": self.scenario.acfg.epsilon,
                }
            )

    def finish_demo(self) -> None:
        if self.episode is None or not self.recording_demo:
            self.error("no_episode", "not recording a demonstration")
            return
        self._demo_counter += 1
        demo_id = f"demo-{self._demo_counter}"
        self.demos[demo_id] = self.episode.history
        length = self.episode.tick
        self.episode.finish()
        self.recording_demo = False
        self.push({"type": "demo_saved", "id": demo_id, "length": length})

    def stop(self) -> None:
        if self.episode is not None and not self.episode.terminated:
            self.episode.finish()
        self.push({"type": "stopped", "tick": None if self.episode is None else self.episode.tick})


def create_app(tick_mode: str = "realtime", ui_dir: str | None = None) -> FastAPI:
    if tick_mode not in ("realtime", "manual"):
        raise ValueError("tick_mode must be 'realtime' or 'manual'")
    app = FastAPI(title="casa teleoperation service")
    counter = {"n": 0}

    async def _sender(ws: WebSocket, session: Session):
        while True:
            await session.outbox.event.wait()
            for msg in session.outbox.pop_all():
                await ws.send_json(msg)

    async def _ticker(ws: WebSocket, session: Session):
        while True:
            if session.episode is not None and not session.episode.terminated:
                rate = session.episode.world.tick_rate
                session.tick_once()
                await asyncio.sleep(1.0 / rate)
            else:
                await asyncio.sleep(0.02)

    async def _start_irl(session: Session, msg: dict) -> None:
        if session.irl_task is not None and not session.irl_task.done():
            session.error("busy", "an IRL job is already running")
            return
        ids = msg.get("demo_ids") or list(session.demos.keys())
        missing = [i for i in ids if i not in session.demos]
        if missing:
            session.error("no_demos", f"unknown demo ids {missing}")
            return
        if not ids:
            session.error("no_demos", "record at least one demonstration first")
            return
        raw = dict(msg.get("cfg") or {})
        raw.setdefault("max_iters", 150)
        try:
            cfg = IrlConfig(**raw)
        except (TypeError, ValueError) as e:
            session.error("bad_message", f"bad IRL config: {e}")
            return
        demos = DemoSet(tuple(session.demos[i] for i in ids))
        world = self_world = session.scenario.world
        session._learned_counter += 1
        intent_id = f"learned-{session._learned_counter}"
        session.irl_cancel.clear()
        loop = asyncio.get_running_loop()

        def progress(it: int, gnorm: float) -> None:
            if session.irl_cancel.is_set():
                raise _IrlCancelled()
            loop.call_soon_threadsafe(
                session.push,
                {"type": "irl_progress", "iteration": it, "grad_norm": gnorm},
            )

        async def job():
            try:
                intent = await loop.run_in_executor(
                    None,
                    lambda: learn_intent(
                        demos, cfg, self_world, intent_id=intent_id, progress=progress
                    ),
                )
            except _IrlCancelled:
                session.push({"type": "irl_cancelled"})
                return
            session.library.append(intent)
            session.push({"type": "irl_done", "intent_id": intent.id})

        session.irl_task = asyncio.create_task(job())

    async def handle(session: Session, msg: dict) -> None:
        mtype = msg.get("type")
        if mtype == "start":
            session.start_episode(msg)
        elif mtype == "input":
            session.set_input(msg)
        elif mtype == "finish_demo":
            session.finish_demo()
        elif mtype == "start_irl":
            await _start_irl(session, msg)
        elif mtype == "cancel_irl":
            if session.irl_task is not None and not session.irl_task.done():
                session.irl_cancel.set()
            else:
                session.error("bad_message", "no IRL job to cancel")
        elif mtype == "stop":
            session.stop()
        elif mtype == "advance":
            if tick_mode != "manual":
                session.error("bad_message", "advance is only valid in manual-clock mode")
            elif session.episode is None:
                session.error("no_episode", "send start first")
            else:
                for _ in range(int(msg.get("n", 1))):
                    session.tick_once()
        else:
            session.error("bad_message", f"unknown message type {mtype!r}")

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        counter["n"] += 1
        session = Session(f"session-{counter['n']}", tick_mode)
        sender = asyncio.create_task(_sender(ws, session))
        ticker = (
            asyncio.create_task(_ticker(ws, session)) if tick_mode == "realtime" else None
        )
        try:
            while True:
                try:
                    msg = await ws.receive_json()
                except ValueError:
                    session.error("bad_message", "not valid JSON")
                    continue
                if not isinstance(msg, dict):
                    session.error("bad_message", "message must be a JSON object")
                    continue
                try:
                    await handle(session, msg)
                except CasaError as e:
                    session.error("bad_message", str(e))
                except Exception as e:  # session survives internal faults
                    import traceback

                    traceback.print_exc()
                    session.error("internal", f"{type(e).__name__}: {e}")
        except WebSocketDisconnect:
            pass
        finally:
            session.irl_cancel.set()
            sender.cancel()
            if ticker is not None:
                ticker.cancel()

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app

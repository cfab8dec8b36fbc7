import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { UiSessionState, WINDOW_TICKS } from "../src/buffers.js";
import type { InferenceMsg, StateMsg } from "../src/protocol.js";

const here = dirname(fileURLToPath(import.meta.url));
const LOG: Record<string, unknown>[] = JSON.parse(
  readFileSync(join(here, "fixtures", "session_log.json"), "utf-8")
);

describe("session state from a recorded server log", () => {
  it("renders exactly the series the server sent", () => {
    const ui = new UiSessionState();
    for (const msg of LOG) ui.apply(msg);

    const inf = LOG.filter((m) => m.type === "inference") as unknown as InferenceMsg[];
    expect(inf.length).toBeGreaterThan(5);
    const ids = Object.keys(inf[0].betas);
    for (const id of ids) {
      const series = ui.betas.get(id)!;
      expect(series.ticks).toEqual(inf.map((m) => m.tick));
      expect(series.values).toEqual(inf.map((m) => m.betas[id]));
      const post = ui.posterior.get(id)!;
      expect(post.values).toEqual(inf.map((m) => m.posterior[id]));
    }
    for (const method of ["casa", "pba", "belief"]) {
      const series = ui.alphas.get(method)!;
      expect(series.values).toEqual(inf.map((m) => m.alphas[method]));
    }

    const states = LOG.filter((m) => m.type === "state") as unknown as StateMsg[];
    expect(ui.alphaExecuted.values).toEqual(states.map((m) => m.alpha));
    // every rendered path point came from the start state or a state message
    expect(ui.path.length).toBe(states.length + 1);
    expect(ui.path.slice(1)).toEqual(states.map((m) => m.x));
    expect(ui.lastState!.tick).toBe(states.at(-1)!.tick);
  });

  it("shows the arbitration-comparison story: belief authority collapses while confidence authority holds", () => {
    // the fixture is an unknown_goal session: the rendered belief curve must
    // fall toward 0 while the confidence-based curve stays at 1
    const ui = new UiSessionState();
    for (const msg of LOG) ui.apply(msg);
    const casa = ui.alphas.get("casa")!.values;
    const belief = ui.alphas.get("belief")!.values;
    expect(casa.every((v) => v === 1.0)).toBe(true);
    expect(Math.min(...belief)).toBeLessThan(0.1);
    expect(ui.misspecified).toBe(true);
  });

  it("tracks the misspecification flag from the server, not local math", () => {
    const ui = new UiSessionState();
    for (const msg of LOG) ui.apply(msg);
    const last = LOG.filter((m) => m.type === "inference").at(-1) as unknown as InferenceMsg;
    expect(ui.misspecified).toBe(last.misspecified);
  });

  it("bounds the rolling window", () => {
    const ui = new UiSessionState();
    ui.apply(LOG[0]); // started
    for (let t = 0; t < 3 * WINDOW_TICKS; t += 5) {
      ui.apply({
        type: "inference",
        tick: t,
        betas: { g: 1.0 },
        posterior: { g: 1.0 },
        alphas: { casa: 1.0 },
        misspecified: false,
        epsilon: 2,
      });
    }
    const s = ui.betas.get("g")!;
    expect(s.ticks[s.ticks.length - 1] - s.ticks[0]).toBeLessThanOrEqual(WINDOW_TICKS);
  });

  it("records demos and irl status transitions", () => {
    const ui = new UiSessionState();
    ui.apply(LOG[0]);
    ui.apply({ type: "demo_saved", id: "demo-1", length: 40 });
    expect(ui.demos).toEqual([{ id: "demo-1", length: 40 }]);
    ui.apply({ type: "irl_progress", iteration: 3, grad_norm: 0.5 });
    expect(ui.irlStatus).toContain("iter 3");
    ui.apply({ type: "irl_done", intent_id: "learned-1" });
    expect(ui.irlStatus).toContain("learned-1");
  });

  it("resets buffers on a new episode", () => {
    const ui = new UiSessionState();
    for (const msg of LOG) ui.apply(msg);
    expect(ui.betas.size).toBeGreaterThan(0);
    ui.apply(LOG[0]);
    expect(ui.betas.size).toBe(0);
    expect(ui.path.length).toBe(1);
  });
});

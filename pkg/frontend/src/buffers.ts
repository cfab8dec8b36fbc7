// Rolling time-series buffers behind the dashboard charts. Every value comes
// from a server message; the UI never simulates.

import type { InferenceMsg, StartedMsg, StateMsg } from "./protocol.js";

export const WINDOW_TICKS = 600; // last 60 s at 10 ticks/s

export interface Series {
  ticks: number[];
  values: number[];
}

function pushWindowed(s: Series, tick: number, value: number): void {
  s.ticks.push(tick);
  s.values.push(value);
  while (s.ticks.length > 0 && s.ticks[s.ticks.length - 1] - s.ticks[0] > WINDOW_TICKS) {
    s.ticks.shift();
    s.values.shift();
  }
}

export class UiSessionState {
  connected = false;
  config: StartedMsg["config"] | null = null;
  lastState: StateMsg | null = null;
  lastInference: InferenceMsg | null = null;
  misspecified = false;
  path: number[][] = [];
  betas = new Map<string, Series>();
  posterior = new Map<string, Series>();
  alphas = new Map<string, Series>();
  alphaExecuted: Series = { ticks: [], values: [] };
  demos: { id: string; length: number }[] = [];
  irlStatus = "";

  get thetaStar(): string | null {
    return this.lastInference ? this.lastInference.theta_star : null;
  }

  reset(config: StartedMsg["config"]): void {
    this.config = config;
    this.lastState = null;
    this.lastInference = null;
    this.misspecified = false;
    this.path = [config.start.slice()];
    this.betas.clear();
    this.posterior.clear();
    this.alphas.clear();
    this.alphaExecuted = { ticks: [], values: [] };
  }

  private series(map: Map<string, Series>, key: string): Series {
    let s = map.get(key);
    if (!s) {
      s = { ticks: [], values: [] };
      map.set(key, s);
    }
    return s;
  }

  /** Route one server message into the buffers. Returns false if unhandled. */
  apply(msg: Record<string, unknown>): boolean {
    switch (msg.type) {
      case "started":
        this.reset((msg as unknown as StartedMsg).config);
        return true;
      case "state": {
        const m = msg as unknown as StateMsg;
        this.lastState = m;
        this.path.push(m.x.slice());
        pushWindowed(this.alphaExecuted, m.tick, m.alpha);
        return true;
      }
      case "inference": {
        const m = msg as unknown as InferenceMsg;
        this.lastInference = m;
        this.misspecified = m.misspecified;
        for (const [id, v] of Object.entries(m.betas)) {
          pushWindowed(this.series(this.betas, id), m.tick, v);
        }
        for (const [id, v] of Object.entries(m.posterior)) {
          pushWindowed(this.series(this.posterior, id), m.tick, v);
        }
        for (const [method, v] of Object.entries(m.alphas)) {
          pushWindowed(this.series(this.alphas, method), m.tick, v);
        }
        return true;
      }
      case "demo_saved": {
        const m = msg as { id: string; length: number };
        this.demos.push({ id: m.id, length: m.length });
        this.irlStatus = "";
        return true;
      }
      case "irl_progress": {
        const m = msg as { iteration: number; grad_norm: number };
        this.irlStatus = `learning: iter ${m.iteration}, |grad| ${m.grad_norm.toFixed(3)}`;
        return true;
      }
      case "irl_done": {
        const m = msg as { intent_id: string };
        this.irlStatus = `learned ${m.intent_id} (applies next episode)`;
        return true;
      }
      case "irl_cancelled":
        this.irlStatus = "learning cancelled";
        return true;
      case "stopped":
        return true;
      default:
        return false;
    }
  }
}

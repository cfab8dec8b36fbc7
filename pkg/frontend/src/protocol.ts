// Wire protocol: JSON text messages over one WebSocket.

export interface StartMsg {
  type: "start";
  scenario: string;
  method?: string;
  seed?: number;
  record_demo?: boolean;
}

export interface InputMsg {
  type: "input";
  a: number[];
}

export interface WorldConfigJson {
  state_dim: number;
  workspace_bounds: number[][];
  max_speed: number;
  tick_rate: number;
  inference_period_ticks: number;
  planning_horizon: number;
}

export interface IntentJson {
  id: string;
  kind: "goal" | "learned";
  goal?: number[];
  phi?: number[];
}

export interface StartedMsg {
  type: "started";
  config: {
    scenario: string;
    method: string;
    seed: number;
    record_demo: boolean;
    world: WorldConfigJson;
    intents: IntentJson[];
    epsilon: number;
    start: number[];
    reference: number[][];
  };
}

export interface StateMsg {
  type: "state";
  tick: number;
  x: number[];
  alpha: number;
  u: number[];
}

export interface InferenceMsg {
  type: "inference";
  tick: number;
  betas: Record<string, number>;
  posterior: Record<string, number>;
  theta_star: string;
  alphas: Record<string, number>;
  misspecified: boolean;
  epsilon: number;
}

export interface DemoSavedMsg {
  type: "demo_saved";
  id: string;
  length: number;
}

export interface IrlProgressMsg {
  type: "irl_progress";
  iteration: number;
  grad_norm: number;
}

export interface IrlDoneMsg {
  type: "irl_done";
  intent_id: string;
}

export interface ErrorMsg {
  type: "error";
  code: string;
  detail: string;
}

export type ServerMsg =
  | StartedMsg
  | StateMsg
  | InferenceMsg
  | DemoSavedMsg
  | IrlProgressMsg
  | IrlDoneMsg
  | { type: "irl_cancelled" }
  | { type: "stopped"; tick: number | null }
  | ErrorMsg;

export type ClientMsg =
  | StartMsg
  | InputMsg
  | { type: "finish_demo" }
  | { type: "start_irl"; demo_ids: string[]; cfg?: Record<string, number> }
  | { type: "cancel_irl" }
  | { type: "stop" };

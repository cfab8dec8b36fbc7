import { UiSessionState } from "./buffers.js";
import { drawChart } from "./charts.js";
import { ServiceClient } from "./client.js";
import { InputPump, KEEPALIVE_MS } from "./keyboard.js";
import { drawWorkspace } from "./workspace.js";

const $ = (id: string) => document.getElementById(id)!;

const ui = new UiSessionState();
const wsUrl = `ws://${location.host}/ws`;
const client = new ServiceClient(wsUrl);
const pump = new InputPump((a) => client.send({ type: "input", a }));
const log: unknown[] = [];

client.onstatus = (up) => {
  ui.connected = up;
  $("status").textContent = up ? "connected" : "reconnecting...";
  $("status").className = up ? "ok" : "bad";
  if (!up) pump.releaseAll(performance.now());
};

client.onmessage = (msg) => {
  log.push(msg);
  if (!ui.apply(msg as unknown as Record<string, unknown>)) return;
  if (msg.type === "error") {
    $("errors").textContent = `${msg.code}: ${msg.detail}`;
  }
  if (msg.type === "demo_saved") renderDemos();
  if (msg.type === "started") {
    $("errors").textContent = "";
    renderDemos();
  }
};

function renderDemos(): void {
  $("demos").textContent = ui.demos.length
    ? ui.demos.map((d) => `${d.id} (${d.length} ticks)`).join(", ")
    : "none";
}

function render(): void {
  drawWorkspace($("workspace") as HTMLCanvasElement, ui);
  const eps = ui.config ? ui.config.epsilon : undefined;
  drawChart($("chart-betas") as HTMLCanvasElement, ui.betas, {
    title: "confidence per intent",
    yMin: 0,
    threshold: eps,
  });
  drawChart($("chart-posterior") as HTMLCanvasElement, ui.posterior, {
    title: "posterior per intent",
    yMin: 0,
    yMax: 1,
  });
  drawChart($("chart-alphas") as HTMLCanvasElement, ui.alphas, {
    title: "human authority per method",
    yMin: 0,
    yMax: 1,
  });
  $("banner").style.display = ui.misspecified ? "block" : "none";
  $("irl-status").textContent = ui.irlStatus;
  if (ui.lastState) {
    $("readout").textContent =
      `tick ${ui.lastState.tick}  x=[${ui.lastState.x.map((v) => v.toFixed(2)).join(", ")}]` +
      `  alpha=${ui.lastState.alpha.toFixed(2)}` +
      (ui.thetaStar ? `  theta*=${ui.thetaStar}` : "");
  }
  requestAnimationFrame(render);
}

window.addEventListener("keydown", (e) => {
  if ((e.target as HTMLElement).tagName === "SELECT") return;
  if (e.code in { ArrowRight: 1, ArrowLeft: 1, ArrowUp: 1, ArrowDown: 1 }) e.preventDefault();
  pump.keyDown(e.code, e.repeat, performance.now());
});
window.addEventListener("keyup", (e) => pump.keyUp(e.code, performance.now()));
window.addEventListener("blur", () => pump.releaseAll(performance.now()));
setInterval(() => pump.tick(performance.now()), KEEPALIVE_MS / 2);

$("start").addEventListener("click", () => {
  client.send({
    type: "start",
    scenario: ($("scenario") as HTMLSelectElement).value,
    method: ($("method") as HTMLSelectElement).value,
    seed: 0,
  });
});
$("record").addEventListener("click", () => {
  client.send({
    type: "start",
    scenario: ($("scenario") as HTMLSelectElement).value,
    record_demo: true,
  });
});
$("finish-demo").addEventListener("click", () => client.send({ type: "finish_demo" }));
$("learn").addEventListener("click", () => {
  client.send({
    type: "start_irl",
    demo_ids: ui.demos.map((d) => d.id),
    cfg: { max_iters: 80, noise_scale: 0.005, seed: 2 },
  });
});
$("stop").addEventListener("click", () => client.send({ type: "stop" }));
$("download").addEventListener("click", () => {
  const blob = new Blob([log.map((m) => JSON.stringify(m)).join("\n")], {
    type: "application/jsonl",
  });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "session-log.jsonl";
  a.click();
});

client.connect();
requestAnimationFrame(render);

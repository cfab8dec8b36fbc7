// Top-down workspace view: robot, goals, reference and executed paths.

import type { UiSessionState } from "./buffers.js";

export function drawWorkspace(canvas: HTMLCanvasElement, ui: UiSessionState): void {
  const ctx = canvas.getContext("2d");
  if (!ctx || !ui.config) return;
  const { width: w, height: h } = canvas;
  const [bx, by] = ui.config.world.workspace_bounds;
  const sx = (x: number) => ((x - bx[0]) / (bx[1] - bx[0])) * (w - 20) + 10;
  const sy = (y: number) => h - (((y - by[0]) / (by[1] - by[0])) * (h - 20) + 10);

  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#fafafa";
  ctx.fillRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(sx(bx[0]), sy(by[1]), sx(bx[1]) - sx(bx[0]), sy(by[0]) - sy(by[1]));

  if (ui.config.reference.length > 1) {
    ctx.strokeStyle = "#ccc";
    ctx.setLineDash([5, 4]);
    ctx.beginPath();
    ui.config.reference.forEach(([x, y], i) =>
      i === 0 ? ctx.moveTo(sx(x), sy(y)) : ctx.lineTo(sx(x), sy(y))
    );
    ctx.stroke();
    ctx.setLineDash([]);
  }

  ctx.strokeStyle = "#2a9d8f";
  ctx.beginPath();
  ui.path.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(sx(x), sy(y)) : ctx.lineTo(sx(x), sy(y))));
  ctx.stroke();

  const colors: Record<string, string> = { green: "#2a9d8f", purple: "#9b5de5" };
  for (const intent of ui.config.intents) {
    if (!intent.goal) continue;
    const [x, y] = intent.goal;
    ctx.fillStyle = colors[intent.id] ?? "#e07a5f";
    ctx.beginPath();
    ctx.arc(sx(x), sy(y), 7, 0, 2 * Math.PI);
    ctx.fill();
    if (ui.thetaStar === intent.id) {
      ctx.strokeStyle = "#333";
      ctx.stroke();
    }
    ctx.fillStyle = "#333";
    ctx.font = "11px sans-serif";
    ctx.fillText(intent.id, sx(x) + 9, sy(y) - 6);
  }

  const pos = ui.lastState ? ui.lastState.x : ui.config.start;
  ctx.fillStyle = "#1d3557";
  ctx.beginPath();
  ctx.arc(sx(pos[0]), sy(pos[1]), 6, 0, 2 * Math.PI);
  ctx.fill();
}

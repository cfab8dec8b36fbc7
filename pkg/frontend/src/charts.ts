// Minimal canvas line charts; no dependencies.

import type { Series } from "./buffers.js";

const COLORS = ["#2a9d8f", "#9b5de5", "#e76f51", "#457b9d", "#f4a261", "#2b2d42"];

export interface ChartOpts {
  title: string;
  yMin?: number;
  yMax?: number;
  threshold?: number; // horizontal marker, e.g. the misspecification epsilon
}

export function drawChart(
  canvas: HTMLCanvasElement,
  lines: Map<string, Series>,
  opts: ChartOpts
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  ctx.fillStyle = "#fff";
  ctx.fillRect(0, 0, w, h);
  ctx.fillStyle = "#333";
  ctx.font = "11px sans-serif";
  ctx.fillText(opts.title, 6, 12);

  let tickLo = Infinity;
  let tickHi = -Infinity;
  let yLo = opts.yMin ?? Infinity;
  let yHi = opts.yMax ?? -Infinity;
  for (const s of lines.values()) {
    for (let i = 0; i < s.ticks.length; i++) {
      tickLo = Math.min(tickLo, s.ticks[i]);
      tickHi = Math.max(tickHi, s.ticks[i]);
      if (opts.yMin === undefined) yLo = Math.min(yLo, s.values[i]);
      if (opts.yMax === undefined) yHi = Math.max(yHi, s.values[i]);
    }
  }
  if (!isFinite(tickLo) || tickHi === tickLo) return;
  if (yHi === yLo) yHi = yLo + 1;
  const pad = 16;
  const sx = (t: number) => pad + ((t - tickLo) / (tickHi - tickLo)) * (w - 2 * pad);
  const sy = (v: number) => h - pad - ((v - yLo) / (yHi - yLo)) * (h - 2 * pad - 8);

  if (opts.threshold !== undefined && opts.threshold >= yLo && opts.threshold <= yHi) {
    ctx.strokeStyle = "#bbb";
    ctx.setLineDash([4, 3]);
    ctx.beginPath();
    ctx.moveTo(pad, sy(opts.threshold));
    ctx.lineTo(w - pad, sy(opts.threshold));
    ctx.stroke();
    ctx.setLineDash([]);
  }

  let ci = 0;
  for (const [name, s] of lines) {
    ctx.strokeStyle = COLORS[ci % COLORS.length];
    ctx.beginPath();
    for (let i = 0; i < s.ticks.length; i++) {
      const x = sx(s.ticks[i]);
      const y = sy(s.values[i]);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    }
    ctx.stroke();
    ctx.fillStyle = COLORS[ci % COLORS.length];
    ctx.fillText(name, w - pad - 70, 14 + 12 * ci);
    ci += 1;
  }
}

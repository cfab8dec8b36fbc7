// Thin WebSocket wrapper; reconnects with backoff, preserves buffers.

import type { ClientMsg, ServerMsg } from "./protocol.js";

type WsLike = {
  send(data: string): void;
  close(): void;
  readyState: number;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
};

export class ServiceClient {
  private ws: WsLike | null = null;
  private backoff = 500;
  onmessage: (msg: ServerMsg) => void = () => {};
  onstatus: (connected: boolean) => void = () => {};

  constructor(
    private url: string,
    private factory: (url: string) => WsLike = (u) => new WebSocket(u) as unknown as WsLike
  ) {}

  connect(): void {
    const ws = this.factory(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.backoff = 500;
      this.onstatus(true);
    };
    ws.onclose = () => {
      this.onstatus(false);
      setTimeout(() => this.connect(), this.backoff);
      this.backoff = Math.min(this.backoff * 2, 10_000);
    };
    ws.onmessage = (ev) => {
      this.onmessage(JSON.parse(String(ev.data)) as ServerMsg);
    };
  }

  send(msg: ClientMsg): void {
    if (this.ws && this.ws.readyState === 1) {
      this.ws.send(JSON.stringify(msg));
    }
  }

  close(): void {
    if (this.ws) {
      this.ws.onclose = null;
      this.ws.close();
    }
  }
}

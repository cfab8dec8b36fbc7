// Keyboard to axis-level mapping: 2k keys, +-1 per axis, opposing keys
// cancel. Emits an input message on every change and a keepalive every
// 100 ms while any key is held; silence otherwise.

export const KEY_AXES: Record<string, [number, number]> = {
  ArrowRight: [0, 1],
  ArrowLeft: [0, -1],
  ArrowUp: [1, 1],
  ArrowDown: [1, -1],
  KeyD: [0, 1],
  KeyA: [0, -1],
  KeyW: [1, 1],
  KeyS: [1, -1],
};

export const KEEPALIVE_MS = 100;

export function axesFromKeys(pressed: Set<string>, k = 2): number[] {
  const a = new Array(k).fill(0);
  for (const code of pressed) {
    const m = KEY_AXES[code];
    if (m && m[0] < k) a[m[0]] += m[1];
  }
  return a.map((v) => Math.max(-1, Math.min(1, v)));
}

export class InputPump {
  private pressed = new Set<string>();
  private lastSent: number[] | null = null;
  private lastSentAt = -Infinity;

  constructor(private emit: (a: number[]) => void, private k = 2) {}

  keyDown(code: string, repeat = false, now = 0): void {
    if (!(code in KEY_AXES) || repeat) return; // key-repeat is idempotent
    if (this.pressed.has(code)) return;
    this.pressed.add(code);
    this.maybeEmit(now);
  }

  keyUp(code: string, now = 0): void {
    if (!this.pressed.delete(code)) return;
    this.maybeEmit(now);
  }

  releaseAll(now = 0): void {
    if (this.pressed.size === 0) return;
    this.pressed.clear();
    this.maybeEmit(now);
  }

  get axes(): number[] {
    return axesFromKeys(this.pressed, this.k);
  }

  get anyHeld(): boolean {
    return this.pressed.size > 0;
  }

  /** Called on key events and on a timer; decides whether to send. */
  tick(now: number): void {
    if (this.anyHeld && now - this.lastSentAt >= KEEPALIVE_MS) {
      this.send(this.axes, now);
    }
  }

  private maybeEmit(now: number): void {
    const a = this.axes;
    if (this.lastSent === null || !sameVec(a, this.lastSent)) {
      this.send(a, now);
    }
  }

  private send(a: number[], now: number): void {
    this.lastSent = a;
    this.lastSentAt = now;
    this.emit(a);
  }
}

function sameVec(a: number[], b: number[]): boolean {
  return a.length === b.length && a.every((v, i) => v === b[i]);
}

/** Tiny software raster: RGBA pixels with rectangle, line, and circle fills. */

export type Color = readonly [number, number, number, number];

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number, background: Color = [255, 255, 255, 255]) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 4);
    this.fill(background);
  }

  fill(color: Color): void {
    for (let i = 0; i < this.width * this.height; i++) {
      this.data.set(color, i * 4);
    }
  }

  set(x: number, y: number, color: Color): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    this.data.set(color, (y * this.width + x) * 4);
  }

  get(x: number, y: number): Color {
    const i = (y * this.width + x) * 4;
    return [this.data[i], this.data[i + 1], this.data[i + 2], this.data[i + 3]];
  }

  fillRect(x0: number, y0: number, w: number, h: number, color: Color): void {
    for (let y = y0; y < y0 + h; y++) {
      for (let x = x0; x < x0 + w; x++) {
        this.set(x, y, color);
      }
    }
  }

  /** Bresenham segment, endpoints included. */
  drawLine(x0: number, y0: number, x1: number, y1: number, color: Color): void {
    let [x, y] = [Math.round(x0), Math.round(y0)];
    const [ex, ey] = [Math.round(x1), Math.round(y1)];
    const dx = Math.abs(ex - x);
    const dy = -Math.abs(ey - y);
    const sx = x < ex ? 1 : -1;
    const sy = y < ey ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(x, y, color);
      if (x === ex && y === ey) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
    }
  }

  drawCircle(cx: number, cy: number, radius: number, color: Color): void {
    const steps = Math.max(64, Math.ceil(2 * Math.PI * radius));
    for (let i = 0; i < steps; i++) {
      const a = (2 * Math.PI * i) / steps;
      this.set(Math.round(cx + radius * Math.cos(a)),
               Math.round(cy + radius * Math.sin(a)), color);
    }
  }

  fillDisk(cx: number, cy: number, radius: number, color: Color): void {
    for (let y = Math.floor(cy - radius); y <= Math.ceil(cy + radius); y++) {
      for (let x = Math.floor(cx - radius); x <= Math.ceil(cx + radius); x++) {
        if ((x - cx) ** 2 + (y - cy) ** 2 <= radius * radius) {
          this.set(x, y, color);
        }
      }
    }
  }

  countColor(color: Color): number {
    let count = 0;
    for (let i = 0; i < this.width * this.height; i++) {
      const o = i * 4;
      if (this.data[o] === color[0] && this.data[o + 1] === color[1] &&
          this.data[o + 2] === color[2] && this.data[o + 3] === color[3]) {
        count++;
      }
    }
    return count;
  }
}

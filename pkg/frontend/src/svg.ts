/** Minimal SVG chart canvas: enough axes, polylines, bars and text for the
 * three plot kinds, with no DOM or rendering dependencies. */

export interface Extent {
  min: number;
  max: number;
}

export type AxisScale = "linear" | "log";

const WIDTH = 680;
const HEIGHT = 460;
const MARGIN = { left: 74, right: 24, top: 48, bottom: 56 };

export class Chart {
  private parts: string[] = [];
  private xEx: Extent;
  private yEx: Extent;

  constructor(
    xExtent: Extent,
    yExtent: Extent,
    private xScale: AxisScale = "linear",
    private yScale: AxisScale = "linear",
  ) {
    this.xEx = padExtent(xExtent, xScale);
    this.yEx = padExtent(yExtent, yScale);
  }

  private tx(v: number): number {
    return MARGIN.left + frac(v, this.xEx, this.xScale) * (WIDTH - MARGIN.left - MARGIN.right);
  }

  private ty(v: number): number {
    return HEIGHT - MARGIN.bottom - frac(v, this.yEx, this.yScale) * (HEIGHT - MARGIN.top - MARGIN.bottom);
  }

  polyline(xs: number[], ys: number[], color: string, dash = ""): void {
    const pts = xs
      .map((x, i) => `${this.tx(x).toFixed(2)},${this.ty(ys[i]).toFixed(2)}`)
      .join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline fill="none" stroke="${color}" stroke-width="1.6"${dashAttr} points="${pts}"/>`,
    );
  }

  circles(xs: number[], ys: number[], color: string): void {
    for (let i = 0; i < xs.length; i++) {
      this.parts.push(
        `<circle cx="${this.tx(xs[i]).toFixed(2)}" cy="${this.ty(ys[i]).toFixed(2)}" r="3" fill="${color}"/>`,
      );
    }
  }

  vline(x: number, color: string, label: string): void {
    if (x < this.xEx.min || x > this.xEx.max) return;
    const px = this.tx(x).toFixed(2);
    this.parts.push(
      `<line x1="${px}" y1="${MARGIN.top}" x2="${px}" y2="${HEIGHT - MARGIN.bottom}" ` +
        `stroke="${color}" stroke-dasharray="3,3"/>`,
    );
    this.parts.push(
      `<text x="${px}" y="${MARGIN.top - 6}" font-size="11" fill="${color}" text-anchor="middle">${esc(label)}</text>`,
    );
  }

  bar(x0: number, x1: number, height: number, color: string): void {
    const left = this.tx(x0);
    const right = this.tx(x1);
    const top = this.ty(height);
    const bottom = this.ty(this.yEx.min);
    this.parts.push(
      `<rect x="${left.toFixed(2)}" y="${top.toFixed(2)}" width="${(right - left).toFixed(2)}" ` +
        `height="${(bottom - top).toFixed(2)}" fill="${color}" stroke="white" stroke-width="0.5"/>`,
    );
  }

  legend(entries: Array<{ label: string; color: string }>): void {
    entries.forEach((e, i) => {
      const y = MARGIN.top + 16 + 16 * i;
      const x = WIDTH - MARGIN.right - 180;
      this.parts.push(`<line x1="${x}" y1="${y - 4}" x2="${x + 22}" y2="${y - 4}" stroke="${e.color}" stroke-width="2"/>`);
      this.parts.push(`<text x="${x + 28}" y="${y}" font-size="11">${esc(e.label)}</text>`);
    });
  }

  render(title: string, xLabel: string, yLabel: string, caption: string): string {
    const axes = this.axes(xLabel, yLabel);
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      `<text x="${WIDTH / 2}" y="20" font-size="14" text-anchor="middle">${esc(title)}</text>`,
      `<text x="${WIDTH / 2}" y="36" font-size="11" fill="#444" text-anchor="middle" id="caption">${esc(caption)}</text>`,
      axes,
      ...this.parts,
      `</svg>`,
      ``,
    ].join("\n");
  }

  private axes(xLabel: string, yLabel: string): string {
    const out: string[] = [];
    const x0 = MARGIN.left;
    const x1 = WIDTH - MARGIN.right;
    const y0 = HEIGHT - MARGIN.bottom;
    const y1 = MARGIN.top;
    out.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`);
    out.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`);
    for (const v of ticks(this.xEx, this.xScale)) {
      const px = this.tx(v).toFixed(2);
      out.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 4}" stroke="black"/>`);
      out.push(`<text x="${px}" y="${y0 + 18}" font-size="10" text-anchor="middle">${fmt(v)}</text>`);
    }
    for (const v of ticks(this.yEx, this.yScale)) {
      const py = this.ty(v).toFixed(2);
      out.push(`<line x1="${x0 - 4}" y1="${py}" x2="${x0}" y2="${py}" stroke="black"/>`);
      out.push(`<text x="${x0 - 8}" y="${py}" font-size="10" text-anchor="end" dominant-baseline="middle">${fmt(v)}</text>`);
    }
    out.push(
      `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 14}" font-size="12" text-anchor="middle">${esc(xLabel)}</text>`,
    );
    out.push(
      `<text x="18" y="${(y0 + y1) / 2}" font-size="12" text-anchor="middle" transform="rotate(-90 18 ${(y0 + y1) / 2})">${esc(yLabel)}</text>`,
    );
    return out.join("\n");
  }
}

function frac(v: number, ex: Extent, scale: AxisScale): number {
  if (scale === "log") {
    const lv = Math.log10(Math.max(v, Number.MIN_VALUE));
    const lo = Math.log10(ex.min);
    const hi = Math.log10(ex.max);
    return (lv - lo) / (hi - lo);
  }
  return (v - ex.min) / (ex.max - ex.min);
}

function padExtent(ex: Extent, scale: AxisScale): Extent {
  let { min, max } = ex;
  if (scale === "log") {
    min = Math.max(min, 1e-300);
    max = Math.max(max, min * 10);
    return { min: min / 1.5, max: max * 1.5 };
  }
  if (min === max) {
    min -= 0.5;
    max += 0.5;
  }
  const pad = 0.05 * (max - min);
  return { min: min - pad, max: max + pad };
}

function ticks(ex: Extent, scale: AxisScale): number[] {
  if (scale === "log") {
    const lo = Math.ceil(Math.log10(ex.min));
    const hi = Math.floor(Math.log10(ex.max));
    const out: number[] = [];
    const step = Math.max(1, Math.ceil((hi - lo) / 8));
    for (let e = lo; e <= hi; e += step) out.push(10 ** e);
    return out.length >= 2 ? out : [ex.min, ex.max];
  }
  const out: number[] = [];
  for (let i = 0; i <= 5; i++) out.push(ex.min + ((ex.max - ex.min) * i) / 5);
  return out;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0);
  return Number(v.toPrecision(3)).toString();
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

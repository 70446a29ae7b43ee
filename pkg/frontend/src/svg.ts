/** Deterministic SVG assembly: fixed float formatting, no timestamps. */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { left: 64, right: 20, top: 34, bottom: 74 };

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const s = x.toFixed(3);
  return s === "-0.000" ? "0.000" : s;
}

export function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface Scale {
  (x: number): number;
  lo: number;
  hi: number;
}

export function linearScale(lo: number, hi: number, a: number, b: number): Scale {
  const span = hi - lo || 1;
  const f = ((x: number) => a + ((x - lo) / span) * (b - a)) as Scale;
  f.lo = lo;
  f.hi = hi;
  return f;
}

export function ticks(lo: number, hi: number, n = 5): number[] {
  if (hi === lo) return [lo];
  const out: number[] = [];
  for (let k = 0; k <= n; k++) out.push(lo + ((hi - lo) * k) / n);
  return out;
}

export function tickLabel(x: number): string {
  if (x === 0) return "0";
  const ax = Math.abs(x);
  if (ax >= 1e4 || ax < 1e-3) return x.toExponential(2);
  return x.toPrecision(4);
}

export class Svg {
  private parts: string[] = [];

  constructor(title: string) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" ` +
      `height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" ` +
      `font-family="Helvetica, Arial, sans-serif">`);
    this.parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
    this.text(WIDTH / 2, 20, escapeText(title), 14, "middle", "#111");
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string,
       width = 1): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" ` +
      `y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"/>`);
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5): void {
    const path = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${path}" fill="none" stroke="${stroke}" ` +
      `stroke-width="${width}"/>`);
  }

  polygon(points: Array<[number, number]>, fill: string, stroke = "none"): void {
    const path = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polygon points="${path}" fill="${fill}" stroke="${stroke}" ` +
      `stroke-width="0.5"/>`);
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.parts.push(
      `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${fmt(r)}" fill="${fill}"/>`);
  }

  text(x: number, y: number, content: string, size = 11,
       anchor: "start" | "middle" | "end" = "start", fill = "#333"): void {
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" ` +
      `text-anchor="${anchor}" fill="${fill}">${content}</text>`);
  }

  axes(sx: Scale, sy: Scale, xLabel: string, yLabel: string,
       xTickLabel: (v: number) => string = tickLabel,
       yTickLabel: (v: number) => string = tickLabel): void {
    const x0 = MARGIN.left;
    const x1 = WIDTH - MARGIN.right;
    const y0 = HEIGHT - MARGIN.bottom;
    const y1 = MARGIN.top;
    this.line(x0, y0, x1, y0, "#222");
    this.line(x0, y0, x0, y1, "#222");
    for (const t of ticks(sx.lo, sx.hi)) {
      const px = sx(t);
      this.line(px, y0, px, y0 + 4, "#222");
      this.text(px, y0 + 17, escapeText(xTickLabel(t)), 10, "middle");
    }
    for (const t of ticks(sy.lo, sy.hi)) {
      const py = sy(t);
      this.line(x0 - 4, py, x0, py, "#222");
      this.text(x0 - 7, py + 3, escapeText(yTickLabel(t)), 10, "end");
    }
    this.text((x0 + x1) / 2, y0 + 34, escapeText(xLabel), 12, "middle");
    this.parts.push(
      `<text x="16" y="${fmt((y0 + y1) / 2)}" font-size="12" ` +
      `text-anchor="middle" fill="#333" transform="rotate(-90 16 ` +
      `${fmt((y0 + y1) / 2)})">${escapeText(yLabel)}</text>`);
  }

  caption(lines: string[]): void {
    const y0 = HEIGHT - MARGIN.bottom + 46;
    lines.forEach((line, k) => {
      this.text(MARGIN.left, y0 + 12 * k, escapeText(line), 9, "start", "#666");
    });
  }

  legend(entries: Array<[string, string]>): void {
    let x = MARGIN.left + 8;
    const y = MARGIN.top + 10;
    for (const [label, color] of entries) {
      this.line(x, y - 3, x + 18, y - 3, color, 2);
      this.text(x + 22, y, escapeText(label), 10);
      x += 30 + 7 * label.length;
    }
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

/**
 * String-built SVG primitives with fixed numeric formatting, so identical
 * inputs always produce identical bytes.
 */

export function fmt(x: number): string {
  // -0.00 and 0.00 must not differ between runs or platforms
  const s = x.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export function rgbStr(c: [number, number, number]): string {
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

/** Linear interpolation between two colors, t clamped to [0, 1]. */
export function lerpColor(
  low: [number, number, number],
  high: [number, number, number],
  t: number
): string {
  const u = Math.max(0, Math.min(1, t));
  const mix = (a: number, b: number) => Math.round(a + (b - a) * u);
  return rgbStr([mix(low[0], high[0]), mix(low[1], high[1]), mix(low[2], high[2])]);
}

export function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

type Attrs = Record<string, string | number>;

export function tag(name: string, attrs: Attrs, body?: string): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : v}"`)
    .join(" ");
  if (body === undefined) return `<${name} ${parts}/>`;
  return `<${name} ${parts}>${body}</${name}>`;
}

export function svgDocument(width: number, height: number, body: string[]): string {
  const head =
    `<svg xmlns="http://www.w3.org/2000/svg" ` +
    `width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`;
  return [head, ...body, "</svg>", ""].join("\n");
}

/** Maps [d0, d1] to [r0, r1]; a degenerate domain pins to the midpoint. */
export function linearScale(d0: number, d1: number, r0: number, r1: number) {
  const span = d1 - d0;
  return (x: number) =>
    span === 0 ? (r0 + r1) / 2 : r0 + ((x - d0) / span) * (r1 - r0);
}

/** Evenly spaced tick values, endpoints included. */
export function ticks(d0: number, d1: number, n: number): number[] {
  const out: number[] = [];
  for (let i = 0; i < n; i++) out.push(d0 + ((d1 - d0) * i) / (n - 1));
  return out;
}

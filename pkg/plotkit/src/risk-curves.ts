import { ResultTable, RiskRow } from "./table.js";
import { Style } from "./style.js";
import {
  escapeText,
  fmt,
  linearScale,
  rgbStr,
  svgDocument,
  tag,
  ticks,
} from "./svg.js";

/**
 * Risk-versus-signal figure: one curve per design mode with its confidence
 * band, markers at the measured points, axes labeled by signal scale and
 * maximum risk.
 */
export function plotRiskCurves(table: ResultTable, style: Style): string {
  if (table.rows.length === 0) {
    throw new Error("risk table is empty");
  }
  const mus = table.rows.map((r) => r.mu);
  const highs = table.rows.map((r) => r.hi);
  const x0 = Math.min(...mus);
  const x1 = Math.max(...mus);
  // risks are probabilities; keep the axis inside [0, 1] but avoid wasting
  // half the panel when everything sits low
  const yMax = Math.min(1, Math.max(0.1, Math.ceil(Math.max(...highs) * 10) / 10));

  const left = style.marginLeft;
  const right = style.width - style.marginRight;
  const top = style.marginTop;
  const bottom = style.height - style.marginBottom;
  const sx = linearScale(x0, x1, left, right);
  const sy = linearScale(0, yMax, bottom, top);

  const body: string[] = [];
  body.push(
    tag("rect", {
      x: 0,
      y: 0,
      width: style.width,
      height: style.height,
      fill: style.background,
    })
  );

  const font = `font-family="${style.fontFamily}" font-size="${style.fontSize}"`;
  for (const t of ticks(x0, x1, style.xTicks)) {
    const x = sx(t);
    body.push(
      tag("line", {
        x1: x, y1: bottom, x2: x, y2: bottom + 4,
        stroke: "#333333", "stroke-width": 1,
      })
    );
    body.push(
      `<text x="${fmt(x)}" y="${fmt(bottom + 16)}" text-anchor="middle" ${font}>` +
        `${escapeText(trimNum(t))}</text>`
    );
  }
  for (const t of ticks(0, yMax, style.yTicks)) {
    const y = sy(t);
    body.push(
      tag("line", {
        x1: left - 4, y1: y, x2: left, y2: y,
        stroke: "#333333", "stroke-width": 1,
      })
    );
    body.push(
      tag("line", {
        x1: left, y1: y, x2: right, y2: y,
        stroke: "#dddddd", "stroke-width": 0.5,
      })
    );
    body.push(
      `<text x="${fmt(left - 8)}" y="${fmt(y + 4)}" text-anchor="end" ${font}>` +
        `${escapeText(trimNum(t))}</text>`
    );
  }
  body.push(
    tag("line", {
      x1: left, y1: bottom, x2: right, y2: bottom,
      stroke: "#333333", "stroke-width": 1,
    })
  );
  body.push(
    tag("line", {
      x1: left, y1: top, x2: left, y2: bottom,
      stroke: "#333333", "stroke-width": 1,
    })
  );
  body.push(
    `<text x="${fmt((left + right) / 2)}" y="${fmt(style.height - 8)}" ` +
      `text-anchor="middle" ${font}>μ</text>`
  );
  body.push(
    `<text x="14" y="${fmt((top + bottom) / 2)}" text-anchor="middle" ${font} ` +
      `transform="rotate(-90 14 ${fmt((top + bottom) / 2)})">maximum risk</text>`
  );

  table.designs.forEach((design, gi) => {
    const rows = table.rows.filter((r) => r.design === design);
    const color = rgbStr(style.curveColors[gi % style.curveColors.length]);
    if (rows.length > 1) {
      body.push(bandPolygon(rows, sx, sy, color, style.bandOpacity));
      const pts = rows
        .map((r) => `${fmt(sx(r.mu))},${fmt(sy(r.maxRisk))}`)
        .join(" ");
      body.push(
        `<polyline class="curve" points="${pts}" fill="none" ` +
          `stroke="${color}" stroke-width="${fmt(style.strokeWidth)}"/>`
      );
    }
    for (const r of rows) {
      body.push(
        tag("circle", {
          class: "marker",
          cx: sx(r.mu),
          cy: sy(r.maxRisk),
          r: style.markerRadius,
          fill: color,
        })
      );
    }
    // legend swatch, stacked from the top right corner
    const ly = top + 10 + gi * (style.fontSize + 6);
    body.push(
      tag("line", {
        x1: right - 90, y1: ly, x2: right - 70, y2: ly,
        stroke: color, "stroke-width": style.strokeWidth,
      })
    );
    body.push(
      `<text x="${fmt(right - 64)}" y="${fmt(ly + 4)}" ${font}>` +
        `${escapeText(design)}</text>`
    );
  });

  return svgDocument(style.width, style.height, body);
}

function bandPolygon(
  rows: RiskRow[],
  sx: (x: number) => number,
  sy: (y: number) => number,
  color: string,
  opacity: number
): string {
  const fwd = rows.map((r) => `${fmt(sx(r.mu))},${fmt(sy(r.lo))}`);
  const back = [...rows].reverse().map((r) => `${fmt(sx(r.mu))},${fmt(sy(r.hi))}`);
  return (
    `<polygon class="band" points="${[...fwd, ...back].join(" ")}" ` +
    `fill="${color}" fill-opacity="${fmt(opacity)}" stroke="none"/>`
  );
}

function trimNum(x: number): string {
  // tick labels: up to 3 decimals with trailing zeros removed
  return parseFloat(x.toFixed(3)).toString();
}

import { AllocationRow, GraphDoc } from "./table.js";
import { Style } from "./style.js";
import { escapeText, fmt, lerpColor, svgDocument, tag } from "./svg.js";

/**
 * Graph figure: vertices on a circle in index order, edges colored by their
 * energy allocation, vertices colored by estimated success probability.
 *
 * Edge colors normalize over the observed energy range (a uniform
 * allocation therefore renders in one color, and zero energy always lands
 * on the low end); vertex colors use the absolute [0, 1] probability scale
 * so figures stay comparable across runs.
 */
export function plotGraphAllocation(
  graph: GraphDoc,
  allocation: AllocationRow[],
  style: Style
): string {
  const edgeEnergy = new Map<number, number>();
  const vertexSuccess = new Map<number, number>();
  for (const row of allocation) {
    if (row.element === "edge") {
      if (row.index >= graph.edges.length) {
        throw new Error(
          `allocation references edge ${row.index} but the graph has ` +
            `${graph.edges.length} edges`
        );
      }
      edgeEnergy.set(row.index, row.value);
    } else {
      if (row.index >= graph.n) {
        throw new Error(
          `allocation references vertex ${row.index} but the graph has ` +
            `${graph.n} vertices`
        );
      }
      vertexSuccess.set(row.index, row.value);
    }
  }
  for (let e = 0; e < graph.edges.length; e++) {
    if (!edgeEnergy.has(e)) throw new Error(`allocation is missing edge ${e}`);
  }

  const cx = style.width / 2;
  const cy = style.height / 2;
  const radius =
    Math.min(
      style.width - style.marginLeft - style.marginRight,
      style.height - style.marginTop - style.marginBottom
    ) /
      2 -
    style.vertexRadius;
  const pos = (v: number): [number, number] => {
    const angle = (2 * Math.PI * v) / graph.n - Math.PI / 2;
    return [cx + radius * Math.cos(angle), cy + radius * Math.sin(angle)];
  };

  const energies = [...edgeEnergy.values()];
  const eLo = Math.min(...energies);
  const eHi = Math.max(...energies);
  const eT = (v: number) => (eHi === eLo ? 0 : (v - eLo) / (eHi - eLo));

  const body: string[] = [];
  body.push(
    tag("rect", {
      x: 0, y: 0, width: style.width, height: style.height,
      fill: style.background,
    })
  );
  graph.edges.forEach(([u, v], e) => {
    const [x1, y1] = pos(u);
    const [x2, y2] = pos(v);
    const color = lerpColor(
      style.edgeColorLow,
      style.edgeColorHigh,
      eT(edgeEnergy.get(e) as number)
    );
    body.push(
      tag("line", {
        class: "edge", x1, y1, x2, y2,
        stroke: color, "stroke-width": style.edgeWidth,
      })
    );
  });
  const font = `font-family="${style.fontFamily}" font-size="${style.fontSize}"`;
  for (let v = 0; v < graph.n; v++) {
    const [x, y] = pos(v);
    const p = vertexSuccess.get(v);
    const fill =
      p === undefined
        ? "#999999"
        : lerpColor(style.vertexColorLow, style.vertexColorHigh, p);
    body.push(
      tag("circle", {
        class: "vertex", cx: x, cy: y, r: style.vertexRadius,
        fill, stroke: "#222222", "stroke-width": 1,
      })
    );
    body.push(
      `<text x="${fmt(x)}" y="${fmt(y + 4)}" text-anchor="middle" ${font} ` +
        `fill="#ffffff">${v}</text>`
    );
  }

  // compact legends: energy range bottom left, success scale bottom right
  const ly = style.height - 12;
  body.push(legendRamp(12, ly, style.edgeColorLow, style.edgeColorHigh));
  body.push(
    `<text x="66" y="${fmt(ly + 4)}" ${font}>energy ` +
      `${escapeText(shortNum(eLo))}..${escapeText(shortNum(eHi))}</text>`
  );
  const rx = style.width - 150;
  body.push(legendRamp(rx, ly, style.vertexColorLow, style.vertexColorHigh));
  body.push(`<text x="${fmt(rx + 54)}" y="${fmt(ly + 4)}" ${font}>success 0..1</text>`);

  return svgDocument(style.width, style.height, body);
}

function legendRamp(
  x: number,
  y: number,
  low: [number, number, number],
  high: [number, number, number]
): string {
  const cells: string[] = [];
  for (let i = 0; i < 6; i++) {
    cells.push(
      tag("rect", {
        x: x + i * 8, y: y - 6, width: 8, height: 10,
        fill: lerpColor(low, high, i / 5),
      })
    );
  }
  return cells.join("\n");
}

function shortNum(x: number): string {
  return parseFloat(x.toPrecision(3)).toString();
}

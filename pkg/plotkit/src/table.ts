import Papa from "papaparse";

/** One row of a risk-curve table (curves.csv or stars_risk.csv). */
export interface RiskRow {
  mu: number;
  design: string;
  maxRisk: number;
  lo: number;
  hi: number;
}

export interface ResultTable {
  rows: RiskRow[];
  /** design labels in first-appearance order */
  designs: string[];
}

/** One row of an allocation file: edge energies and vertex success rates. */
export interface AllocationRow {
  element: "edge" | "vertex";
  index: number;
  value: number;
}

export interface GraphDoc {
  n: number;
  edges: [number, number][];
}

function num(field: string, raw: unknown, where: string): number {
  const v = Number(raw);
  if (raw === undefined || raw === null || raw === "" || !Number.isFinite(v)) {
    throw new Error(`${where}: column ${field} is not a finite number (${raw})`);
  }
  return v;
}

function parseCsv(text: string): Record<string, string>[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new Error(`CSV parse error at row ${e.row}: ${e.message}`);
  }
  return parsed.data;
}

/**
 * Parse a risk table. Accepts both the multi-scale simulation log and the
 * graph-experiment log (its extra min_success column is ignored). Enforces
 * that mu is strictly increasing within each design group, matching how the
 * producer writes the files.
 */
export function parseRiskTable(text: string): ResultTable {
  const records = parseCsv(text);
  if (records.length === 0) {
    throw new Error("risk table is empty");
  }
  const rows: RiskRow[] = records.map((r, i) => {
    if (!r.design) throw new Error(`row ${i}: missing design label`);
    return {
      mu: num("mu", r.mu, `row ${i}`),
      design: r.design,
      maxRisk: num("max_risk", r.max_risk, `row ${i}`),
      lo: num("lo", r.lo, `row ${i}`),
      hi: num("hi", r.hi, `row ${i}`),
    };
  });
  const designs: string[] = [];
  const lastMu = new Map<string, number>();
  for (const row of rows) {
    if (!designs.includes(row.design)) designs.push(row.design);
    const prev = lastMu.get(row.design);
    if (prev !== undefined && row.mu <= prev) {
      throw new Error(
        `mu not strictly increasing within design ${row.design} (${prev} -> ${row.mu})`
      );
    }
    lastMu.set(row.design, row.mu);
  }
  return { rows, designs };
}

export function parseAllocation(text: string): AllocationRow[] {
  const records = parseCsv(text);
  if (records.length === 0) {
    throw new Error("allocation table is empty");
  }
  return records.map((r, i) => {
    if (r.element !== "edge" && r.element !== "vertex") {
      throw new Error(`row ${i}: element must be edge or vertex, got ${r.element}`);
    }
    const index = num("index", r.index, `row ${i}`);
    if (!Number.isInteger(index) || index < 0) {
      throw new Error(`row ${i}: index must be a nonnegative integer`);
    }
    return { element: r.element, index, value: num("value", r.value, `row ${i}`) };
  });
}

export function parseGraph(text: string): GraphDoc {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (e) {
    throw new Error(`graph file is not valid JSON: ${e}`);
  }
  const g = doc as { n?: unknown; edges?: unknown };
  if (typeof g.n !== "number" || !Number.isInteger(g.n) || g.n < 1) {
    throw new Error("graph document needs a positive integer n");
  }
  if (!Array.isArray(g.edges)) {
    throw new Error("graph document needs an edges array");
  }
  const edges = g.edges.map((e, i) => {
    if (!Array.isArray(e) || e.length !== 2) {
      throw new Error(`edge ${i} is not a pair`);
    }
    const [u, v] = [Number(e[0]), Number(e[1])];
    if (!Number.isInteger(u) || !Number.isInteger(v)) {
      throw new Error(`edge ${i} endpoints must be integers`);
    }
    if (u < 0 || v < 0 || u >= (g.n as number) || v >= (g.n as number)) {
      throw new Error(`edge ${i} endpoint outside [0, ${g.n})`);
    }
    return [u, v] as [number, number];
  });
  return { n: g.n, edges };
}

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { parseAllocation, parseGraph, parseRiskTable } from "../src/table.js";

const fixture = (name: string) =>
  readFileSync(new URL(`../fixtures/${name}`, import.meta.url), "utf8");

describe("parseRiskTable", () => {
  it("reads the multi-scale simulation log", () => {
    const t = parseRiskTable(fixture("curves.csv"));
    expect(t.designs).toEqual(["isotropic"]);
    expect(t.rows).toHaveLength(5);
    expect(t.rows[0].mu).toBe(0.5);
    expect(t.rows[0].hi).toBeGreaterThan(t.rows[0].lo);
  });

  it("reads the graph experiment log and keeps design order", () => {
    const t = parseRiskTable(fixture("stars_risk.csv"));
    expect(t.designs).toEqual(["uniform", "optimized"]);
    expect(t.rows).toHaveLength(10);
  });

  it("rejects an empty table", () => {
    expect(() => parseRiskTable("mu,design,max_risk,lo,hi\n")).toThrow(/empty/);
  });

  it("rejects non-finite numbers", () => {
    const bad = "mu,design,max_risk,lo,hi\n1.0,iso,NaN,0.1,0.2\n";
    expect(() => parseRiskTable(bad)).toThrow(/max_risk/);
  });

  it("rejects mu that does not increase within a design group", () => {
    const bad =
      "mu,design,max_risk,lo,hi\n" +
      "1.0,iso,0.5,0.4,0.6\n" +
      "1.0,iso,0.4,0.3,0.5\n";
    expect(() => parseRiskTable(bad)).toThrow(/strictly increasing/);
  });

  it("allows the same mu across different design groups", () => {
    const ok =
      "mu,design,max_risk,lo,hi\n" +
      "1.0,a,0.5,0.4,0.6\n" +
      "1.0,b,0.4,0.3,0.5\n";
    expect(parseRiskTable(ok).designs).toEqual(["a", "b"]);
  });
});

describe("parseAllocation", () => {
  it("reads edge and vertex rows", () => {
    const rows = parseAllocation(fixture("allocation_uniform.csv"));
    expect(rows.filter((r) => r.element === "edge")).toHaveLength(34);
    expect(rows.filter((r) => r.element === "vertex")).toHaveLength(13);
  });

  it("rejects unknown element kinds", () => {
    expect(() =>
      parseAllocation("element,index,value\nface,0,1.0\n")
    ).toThrow(/element/);
  });

  it("rejects fractional indices", () => {
    expect(() =>
      parseAllocation("element,index,value\nedge,0.5,1.0\n")
    ).toThrow(/index/);
  });
});

describe("parseGraph", () => {
  it("reads the committed 13-vertex graph", () => {
    const g = parseGraph(fixture("stars_graph.json"));
    expect(g.n).toBe(13);
    expect(g.edges).toHaveLength(34);
  });

  it("rejects endpoints outside the vertex range", () => {
    expect(() => parseGraph('{"n": 2, "edges": [[0, 2]]}')).toThrow(/outside/);
  });

  it("rejects documents without edges", () => {
    expect(() => parseGraph('{"n": 2}')).toThrow(/edges/);
  });
});

export {
  parseRiskTable,
  parseAllocation,
  parseGraph,
  type ResultTable,
  type RiskRow,
  type AllocationRow,
  type GraphDoc,
} from "./table.js";
export { DEFAULT_STYLE, resolveStyle, StyleSchema, type Style } from "./style.js";
export { plotRiskCurves } from "./risk-curves.js";
export { plotGraphAllocation } from "./graph-allocation.js";
export { render, runCli, type CliArgs } from "./cli.js";

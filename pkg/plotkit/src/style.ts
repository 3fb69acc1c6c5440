import { z } from "zod";

const rgb = z.tuple([
  z.number().int().min(0).max(255),
  z.number().int().min(0).max(255),
  z.number().int().min(0).max(255),
]);

// everything that influences the output lives here, so a figure is a pure
// function of (input files, style)
export const StyleSchema = z
  .object({
    width: z.number().positive(),
    height: z.number().positive(),
    marginLeft: z.number().nonnegative(),
    marginRight: z.number().nonnegative(),
    marginTop: z.number().nonnegative(),
    marginBottom: z.number().nonnegative(),
    background: z.string(),
    fontFamily: z.string(),
    fontSize: z.number().positive(),
    curveColors: z.array(rgb).min(1),
    bandOpacity: z.number().min(0).max(1),
    strokeWidth: z.number().positive(),
    markerRadius: z.number().positive(),
    xTicks: z.number().int().min(2),
    yTicks: z.number().int().min(2),
    edgeColorLow: rgb,
    edgeColorHigh: rgb,
    vertexColorLow: rgb,
    vertexColorHigh: rgb,
    vertexRadius: z.number().positive(),
    edgeWidth: z.number().positive(),
  })
  .strict();

export type Style = z.infer<typeof StyleSchema>;

export const DEFAULT_STYLE: Style = {
  width: 640,
  height: 420,
  marginLeft: 56,
  marginRight: 16,
  marginTop: 16,
  marginBottom: 44,
  background: "#ffffff",
  fontFamily: "sans-serif",
  fontSize: 12,
  curveColors: [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
  ],
  bandOpacity: 0.18,
  strokeWidth: 1.5,
  markerRadius: 3,
  xTicks: 6,
  yTicks: 6,
  edgeColorLow: [216, 220, 228],
  edgeColorHigh: [24, 50, 120],
  vertexColorLow: [202, 46, 36],
  vertexColorHigh: [36, 150, 60],
  vertexRadius: 11,
  edgeWidth: 3,
};

/** Merge a partial override (parsed from --style FILE) into the defaults. */
export function resolveStyle(override?: unknown): Style {
  if (override === undefined) return DEFAULT_STYLE;
  const patch = StyleSchema.partial().strict().parse(override);
  return { ...DEFAULT_STYLE, ...patch };
}

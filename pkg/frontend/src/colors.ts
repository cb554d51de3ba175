/** Color mapping for markers and the top-down terrain grid. */

export const HAZARD_COLORS: Record<string, string> = {
  fire: "#e25822",
  flood: "#1976d2",
  storm: "#5e35b1",
  landslide: "#795548",
  erosion: "#bc8f5f",
  vandalism: "#c2185b",
  other: "#607d8b",
};

export const POI_COLOR = "#f9a825";
export const WATER_COLOR = "#0d47a1";
export const NODATA_COLOR = "#d0d0d0";

export function hazardColor(hazardType: string): string {
  return HAZARD_COLORS[hazardType] ?? HAZARD_COLORS.other;
}

function channel(value: number): string {
  return Math.round(Math.min(255, Math.max(0, value)))
    .toString(16)
    .padStart(2, "0");
}

export function rgb(r: number, g: number, b: number): string {
  return `#${channel(r)}${channel(g)}${channel(b)}`;
}

/**
 * One terrain cell, top-down: elevation sets a sand-to-rock ramp,
 * vegetation coverage pulls it toward green, inundation paints it water
 * blue. elevNorm is the cell's elevation scaled to [0, 1].
 */
export function cellColor(
  elevNorm: number,
  coverage: number,
  inundated: boolean,
  nodata = false,
): string {
  if (nodata) return NODATA_COLOR;
  if (inundated) return WATER_COLOR;
  const t = Math.min(1, Math.max(0, elevNorm));
  const base = { r: 214 - 90 * t, g: 196 - 76 * t, b: 158 - 48 * t };
  const green = { r: 56, g: 142, b: 60 };
  const k = Math.min(1, Math.max(0, coverage));
  return rgb(
    base.r * (1 - k) + green.r * k,
    base.g * (1 - k) + green.g * k,
    base.b * (1 - k) + green.b * k,
  );
}

/**
 * Shareable view state: everything needed to restore the explorer view
 * round-trips through URL query parameters.
 */

export type PanelName = "map" | "simulate" | "gallery" | "chat";
export type SelectedKind = "report" | "poi";

export interface ViewState {
  centerLat: number;
  centerLon: number;
  zoom: number;
  panel: PanelName;
  selectedKind: SelectedKind | null;
  selectedId: string | null;
  waterLevel: number | null; // null = no water (baseline)
  tempDelta: number;
  sessionId: string;
  userId: string;
}

export interface IndicatorRanges {
  minLevel: number;
  maxLevel: number;
  minTemp: number;
  maxTemp: number;
}

const PANELS: PanelName[] = ["map", "simulate", "gallery", "chat"];

function randomId(prefix: string): string {
  const uuid =
    typeof crypto !== "undefined" && "randomUUID" in crypto
      ? crypto.randomUUID()
      : Math.random().toString(36).slice(2) + Date.now().toString(36);
  return `${prefix}-${uuid.slice(0, 13)}`;
}

export function defaultState(): ViewState {
  return {
    centerLat: 45.0712,
    centerLon: 7.6858,
    zoom: 13,
    panel: "map",
    selectedKind: null,
    selectedId: null,
    waterLevel: null,
    tempDelta: 0,
    sessionId: randomId("web"),
    userId: randomId("visitor"),
  };
}

export function stateToParams(state: ViewState): URLSearchParams {
  const params = new URLSearchParams();
  params.set("lat", String(state.centerLat));
  params.set("lon", String(state.centerLon));
  params.set("zoom", String(state.zoom));
  params.set("panel", state.panel);
  if (state.selectedKind && state.selectedId) {
    params.set("sel", `${state.selectedKind}:${state.selectedId}`);
  }
  if (state.waterLevel !== null) {
    params.set("level", String(state.waterLevel));
  }
  params.set("temp", String(state.tempDelta));
  params.set("session", state.sessionId);
  params.set("user", state.userId);
  return params;
}

export function stateFromParams(params: URLSearchParams, base?: ViewState): ViewState {
  const state = base ? { ...base } : defaultState();
  const num = (key: string): number | null => {
    const raw = params.get(key);
    if (raw === null || raw === "") return null;
    const value = Number(raw);
    return Number.isFinite(value) ? value : null;
  };

  state.centerLat = num("lat") ?? state.centerLat;
  state.centerLon = num("lon") ?? state.centerLon;
  state.zoom = num("zoom") ?? state.zoom;
  const panel = params.get("panel");
  if (panel && (PANELS as string[]).includes(panel)) {
    state.panel = panel as PanelName;
  }
  const sel = params.get("sel");
  if (sel && sel.includes(":")) {
    const [kind, ...rest] = sel.split(":");
    if (kind === "report" || kind === "poi") {
      state.selectedKind = kind;
      state.selectedId = rest.join(":");
    }
  }
  state.waterLevel = num("level");
  state.tempDelta = num("temp") ?? state.tempDelta;
  state.sessionId = params.get("session") ?? state.sessionId;
  state.userId = params.get("user") ?? state.userId;
  return state;
}

/** Keep the indicator sliders inside the configured ranges. */
export function clampIndicators(state: ViewState, ranges: IndicatorRanges): ViewState {
  const clamp = (value: number, lo: number, hi: number) => Math.min(hi, Math.max(lo, value));
  return {
    ...state,
    waterLevel:
      state.waterLevel === null
        ? null
        : clamp(state.waterLevel, ranges.minLevel, ranges.maxLevel),
    tempDelta: clamp(state.tempDelta, ranges.minTemp, ranges.maxTemp),
  };
}

/** Radius (m) covered by the viewport at a zoom level, capped for sanity. */
export function radiusForZoom(zoom: number): number {
  const radius = 40_000_000 / Math.pow(2, zoom);
  return Math.max(50, Math.min(radius, 100_000));
}

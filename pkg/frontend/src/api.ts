/**
 * Typed client for the backend JSON API. The explorer never computes
 * scores, flood masks or chat transitions itself: everything it shows
 * comes back from these calls.
 */

export interface LatLon {
  lat: number;
  lon: number;
}

export interface ReportPayload {
  id: string;
  hazard_type: string;
  description: string;
  distance_m: number;
  location: LatLon;
  media: { kind: string; uri: string }[];
  created_at: string;
}

export interface PoiPayload {
  poi_id: string;
  name: string;
  location: LatLon;
  review_count: number;
  mean_sentiment: number;
  importance: number;
  distance_m?: number;
}

export interface TerrainGrid {
  nrows: number;
  ncols: number;
  cell_size: number;
  nodata: number;
  elevations: number[][];
  min_elevation: number;
  max_elevation: number;
}

export interface TerrainPayload {
  use_case: string;
  mesh: { vertices: number[][]; triangles: number[][] };
  baseline: { water_level: number | null; temp_delta: number; veg_base: number[][] };
  grid: TerrainGrid;
  flood_seeds: number[][];
}

export interface ScenarioSummary {
  inundated_cell_count: number;
  inundated_area_m2: number;
  mean_coverage: number;
}

export interface ScenarioPayload {
  mask: boolean[][];
  coverage: number[][];
  summary: ScenarioSummary;
}

export interface GalleryEntry {
  artwork_id: string;
  poi_id: string;
  prompt_text: string;
  image_url: string;
  generated_at: string;
}

export interface ChatMessagePayload {
  session_id: string;
  kind: "text" | "location" | "photo" | "video" | "voice" | "command";
  text?: string;
  location?: LatLon;
  media_uri?: string;
}

export interface BotReplyPayload {
  session_id: string;
  state: string;
  text: string;
  options: string[];
}

export interface ProfilePayload {
  user_id: string;
  points: number;
  level: number;
  event_counts: Record<string, number>;
}

export type EventType =
  | "view_report"
  | "open_poi_overlay"
  | "run_simulation"
  | "view_artwork"
  | "submit_report";

export class ApiError extends Error {
  constructor(readonly status: number, readonly slug: string, detail: string) {
    super(`${slug}: ${detail}`);
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let slug = "http_error";
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { error?: string; detail?: string };
      slug = body.error ?? slug;
      detail = body.detail ?? detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(response.status, slug, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  private simulateAbort: AbortController | null = null;

  constructor(readonly baseUrl: string, public useCase: string) {}

  private url(path: string, params?: Record<string, string | number>): string {
    const u = new URL(path, this.baseUrl);
    if (params) {
      for (const [key, value] of Object.entries(params)) {
        u.searchParams.set(key, String(value));
      }
    }
    return u.toString();
  }

  async health(): Promise<{ status: string; use_cases: string[] }> {
    return parseOrThrow(await fetch(this.url("/health")));
  }

  async reports(lat: number, lon: number, radiusM: number): Promise<ReportPayload[]> {
    return parseOrThrow(
      await fetch(this.url("/onsite/reports", { lat, lon, radius_m: radiusM })),
    );
  }

  async pois(lat: number, lon: number, radiusM: number): Promise<PoiPayload[]> {
    return parseOrThrow(await fetch(this.url("/onsite/pois", { lat, lon, radius_m: radiusM })));
  }

  async terrain(): Promise<TerrainPayload> {
    return parseOrThrow(await fetch(this.url(`/offsite/terrain/${this.useCase}`)));
  }

  /**
   * Run one what-if scenario. A newer call supersedes any in-flight one:
   * the previous request is aborted so stale results can never land on
   * top of fresh sliders.
   */
  async simulate(waterLevel: number | null, tempDelta: number): Promise<ScenarioPayload> {
    this.simulateAbort?.abort();
    const abort = new AbortController();
    this.simulateAbort = abort;
    const response = await fetch(this.url("/offsite/simulate"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        use_case: this.useCase,
        water_level: waterLevel,
        temp_delta: tempDelta,
      }),
      signal: abort.signal,
    });
    return parseOrThrow(response);
  }

  async gallery(): Promise<GalleryEntry[]> {
    return parseOrThrow(await fetch(this.url(`/offsite/gallery/${this.useCase}`)));
  }

  async chat(message: ChatMessagePayload): Promise<BotReplyPayload> {
    const response = await fetch(this.url("/chat/webhook"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(message),
    });
    return parseOrThrow(response);
  }

  async recordEvent(userId: string, eventType: EventType): Promise<ProfilePayload> {
    const response = await fetch(this.url("/events"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ user_id: userId, event_type: eventType }),
    });
    return parseOrThrow(response);
  }

  async profile(userId: string): Promise<ProfilePayload> {
    return parseOrThrow(await fetch(this.url(`/profile/${userId}`)));
  }

  /** Absolute URL for a gallery image path returned by the API. */
  imageUrl(path: string): string {
    return new URL(path, this.baseUrl).toString();
  }
}

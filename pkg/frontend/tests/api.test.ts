import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { cellColor, hazardColor, NODATA_COLOR, WATER_COLOR } from "../src/colors.js";

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("simulate request cancellation", () => {
  it("aborts the in-flight request when a newer one supersedes it", async () => {
    const calls: { signal: AbortSignal | undefined; resolve: (r: Response) => void }[] = [];
    vi.stubGlobal(
      "fetch",
      (_input: unknown, init?: RequestInit) =>
        new Promise<Response>((resolve, reject) => {
          init?.signal?.addEventListener("abort", () =>
            reject(new DOMException("aborted", "AbortError")),
          );
          calls.push({ signal: init?.signal ?? undefined, resolve });
        }),
    );

    const api = new ApiClient("http://test.invalid", "demo");
    const first = api.simulate(100, 0);
    const second = api.simulate(101, 0);

    expect(calls).toHaveLength(2);
    expect(calls[0].signal?.aborted).toBe(true);
    expect(calls[1].signal?.aborted).toBe(false);
    await expect(first).rejects.toHaveProperty("name", "AbortError");

    const payload = {
      mask: [[false]],
      coverage: [[0.5]],
      summary: { inundated_cell_count: 0, inundated_area_m2: 0, mean_coverage: 0.5 },
    };
    calls[1].resolve(
      new Response(JSON.stringify(payload), {
        headers: { "content-type": "application/json" },
      }),
    );
    await expect(second).resolves.toEqual(payload);
  });
});

describe("error handling", () => {
  it("surfaces the backend error shape", async () => {
    vi.stubGlobal(
      "fetch",
      async () =>
        new Response(JSON.stringify({ error: "not_found", detail: "unknown use case" }), {
          status: 404,
          headers: { "content-type": "application/json" },
        }),
    );
    const api = new ApiClient("http://test.invalid", "nope");
    const failure = await api.terrain().catch((e: ApiError) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).status).toBe(404);
    expect((failure as ApiError).slug).toBe("not_found");
  });
});

describe("color mapping", () => {
  it("paints inundated and nodata cells with fixed colors", () => {
    expect(cellColor(0.5, 0.5, true)).toBe(WATER_COLOR);
    expect(cellColor(0.5, 0.5, false, true)).toBe(NODATA_COLOR);
  });

  it("more coverage means greener cells", () => {
    const bare = cellColor(0.5, 0, false);
    const lush = cellColor(0.5, 1, false);
    const green = (hex: string) => parseInt(hex.slice(3, 5), 16);
    const red = (hex: string) => parseInt(hex.slice(1, 3), 16);
    expect(green(lush) - red(lush)).toBeGreaterThan(green(bare) - red(bare));
  });

  it("unknown hazard types fall back to the default color", () => {
    expect(hazardColor("meteor")).toBe(hazardColor("other"));
    expect(hazardColor("flood")).not.toBe(hazardColor("fire"));
  });
});

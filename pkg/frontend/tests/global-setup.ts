/**
 * Boots a real backend for the test run: generates a config over the
 * shipped demo fixtures with a throwaway data directory, pre-populates
 * stats and gallery through the CLI, then serves until teardown.
 */

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";

const here = path.dirname(fileURLToPath(import.meta.url));
const fixturesDir = path.resolve(here, "../../fixtures/demo");
const serverInfoPath = path.resolve(here, "../.test-server.json");

async function waitForHealth(baseUrl: string, child: ChildProcess): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    if (child.exitCode !== null) {
      throw new Error(`backend exited early with code ${child.exitCode}`);
    }
    try {
      const response = await fetch(`${baseUrl}/health`);
      if (response.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error(`backend at ${baseUrl} never became healthy`);
}

export default async function setup(): Promise<() => Promise<void>> {
  const workDir = mkdtempSync(path.join(tmpdir(), "arise-ui-"));
  const port = 8700 + Math.floor(Math.random() * 400);
  const configPath = path.join(workDir, "config.json");
  writeFileSync(
    configPath,
    JSON.stringify({
      listen: `127.0.0.1:${port}`,
      data_dir: path.join(workDir, "data"),
      onsite_radius_m: 2000,
      use_cases: [
        {
          name: "demo",
          poi_registry_path: path.join(fixturesDir, "pois.json"),
          review_fixture_path: path.join(fixturesDir, "reviews.jsonl"),
          heightmap_path: path.join(fixturesDir, "heightmap.asc"),
          veg_base_path: path.join(fixturesDir, "veg_base.asc"),
          flood_seeds: [
            [6, 0],
            [6, 1],
          ],
        },
      ],
    }),
  );

  execFileSync("arise", ["ingest", "--config", configPath, "--use-case", "demo"]);
  execFileSync("arise", ["refresh-gallery", "--config", configPath, "--use-case", "demo"]);

  const server = spawn("arise", ["serve", "--config", configPath], { stdio: "ignore" });
  const baseUrl = `http://127.0.0.1:${port}`;
  await waitForHealth(baseUrl, server);
  writeFileSync(serverInfoPath, JSON.stringify({ baseUrl }));

  return async () => {
    server.kill("SIGTERM");
    await new Promise((resolve) => setTimeout(resolve, 300));
    if (server.exitCode === null) server.kill("SIGKILL");
    rmSync(workDir, { recursive: true, force: true });
    rmSync(serverInfoPath, { force: true });
  };
}

/**
 * Climate what-if panel: water-level and temperature sliders over a
 * top-down colored cell grid of the terrain. Each slider release POSTs
 * exactly one simulate request (a newer release aborts an in-flight one)
 * and repaints inundated cells, vegetation shading and the summary
 * figures from the response.
 */

import { ApiClient, ScenarioPayload, TerrainPayload } from "./api.js";
import { cellColor } from "./colors.js";
import { clampIndicators, IndicatorRanges, ViewState } from "./state.js";
import { el, isAbortError, Pending, svgEl } from "./util.js";

const TEMP_MIN = -5;
const TEMP_MAX = 15;

export class SimulatePanel {
  readonly pending = new Pending();
  terrain: TerrainPayload | null = null;
  /** simulate requests issued so far (inspected by tests) */
  requestCount = 0;

  private initialized = false;
  private levelSlider!: HTMLInputElement;
  private tempSlider!: HTMLInputElement;
  private levelLabel!: HTMLElement;
  private tempLabel!: HTMLElement;
  private cells: SVGElement[][] = [];
  private summary!: { count: HTMLElement; area: HTMLElement; coverage: HTMLElement };

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private state: ViewState,
    private onIndicatorsChange: () => void,
  ) {}

  ensureInit(): Promise<void> {
    if (this.initialized) return this.pending.settle();
    this.initialized = true;
    return this.pending.add(this.init());
  }

  ranges(): IndicatorRanges {
    const grid = this.terrain!.grid;
    return {
      minLevel: grid.min_elevation - 1,
      maxLevel: grid.max_elevation + 1,
      minTemp: TEMP_MIN,
      maxTemp: TEMP_MAX,
    };
  }

  private async init(): Promise<void> {
    this.terrain = await this.api.terrain();
    const ranges = this.ranges();

    const controls = el("div", { class: "controls" });
    this.levelSlider = el("input", {
      type: "range",
      id: "level-slider",
      min: String(ranges.minLevel),
      max: String(ranges.maxLevel),
      step: "0.1",
      value: String(this.state.waterLevel ?? ranges.minLevel),
    });
    this.tempSlider = el("input", {
      type: "range",
      id: "temp-slider",
      min: String(ranges.minTemp),
      max: String(ranges.maxTemp),
      step: "0.5",
      value: String(this.state.tempDelta),
    });
    this.levelLabel = el("span", { class: "slider-value" });
    this.tempLabel = el("span", { class: "slider-value" });
    for (const slider of [this.levelSlider, this.tempSlider]) {
      slider.addEventListener("input", () => this.updateLabels());
      slider.addEventListener("change", () => this.release());
    }
    controls.append(
      el("label", { for: "level-slider" }, "water level (m)"),
      this.levelSlider,
      this.levelLabel,
      el("label", { for: "temp-slider" }, "temperature delta (C)"),
      this.tempSlider,
      this.tempLabel,
    );

    const summaryBar = el("div", { class: "summary" });
    this.summary = {
      count: el("span", { id: "sim-count" }, "0"),
      area: el("span", { id: "sim-area" }, "0"),
      coverage: el("span", { id: "sim-coverage" }, ""),
    };
    summaryBar.append(
      el("span", { class: "label" }, "inundated cells"),
      this.summary.count,
      el("span", { class: "label" }, "area (m2)"),
      this.summary.area,
      el("span", { class: "label" }, "mean coverage"),
      this.summary.coverage,
    );

    this.root.append(controls, summaryBar, this.buildGrid());
    this.updateLabels();
    // initial paint: run the current indicator values once
    await this.run(this.state.waterLevel, this.state.tempDelta, false);
  }

  private buildGrid(): SVGElement {
    const grid = this.terrain!.grid;
    const svg = svgEl("svg", {
      class: "terrain-grid",
      viewBox: `0 0 ${grid.ncols} ${grid.nrows}`,
      preserveAspectRatio: "xMidYMid meet",
    });
    this.cells = [];
    for (let r = 0; r < grid.nrows; r++) {
      const row: SVGElement[] = [];
      for (let c = 0; c < grid.ncols; c++) {
        const rect = svgEl("rect", {
          x: String(c),
          y: String(r),
          width: "1",
          height: "1",
          "data-row": String(r),
          "data-col": String(c),
        });
        svg.appendChild(rect);
        row.push(rect);
      }
      this.cells.push(row);
    }
    return svg;
  }

  private updateLabels(): void {
    this.levelLabel.textContent = this.levelSlider.value;
    this.tempLabel.textContent = this.tempSlider.value;
  }

  /** Slider release: clamp, persist into view state, run one scenario. */
  private release(): void {
    const clamped = clampIndicators(
      {
        ...this.state,
        waterLevel: Number(this.levelSlider.value),
        tempDelta: Number(this.tempSlider.value),
      },
      this.ranges(),
    );
    this.state.waterLevel = clamped.waterLevel;
    this.state.tempDelta = clamped.tempDelta;
    this.onIndicatorsChange();
    this.pending.add(this.run(this.state.waterLevel, this.state.tempDelta, true));
  }

  private async run(
    waterLevel: number | null,
    tempDelta: number,
    countAsInteraction: boolean,
  ): Promise<void> {
    this.requestCount += 1;
    let scenario: ScenarioPayload;
    try {
      scenario = await this.api.simulate(waterLevel, tempDelta);
    } catch (err) {
      if (isAbortError(err)) return; // superseded by a newer slider value
      throw err;
    }
    this.paint(scenario);
    if (countAsInteraction) {
      this.pending.add(this.api.recordEvent(this.state.userId, "run_simulation"));
    }
  }

  private paint(scenario: ScenarioPayload): void {
    const grid = this.terrain!.grid;
    const span = grid.max_elevation - grid.min_elevation || 1;
    for (let r = 0; r < grid.nrows; r++) {
      for (let c = 0; c < grid.ncols; c++) {
        const elevation = grid.elevations[r][c];
        const nodata = elevation === grid.nodata;
        const fill = cellColor(
          (elevation - grid.min_elevation) / span,
          scenario.coverage[r][c],
          scenario.mask[r][c],
          nodata,
        );
        this.cells[r][c].setAttribute("fill", fill);
      }
    }
    this.summary.count.textContent = String(scenario.summary.inundated_cell_count);
    this.summary.area.textContent = String(scenario.summary.inundated_area_m2);
    this.summary.coverage.textContent = String(scenario.summary.mean_coverage);
  }
}

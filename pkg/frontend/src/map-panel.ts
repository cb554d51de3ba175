/**
 * Onsite map: hazard reports and PoI markers around the view center.
 * Clicking a marker opens its detail card and records the matching
 * engagement event. Every number shown is copied verbatim from the API
 * payload (data-field spans carry String(value)).
 */

import { ApiClient, PoiPayload, ReportPayload } from "./api.js";
import { hazardColor, POI_COLOR } from "./colors.js";
import { radiusForZoom, SelectedKind, ViewState } from "./state.js";
import { el, Pending, svgEl } from "./util.js";

export interface MapBounds {
  north: number;
  south: number;
  west: number;
  east: number;
}

export function viewBounds(state: ViewState): MapBounds {
  const lonSpan = 360 / Math.pow(2, state.zoom);
  const latSpan = lonSpan * 0.6;
  return {
    north: state.centerLat + latSpan / 2,
    south: state.centerLat - latSpan / 2,
    west: state.centerLon - lonSpan / 2,
    east: state.centerLon + lonSpan / 2,
  };
}

export class MapPanel {
  readonly pending = new Pending();
  lastReports: ReportPayload[] = [];
  lastPois: PoiPayload[] = [];

  private svg: SVGElement;
  private markerLayer: SVGElement;
  private card: HTMLElement;
  private status: HTMLElement;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private state: ViewState,
    private onSelect: (kind: SelectedKind | null, id: string | null) => void,
  ) {
    const toolbar = el("div", { class: "toolbar" });
    const refreshButton = el("button", { "data-action": "refresh" }, "refresh");
    refreshButton.addEventListener("click", () => this.refresh());
    this.status = el("span", { class: "status" }, "");
    toolbar.append(refreshButton, this.status);

    this.svg = svgEl("svg", {
      class: "map-canvas",
      viewBox: "0 0 100 100",
      preserveAspectRatio: "none",
    });
    this.markerLayer = svgEl("g");
    this.svg.appendChild(this.markerLayer);
    this.card = el("div", { class: "detail-card", hidden: "" });
    this.root.append(toolbar, this.svg, this.card);
  }

  refresh(): Promise<void> {
    const radius = radiusForZoom(this.state.zoom);
    const { centerLat, centerLon } = this.state;
    return this.pending.add(
      Promise.all([
        this.api.reports(centerLat, centerLon, radius),
        this.api.pois(centerLat, centerLon, radius),
      ]).then(([reports, pois]) => {
        this.lastReports = reports;
        this.lastPois = pois;
        this.renderMarkers();
        this.status.textContent = `${reports.length} reports, ${pois.length} sites`;
        if (this.state.selectedId && !this.findSelected()) {
          // selection must always point into the last fetched data
          this.onSelect(null, null);
          this.card.hidden = true;
        }
      }),
    );
  }

  private findSelected(): ReportPayload | PoiPayload | undefined {
    if (this.state.selectedKind === "report") {
      return this.lastReports.find((r) => r.id === this.state.selectedId);
    }
    if (this.state.selectedKind === "poi") {
      return this.lastPois.find((p) => p.poi_id === this.state.selectedId);
    }
    return undefined;
  }

  private project(lat: number, lon: number): { x: number; y: number } {
    const b = viewBounds(this.state);
    return {
      x: ((lon - b.west) / (b.east - b.west)) * 100,
      y: ((b.north - lat) / (b.north - b.south)) * 100,
    };
  }

  private renderMarkers(): void {
    this.markerLayer.replaceChildren();
    for (const poi of this.lastPois) {
      const { x, y } = this.project(poi.location.lat, poi.location.lon);
      const marker = svgEl("rect", {
        class: "marker poi-marker",
        "data-kind": "poi",
        "data-id": poi.poi_id,
        x: String(x - 1.4),
        y: String(y - 1.4),
        width: "2.8",
        height: "2.8",
        transform: `rotate(45 ${x} ${y})`,
        fill: POI_COLOR,
      });
      marker.addEventListener("click", () => this.select("poi", poi.poi_id));
      this.markerLayer.appendChild(marker);
    }
    for (const report of this.lastReports) {
      const { x, y } = this.project(report.location.lat, report.location.lon);
      const marker = svgEl("circle", {
        class: "marker report-marker",
        "data-kind": "report",
        "data-id": report.id,
        "data-hazard": report.hazard_type,
        cx: String(x),
        cy: String(y),
        r: "1.8",
        fill: hazardColor(report.hazard_type),
      });
      marker.addEventListener("click", () => this.select("report", report.id));
      this.markerLayer.appendChild(marker);
    }
  }

  select(kind: SelectedKind, id: string): void {
    this.onSelect(kind, id);
    const item = this.findSelected();
    if (!item) return;
    if (kind === "report") {
      this.renderReportCard(item as ReportPayload);
      this.pending.add(this.api.recordEvent(this.state.userId, "view_report"));
    } else {
      this.renderPoiCard(item as PoiPayload);
      this.pending.add(this.api.recordEvent(this.state.userId, "open_poi_overlay"));
    }
  }

  private field(label: string, name: string, value: string): HTMLElement {
    const row = el("div", { class: "field-row" });
    row.append(el("span", { class: "label" }, label), el("span", { "data-field": name }, value));
    return row;
  }

  private renderReportCard(report: ReportPayload): void {
    this.card.replaceChildren(
      el("h3", {}, `hazard: ${report.hazard_type}`),
      this.field("description", "description", report.description),
      this.field("distance (m)", "distance_m", String(report.distance_m)),
      this.field("reported", "created_at", report.created_at),
    );
    const photo = report.media.find((m) => m.kind === "photo");
    if (photo) {
      this.card.append(
        el("img", { class: "thumb", src: photo.uri, alt: "report media" }),
      );
    }
    this.card.hidden = false;
  }

  private renderPoiCard(poi: PoiPayload): void {
    this.card.replaceChildren(
      el("h3", {}, poi.name),
      this.field("reviews", "review_count", String(poi.review_count)),
      this.field("mean sentiment", "mean_sentiment", String(poi.mean_sentiment)),
      this.field("importance", "importance", String(poi.importance)),
      this.field("distance (m)", "distance_m", String(poi.distance_m)),
    );
    this.card.hidden = false;
  }
}

/**
 * Explorer shell: panel navigation, state <-> URL sync, and wiring of the
 * four panels to one API client.
 */

import { ApiClient } from "./api.js";
import { ChatPanel } from "./chat-panel.js";
import { GalleryPanel } from "./gallery-panel.js";
import { MapPanel } from "./map-panel.js";
import { SimulatePanel } from "./simulate-panel.js";
import {
  defaultState,
  PanelName,
  stateFromParams,
  stateToParams,
  ViewState,
} from "./state.js";
import { el } from "./util.js";

const PANELS: PanelName[] = ["map", "simulate", "gallery", "chat"];

export interface App {
  state: ViewState;
  api: ApiClient;
  map: MapPanel;
  simulate: SimulatePanel;
  gallery: GalleryPanel;
  chat: ChatPanel;
  showPanel(panel: PanelName): Promise<void>;
  settle(): Promise<void>;
}

export async function boot(root: HTMLElement, apiBaseOverride?: string): Promise<App> {
  const params = new URLSearchParams(window.location.search);
  const state = stateFromParams(params, defaultState());
  const apiBase = apiBaseOverride ?? params.get("api") ?? "http://127.0.0.1:8000";
  const api = new ApiClient(apiBase, params.get("use_case") ?? "");

  const health = await api.health();
  if (!api.useCase) {
    api.useCase = health.use_cases[0] ?? "";
  }

  const nav = el("nav", { class: "panel-nav" });
  const containers = new Map<PanelName, HTMLElement>();
  for (const name of PANELS) {
    const button = el("button", { "data-panel": name }, name);
    button.addEventListener("click", () => showPanel(name));
    nav.appendChild(button);
    const container = el("section", { class: "panel", id: `panel-${name}`, hidden: "" });
    containers.set(name, container);
  }
  root.replaceChildren(nav, ...containers.values());

  const syncUrl = () => {
    const query = stateToParams(state).toString();
    window.history.replaceState(null, "", `${window.location.pathname}?${query}`);
  };

  const map = new MapPanel(containers.get("map")!, api, state, (kind, id) => {
    state.selectedKind = kind;
    state.selectedId = id;
    syncUrl();
  });
  const simulate = new SimulatePanel(containers.get("simulate")!, api, state, syncUrl);
  const gallery = new GalleryPanel(containers.get("gallery")!, api, state);
  const chat = new ChatPanel(containers.get("chat")!, api, state);

  async function showPanel(panel: PanelName): Promise<void> {
    state.panel = panel;
    for (const [name, container] of containers) {
      container.hidden = name !== panel;
    }
    for (const button of nav.querySelectorAll("button")) {
      button.classList.toggle("active", button.dataset.panel === panel);
    }
    syncUrl();
    if (panel === "simulate") await simulate.ensureInit();
    if (panel === "gallery") await gallery.ensureInit();
  }

  const app: App = {
    state,
    api,
    map,
    simulate,
    gallery,
    chat,
    showPanel,
    async settle() {
      await Promise.all([
        map.pending.settle(),
        simulate.pending.settle(),
        gallery.pending.settle(),
        chat.pending.settle(),
      ]);
    },
  };

  await showPanel(state.panel);
  await map.refresh();
  return app;
}

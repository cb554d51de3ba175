/** Artwork gallery: a grid of generated images with their prompt captions. */

import { ApiClient, GalleryEntry } from "./api.js";
import { ViewState } from "./state.js";
import { el, Pending } from "./util.js";

export class GalleryPanel {
  readonly pending = new Pending();
  entries: GalleryEntry[] = [];

  private initialized = false;
  private grid: HTMLElement;
  private status: HTMLElement;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private state: ViewState,
  ) {
    this.status = el("span", { class: "status" }, "");
    const toolbar = el("div", { class: "toolbar" });
    const refreshButton = el("button", { "data-action": "refresh" }, "refresh");
    refreshButton.addEventListener("click", () => this.refresh());
    toolbar.append(refreshButton, this.status);
    this.grid = el("div", { class: "gallery-grid" });
    this.root.append(toolbar, this.grid);
  }

  ensureInit(): Promise<void> {
    if (this.initialized) return this.pending.settle();
    this.initialized = true;
    return this.refresh();
  }

  refresh(): Promise<void> {
    return this.pending.add(
      this.api.gallery().then((entries) => {
        this.entries = entries;
        this.render();
      }),
    );
  }

  private render(): void {
    this.grid.replaceChildren();
    this.status.textContent = `${this.entries.length} artworks`;
    for (const entry of this.entries) {
      const figure = el("figure", { class: "artwork", "data-id": entry.artwork_id });
      const img = el("img", {
        src: this.api.imageUrl(entry.image_url),
        alt: entry.prompt_text,
        loading: "lazy",
      });
      img.addEventListener("click", () =>
        this.pending.add(this.api.recordEvent(this.state.userId, "view_artwork")),
      );
      figure.append(img, el("figcaption", {}, entry.prompt_text));
      this.grid.appendChild(figure);
    }
  }
}

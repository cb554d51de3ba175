/**
 * Chat client for the report flow. It speaks the webhook wire protocol
 * verbatim and renders whatever the bot replies: prompt text, option
 * buttons, a map-click location picker while the flow expects a
 * location, and a media-URI row while it expects attachments. The panel
 * holds no flow logic of its own — a validation reply simply re-renders
 * the same state the backend reports.
 */

import { ApiClient, BotReplyPayload, ChatMessagePayload } from "./api.js";
import { viewBounds } from "./map-panel.js";
import { ViewState } from "./state.js";
import { el, Pending, svgEl } from "./util.js";

const PICKER_CELLS = 9;

export class ChatPanel {
  readonly pending = new Pending();
  lastReply: BotReplyPayload | null = null;
  /** reports confirmed through this session (inspected by tests) */
  submittedCount = 0;

  private log: HTMLElement;
  private optionsBar: HTMLElement;
  private textInput: HTMLInputElement;
  private locationPicker: HTMLElement;
  private mediaRow: HTMLElement;
  private mediaInput: HTMLInputElement;
  private mediaKind: HTMLSelectElement;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private state: ViewState,
  ) {
    this.log = el("div", { class: "chat-log" });
    this.optionsBar = el("div", { class: "chat-options" });

    const inputRow = el("div", { class: "chat-input-row" });
    this.textInput = el("input", {
      type: "text",
      id: "chat-text",
      placeholder: "type a message or /report",
    });
    const sendButton = el("button", { "data-action": "send" }, "send");
    sendButton.addEventListener("click", () => this.sendFromInput());
    this.textInput.addEventListener("keydown", (event) => {
      if (event.key === "Enter") this.sendFromInput();
    });
    inputRow.append(this.textInput, sendButton);

    this.locationPicker = el("div", { class: "location-picker", hidden: "" });
    this.locationPicker.append(
      el("p", { class: "hint" }, "click the map to share the location"),
    );

    this.mediaRow = el("div", { class: "media-row", hidden: "" });
    this.mediaKind = el("select", { id: "media-kind" });
    for (const kind of ["photo", "video", "voice"]) {
      this.mediaKind.append(el("option", { value: kind }, kind));
    }
    this.mediaInput = el("input", {
      type: "text",
      id: "media-uri",
      placeholder: "media URI (e.g. media://photo.jpg)",
    });
    const attachButton = el("button", { "data-action": "attach" }, "attach");
    attachButton.addEventListener("click", () => this.sendMedia());
    this.mediaRow.append(this.mediaKind, this.mediaInput, attachButton);

    this.root.append(this.log, this.optionsBar, this.locationPicker, this.mediaRow, inputRow);
    this.append("bot", "Send /report to start a new hazard report.");
  }

  private append(who: "you" | "bot", text: string): void {
    const entry = el("div", { class: `chat-entry ${who}` });
    entry.append(el("span", { class: "who" }, who), el("span", { class: "text" }, text));
    this.log.appendChild(entry);
  }

  private sendFromInput(): void {
    const text = this.textInput.value.trim();
    if (!text) return;
    this.textInput.value = "";
    this.sendText(text);
  }

  sendText(text: string): Promise<void> {
    const kind = text.startsWith("/") ? "command" : "text";
    return this.send({ kind, text });
  }

  sendLocation(lat: number, lon: number): Promise<void> {
    return this.send({ kind: "location", location: { lat, lon } });
  }

  private sendMedia(): void {
    const uri = this.mediaInput.value.trim();
    if (!uri) return;
    this.mediaInput.value = "";
    this.send({
      kind: this.mediaKind.value as ChatMessagePayload["kind"],
      media_uri: uri,
    });
  }

  send(message: Omit<ChatMessagePayload, "session_id">): Promise<void> {
    const summary =
      message.kind === "location"
        ? `location ${message.location!.lat}, ${message.location!.lon}`
        : message.text ?? message.media_uri ?? "";
    this.append("you", summary);
    const wasConfirm = this.lastReply?.state === "Confirm";
    const task = this.api
      .chat({ session_id: this.state.sessionId, ...message })
      .then((reply) => {
        this.lastReply = reply;
        this.append("bot", reply.text);
        this.renderOptions(reply.options);
        this.locationPicker.hidden = reply.state !== "AwaitLocation";
        if (reply.state === "AwaitLocation") this.buildPickerCells();
        this.mediaRow.hidden = reply.state !== "AwaitMedia";
        if (
          wasConfirm &&
          message.kind === "text" &&
          message.text?.toLowerCase() === "yes" &&
          reply.state === "Idle"
        ) {
          this.submittedCount += 1;
          this.pending.add(this.api.recordEvent(this.state.userId, "submit_report"));
        }
      });
    return this.pending.add(task);
  }

  private renderOptions(options: string[]): void {
    this.optionsBar.replaceChildren();
    for (const option of options) {
      const button = el("button", { class: "option", "data-option": option }, option);
      button.addEventListener("click", () => this.sendText(option));
      this.optionsBar.appendChild(button);
    }
  }

  /**
   * The location input is a map click: a cell grid spanning the current
   * map viewport, each cell carrying its own coordinates.
   */
  private buildPickerCells(): void {
    const existing = this.locationPicker.querySelector("svg");
    existing?.remove();
    const bounds = viewBounds(this.state);
    const svg = svgEl("svg", {
      class: "picker-grid",
      viewBox: `0 0 ${PICKER_CELLS} ${PICKER_CELLS}`,
    });
    for (let row = 0; row < PICKER_CELLS; row++) {
      for (let col = 0; col < PICKER_CELLS; col++) {
        const lat =
          bounds.north - ((row + 0.5) / PICKER_CELLS) * (bounds.north - bounds.south);
        const lon = bounds.west + ((col + 0.5) / PICKER_CELLS) * (bounds.east - bounds.west);
        const cell = svgEl("rect", {
          x: String(col),
          y: String(row),
          width: "1",
          height: "1",
          class: "picker-cell",
          "data-lat": String(lat),
          "data-lon": String(lon),
        });
        cell.addEventListener("click", () => this.sendLocation(lat, lon));
        svg.appendChild(cell);
      }
    }
    this.locationPicker.appendChild(svg);
  }
}

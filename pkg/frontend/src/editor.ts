/** Scenario editor: plain text with a line-number gutter, positioned error
 * markers from the service's 400 responses, and a quick-add directive box. */

import { clear, el } from "./dom.js";
import type { Marker, Store } from "./state.js";

export interface EditorActions {
  onReason(): void;
  onAddDirective(line: string): void;
  onLoadExample(): void;
}

export class EditorView {
  private textarea: HTMLTextAreaElement;
  private gutter: HTMLElement;
  private markerList: HTMLElement;
  private staleBanner: HTMLElement;
  private directiveInput: HTMLInputElement;

  constructor(root: HTMLElement, private store: Store, private actions: EditorActions) {
    const reasonButton = el("button", { class: "primary", "data-action": "reason" }, "Reason");
    reasonButton.addEventListener("click", () => this.actions.onReason());
    const exampleButton = el("button", { "data-action": "load-example" }, "Load example");
    exampleButton.addEventListener("click", () => this.actions.onLoadExample());

    this.staleBanner = el("div", { class: "stale-banner", hidden: "" },
      "Scenario edited since the last run; results below are stale.");

    this.gutter = el("div", { class: "gutter" });
    this.textarea = el("textarea", {
      class: "scenario-input",
      spellcheck: "false",
      "aria-label": "scenario text",
    });
    this.textarea.addEventListener("input", () => {
      this.store.update({ buffer: this.textarea.value, stale: true, markers: [] });
    });
    this.textarea.addEventListener("scroll", () => {
      this.gutter.scrollTop = this.textarea.scrollTop;
    });

    this.markerList = el("ul", { class: "markers" });

    this.directiveInput = el("input", {
      class: "directive-input",
      placeholder: "add directive, e.g.  data dq1 hasDataQuality 0.3",
      "aria-label": "new directive",
    });
    const addButton = el("button", { "data-action": "add-directive" }, "Add");
    addButton.addEventListener("click", () => {
      if (this.directiveInput.value.trim()) {
        this.actions.onAddDirective(this.directiveInput.value);
      }
    });

    root.append(
      el("div", { class: "pane-title" }, "Scenario", exampleButton, reasonButton),
      this.staleBanner,
      el("div", { class: "editor-grid" }, this.gutter, this.textarea),
      this.markerList,
      el("div", { class: "directive-row" }, this.directiveInput, addButton),
    );
    store.subscribe(() => this.render());
    this.render();
  }

  clearDirectiveInput(): void {
    this.directiveInput.value = "";
  }

  private render(): void {
    const state = this.store.get();
    if (this.textarea.value !== state.buffer) {
      this.textarea.value = state.buffer;
    }
    this.staleBanner.toggleAttribute("hidden", !state.stale || state.report === null);
    this.renderGutter(state.buffer, state.markers);
    this.renderMarkers(state.markers);
  }

  private renderGutter(buffer: string, markers: Marker[]): void {
    const bad = new Set(markers.map((m) => m.line));
    clear(this.gutter);
    const lines = buffer.split("\n").length;
    for (let i = 1; i <= lines; i++) {
      this.gutter.append(
        el("div", { class: bad.has(i) ? "line-no error-line" : "line-no", "data-line": String(i) },
          String(i)),
      );
    }
  }

  private renderMarkers(markers: Marker[]): void {
    clear(this.markerList);
    for (const m of markers) {
      this.markerList.append(
        el("li", { class: "marker", "data-marker-line": String(m.line) },
          `${m.line}:${m.column}: ${m.code}: ${m.message}`),
      );
    }
  }
}

/** What-if panel: ephemeral data overrides, a side-by-side base/what-if
 * comparison with changed cells highlighted, and an action that promotes the
 * overrides into real scenario edits. */

import type { DecisionEntry, WhatifResponse } from "./api.js";
import { clear, el } from "./dom.js";
import type { Store } from "./state.js";
import { showNumber } from "./triggers.js";

export interface WhatifActions {
  onRun(overrides: string[]): void;
  onApply(overrides: string[]): void;
}

const COMPARED_FIELDS: [keyof DecisionEntry, string][] = [
  ["collateral_risk_flag", "collateral damage risk"],
  ["mitigation_required", "mitigation required"],
  ["escalated", "escalated"],
  ["severity_reported", "severity (reported)"],
  ["likelihood", "likelihood"],
  ["likelihood_band", "likelihood band"],
  ["data_quality", "data quality"],
];

export class WhatifPanel {
  private rows: HTMLElement;
  private result: HTMLElement;
  private error: HTMLElement;

  constructor(root: HTMLElement, private store: Store, private actions: WhatifActions) {
    this.rows = el("div", { class: "override-rows" });
    const addRow = el("button", { "data-action": "add-override" }, "+ override");
    addRow.addEventListener("click", () => {
      this.store.update({ overrides: [...this.store.get().overrides, ""] });
    });
    const run = el("button", { class: "primary", "data-action": "run-whatif" }, "Run what-if");
    run.addEventListener("click", () => this.actions.onRun(this.currentOverrides()));
    const apply = el("button", { "data-action": "apply-overrides" }, "Apply to scenario");
    apply.addEventListener("click", () => this.actions.onApply(this.currentOverrides()));

    this.error = el("div", { class: "inline-error", hidden: "" });
    this.result = el("div", { class: "whatif-result" });
    root.append(
      el("div", { class: "pane-title" }, "What-if"),
      this.rows,
      el("div", { class: "whatif-buttons" }, addRow, run, apply),
      this.error,
      this.result,
    );
    store.subscribe(() => this.render());
    this.render();
  }

  showError(message: string | null): void {
    this.error.textContent = message ?? "";
    this.error.toggleAttribute("hidden", message === null);
  }

  private currentOverrides(): string[] {
    return Array.from(this.rows.querySelectorAll("input"))
      .map((input) => input.value.trim())
      .filter((text) => text.length > 0);
  }

  private render(): void {
    const state = this.store.get();
    this.renderRows(state.overrides);
    this.renderResult(state.lastWhatif);
  }

  private renderRows(overrides: string[]): void {
    const existing = Array.from(this.rows.querySelectorAll("input")).map((i) => i.value);
    if (existing.length === overrides.length) return; // keep user's typing
    clear(this.rows);
    for (const value of overrides.length ? overrides : [""]) {
      const input = el("input", {
        class: "override-input",
        placeholder: "subject.property=value, e.g.  lm1.hasProbability=0.6",
        "aria-label": "override",
      });
      input.value = value;
      this.rows.append(el("div", { class: "override-row" }, input));
    }
  }

  private renderResult(response: WhatifResponse | null): void {
    clear(this.result);
    if (response === null) return;
    const changed = new Set(response.diff.map((d) => `${d.decision}:${d.field}`));
    const decisions = new Map<string, { base?: DecisionEntry; whatif?: DecisionEntry }>();
    for (const entry of response.base.decisions) {
      decisions.set(entry.decision, { base: entry });
    }
    for (const entry of response.whatif.decisions) {
      decisions.set(entry.decision, { ...decisions.get(entry.decision), whatif: entry });
    }
    if (decisions.size === 0) {
      this.result.append(el("p", { class: "empty-state" }, "No decisions to compare."));
      return;
    }
    for (const [name, pair] of decisions) {
      const table = el("table", { class: "diff-table", "data-decision": name });
      table.append(
        el("tr", {}, el("th", {}, name), el("th", {}, "base"), el("th", {}, "what-if")),
      );
      for (const [field, label] of COMPARED_FIELDS) {
        const cellClass = changed.has(`${name}:${field}`) ? "changed" : "";
        table.append(
          el(
            "tr",
            { "data-field": field },
            el("td", {}, label),
            el("td", { class: cellClass }, show(pair.base?.[field])),
            el("td", { class: cellClass, "data-side": "whatif" }, show(pair.whatif?.[field])),
          ),
        );
      }
      this.result.append(table);
    }
  }
}

function show(value: unknown): string {
  if (value === undefined || value === null) return "-";
  if (typeof value === "boolean") return value ? "YES" : "no";
  if (typeof value === "number") return showNumber(value);
  return String(value);
}

/** Rule-trigger panel: one card per assessment decision with the risk,
 * mitigation and escalation flags, severity (raw and promoted) and the
 * likelihood band. Each active flag expands to its proof tree, fetched on
 * demand so large audit chains cost nothing until opened. */

import type { DecisionEntry, ProofNode } from "./api.js";
import { clear, el } from "./dom.js";
import type { Store } from "./state.js";

export interface TriggerActions {
  fetchProof(facts: string[]): Promise<ProofNode>;
}

/** Exact text shown for a report number; displayed values must match the
 * machine report character for character. */
export function showNumber(n: number | null): string {
  return n === null ? "-" : JSON.stringify(n);
}

export class TriggerPanel {
  private body: HTMLElement;

  constructor(root: HTMLElement, private store: Store, private actions: TriggerActions) {
    this.body = el("div", { class: "trigger-body" });
    root.append(el("div", { class: "pane-title" }, "Rule triggers"), this.body);
    store.subscribe(() => this.render());
    this.render();
  }

  private render(): void {
    const report = this.store.get().report;
    clear(this.body);
    if (report === null) {
      this.body.append(el("p", { class: "empty-state" }, "Run Reason to evaluate the scenario."));
      return;
    }
    if (report.decisions.length === 0) {
      this.body.append(el("p", { class: "empty-state" }, "No decisions in this scenario."));
      return;
    }
    for (const entry of report.decisions) {
      this.body.append(this.card(entry));
    }
  }

  private card(entry: DecisionEntry): HTMLElement {
    const card = el("section", { class: "decision-card", "data-decision": entry.decision });
    card.append(el("h3", {}, `decision ${entry.decision}`));

    card.append(
      this.flagRow(entry, "collateral-risk", "collateral damage risk", entry.collateral_risk_flag,
        [`${entry.decision} is Effect`]),
      this.flagRow(entry, "mitigation", "mitigation required", entry.mitigation_required,
        entry.mitigation_via.map((m) => `${entry.decision} hasAssessmentDecision ${m}`)),
      this.flagRow(entry, "escalated", "escalated", entry.escalated,
        entry.engagements.map((e) => `${e} is EscalatedRiskEngagement`)),
    );

    const facts = el("dl", { class: "decision-facts" });
    if (entry.severity_raw !== null) {
      const promoted = entry.severity_reported !== entry.severity_raw;
      facts.append(
        el("dt", {}, "severity"),
        el("dd", { class: promoted ? "promoted" : "", "data-field": "severity" },
          promoted
            ? `${entry.severity_raw} → ${entry.severity_reported}`
            : `${entry.severity_raw}`),
      );
    }
    if (entry.likelihood !== null) {
      facts.append(
        el("dt", {}, "likelihood"),
        el("dd", { "data-field": "likelihood" },
          `${showNumber(entry.likelihood)} (${entry.likelihood_band})`),
      );
    }
    if (entry.data_quality !== null) {
      facts.append(
        el("dt", {}, "data quality"),
        el("dd", { "data-field": "data_quality" }, showNumber(entry.data_quality)),
      );
    }
    if (entry.mitigation_via.length) {
      facts.append(
        el("dt", {}, "mitigation via"),
        el("dd", { "data-field": "mitigation_via" }, entry.mitigation_via.join(", ")),
      );
    }
    card.append(facts);
    return card;
  }

  private flagRow(
    entry: DecisionEntry,
    key: string,
    label: string,
    on: boolean,
    facts: string[],
  ): HTMLElement {
    const row = el("div", { class: "flag-row", "data-flag": key });
    row.append(
      el("span", { class: on ? "flag on" : "flag off", "data-state": on ? "on" : "off" },
        on ? "YES" : "no"),
      el("span", { class: "flag-label" }, label),
    );
    if (on && facts.length) {
      const proofHost = el("div", { class: "proof-host" });
      const button = el("button", { class: "proof-toggle", "data-proof-for": key }, "why?");
      button.addEventListener("click", async () => {
        button.disabled = true;
        try {
          const tree = await this.actions.fetchProof(facts);
          clear(proofHost);
          proofHost.append(renderProof(tree));
        } catch (err) {
          clear(proofHost);
          proofHost.append(
            el("p", { class: "inline-error" }, `proof unavailable: ${(err as Error).message}`),
          );
          button.disabled = false;
        }
      });
      row.append(button, proofHost);
    }
    return row;
  }
}

export function renderProof(node: ProofNode): HTMLElement {
  const tag =
    node.kind === "asserted"
      ? node.source_line === null
        ? " [asserted]"
        : ` [asserted, line ${node.source_line}]`
      : node.kind === "derived"
        ? ` [${node.rule}, step ${node.step}]`
        : "";
  const item = el("li", { class: `proof-node proof-${node.kind}` }, node.statement + tag);
  if (node.children.length) {
    const childList = el("ul", { class: "proof-children" });
    for (const child of node.children) childList.append(renderProof(child));
    item.append(childList);
  }
  return el("ul", { class: "proof-tree" }, item);
}

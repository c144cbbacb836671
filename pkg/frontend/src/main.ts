/** Workbench wiring: one session per page, editor on the left, rule
 * triggers and what-if exploration on the right. All reasoning happens on
 * the service; this module only moves text and JSON around. */

import { ApiRequestError, WorkbenchApi } from "./api.js";
import type { ProofNode } from "./api.js";
import { el } from "./dom.js";
import { EditorView } from "./editor.js";
import { USECASE_EXAMPLE } from "./fixtures.js";
import { Store } from "./state.js";
import { TriggerPanel } from "./triggers.js";
import { WhatifPanel } from "./whatif.js";

const OVERRIDE_RE = /^([A-Za-z_][A-Za-z0-9_]*)\.([A-Za-z_][A-Za-z0-9_]*)=(.+)$/;

export class Workbench {
  readonly store = new Store();
  readonly api: WorkbenchApi;
  private editor: EditorView;
  private whatifPanel: WhatifPanel;
  private banner: HTMLElement;

  constructor(root: HTMLElement, apiBase: string) {
    this.api = new WorkbenchApi(apiBase);

    this.banner = el("div", { class: "banner inline-error", hidden: "" });
    const editorPane = el("div", { class: "pane editor-pane" });
    const triggerPane = el("div", { class: "pane trigger-pane" });
    const whatifPane = el("div", { class: "pane whatif-pane" });
    root.append(
      el("header", { class: "app-header" }, el("h1", {}, "cdaimo workbench"), this.banner),
      el("div", { class: "panes" }, editorPane, triggerPane, whatifPane),
    );

    this.editor = new EditorView(editorPane, this.store, {
      onReason: () => void this.reason(),
      onAddDirective: (line) => void this.addDirective(line),
      onLoadExample: () => this.loadExample(),
    });
    new TriggerPanel(triggerPane, this.store, {
      fetchProof: (facts) => this.fetchProof(facts),
    });
    this.whatifPanel = new WhatifPanel(whatifPane, this.store, {
      onRun: (overrides) => void this.runWhatif(overrides),
      onApply: (overrides) => this.applyOverrides(overrides),
    });
  }

  loadExample(): void {
    this.store.update({ buffer: USECASE_EXAMPLE, stale: true, markers: [], banner: null });
  }

  setBuffer(text: string): void {
    this.store.update({ buffer: text, stale: true, markers: [] });
  }

  /** Reuse the session when the buffer is unchanged; otherwise start fresh. */
  private async ensureSession(): Promise<string> {
    const state = this.store.get();
    if (state.sessionId !== null && state.loadedText === state.buffer) {
      return state.sessionId;
    }
    if (state.sessionId !== null) {
      await this.api.deleteSession(state.sessionId).catch(() => undefined);
    }
    const info = await this.api.createSession(state.buffer);
    this.store.update({ sessionId: info.session, loadedText: state.buffer });
    return info.session;
  }

  async reason(): Promise<void> {
    this.showBanner(null);
    this.store.update({ markers: [] });
    try {
      const id = await this.ensureSession();
      const report = await this.api.reason(id);
      this.store.update({ report, stale: false });
    } catch (err) {
      this.surface(err);
    }
  }

  async runWhatif(overrides: string[]): Promise<void> {
    this.whatifPanel.showError(null);
    try {
      const id = await this.ensureSession();
      const response = await this.api.whatif(id, overrides);
      this.store.update({ lastWhatif: response, overrides, stale: false });
    } catch (err) {
      if (err instanceof ApiRequestError) {
        this.whatifPanel.showError(`${err.code}: ${err.message}`);
      } else {
        this.surface(err);
      }
    }
  }

  /** Promote overrides into scenario edits: replace the matching data line
   * (same subject and property) or append a new one. */
  applyOverrides(overrides: string[]): void {
    this.whatifPanel.showError(null);
    let buffer = this.store.get().buffer;
    for (const text of overrides) {
      const m = OVERRIDE_RE.exec(text.trim());
      if (!m) {
        this.whatifPanel.showError(`override must look like subject.property=value: ${text}`);
        return;
      }
      const [, subject, property, value] = m;
      const lineRe = new RegExp(`^data\\s+${subject}\\s+${property}\\b.*$`, "m");
      const replacement = `data ${subject} ${property} ${value}`;
      buffer = lineRe.test(buffer)
        ? buffer.replace(lineRe, replacement)
        : `${buffer.replace(/\n?$/, "\n")}${replacement}\n`;
    }
    this.store.update({ buffer, stale: true, markers: [] });
  }

  async addDirective(line: string): Promise<void> {
    this.showBanner(null);
    try {
      const id = await this.ensureSession();
      await this.api.assertDirective(id, line);
      const buffer = `${this.store.get().buffer.replace(/\n?$/, "\n")}${line}\n`;
      // the session's materialized text now equals the extended buffer
      this.store.update({ buffer, loadedText: buffer, stale: true, markers: [] });
      this.editor.clearDirectiveInput();
    } catch (err) {
      this.surface(err);
    }
  }

  /** The escalation flag may have several candidate engagements; show the
   * first fact the service can actually prove. */
  private async fetchProof(facts: string[]): Promise<ProofNode> {
    const id = await this.ensureSession();
    let lastError: unknown = new Error("no fact to explain");
    for (const fact of facts) {
      try {
        const { tree } = await this.api.explain(id, fact);
        return tree;
      } catch (err) {
        lastError = err;
        if (!(err instanceof ApiRequestError) || err.status !== 404) break;
      }
    }
    throw lastError;
  }

  private surface(err: unknown): void {
    if (err instanceof ApiRequestError && err.line !== undefined) {
      this.store.update({
        markers: [
          { line: err.line, column: err.column ?? 1, code: err.code, message: err.message },
        ],
      });
      return;
    }
    this.showBanner(err instanceof Error ? err.message : String(err));
  }

  private showBanner(message: string | null): void {
    this.banner.textContent = message ?? "";
    this.banner.toggleAttribute("hidden", message === null);
    this.store.update({ banner: message });
  }
}

export function createApp(root: HTMLElement, apiBase: string): Workbench {
  return new Workbench(root, apiBase);
}

/* browser bootstrap; test environments mount createApp themselves */
if (typeof document !== "undefined" && document.getElementById("app") !== null) {
  const params = new URLSearchParams(window.location.search);
  createApp(
    document.getElementById("app") as HTMLElement,
    params.get("api") ?? "http://127.0.0.1:8787",
  );
}

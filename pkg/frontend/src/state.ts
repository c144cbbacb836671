import type { MachineReport, WhatifResponse } from "./api.js";

export interface Marker {
  line: number;
  column: number;
  code: string;
  message: string;
}

export interface UiSessionState {
  sessionId: string | null;
  /** scenario text being edited */
  buffer: string;
  /** text the current session was loaded from (null: no live session) */
  loadedText: string | null;
  report: MachineReport | null;
  /** buffer edited since the displayed report/diff were computed */
  stale: boolean;
  markers: Marker[];
  banner: string | null;
  lastWhatif: WhatifResponse | null;
  overrides: string[];
}

export function initialState(): UiSessionState {
  return {
    sessionId: null,
    buffer: "scenario draft\n",
    loadedText: null,
    report: null,
    stale: false,
    markers: [],
    banner: null,
    lastWhatif: null,
    overrides: [""],
  };
}

export type Listener = (state: UiSessionState) => void;

export class Store {
  private state: UiSessionState = initialState();
  private listeners: Listener[] = [];

  get(): UiSessionState {
    return this.state;
  }

  update(partial: Partial<UiSessionState>): void {
    this.state = { ...this.state, ...partial };
    for (const fn of this.listeners) fn(this.state);
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((f) => f !== fn);
    };
  }
}

/** Typed client for the what-if service. The UI never reasons locally:
 * every displayed flag and number originates from one of these calls. */

export interface Warning {
  kind: string;
  severity: string;
  names: string[];
  message: string;
}

export interface SessionInfo {
  session: string;
  version: number;
  warnings: Warning[];
}

export interface EngagementMetrics {
  temporal: string | null;
  spatial: string | null;
  force: string[];
  severity: string | null;
  likelihood: number | null;
  data_quality: number | null;
}

export interface EffectRef {
  individual: string;
  classes: string[];
}

export interface DecisionEntry {
  decision: string;
  engagements: string[];
  collateral_risk_flag: boolean;
  mitigation_required: boolean;
  escalated: boolean;
  severity_raw: string | null;
  severity_reported: string | null;
  likelihood: number | null;
  likelihood_band: string | null;
  data_quality: number | null;
  effects: EffectRef[];
  mitigation_via: string[];
  engagement_metrics: Record<string, EngagementMetrics>;
  audit_steps: number[];
}

export interface StepEntry {
  id: number;
  rule: string;
  subject: string;
  effect: Record<string, string>;
}

export interface MachineReport {
  scenario: string;
  config: { likelihood_cuts: number[]; disabled_rules: string[] };
  decisions: DecisionEntry[];
  steps: StepEntry[];
}

export interface ProofNode {
  statement: string;
  kind: "asserted" | "derived" | "subclass";
  source_line: number | null;
  rule: string | null;
  step: number | null;
  children: ProofNode[];
}

export interface DiffEntry {
  decision: string;
  field: string;
  base: unknown;
  whatif: unknown;
}

export interface WhatifResponse {
  base: MachineReport;
  whatif: MachineReport;
  diff: DiffEntry[];
}

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly line?: number,
    readonly column?: number,
    readonly version?: number,
  ) {
    super(message);
  }
}

async function parseError(res: Response): Promise<ApiRequestError> {
  let body: Record<string, unknown> = {};
  try {
    body = (await res.json()) as Record<string, unknown>;
  } catch {
    /* non-JSON error body; keep the status text */
  }
  return new ApiRequestError(
    res.status,
    String(body.code ?? res.status),
    String(body.message ?? res.statusText),
    typeof body.line === "number" ? body.line : undefined,
    typeof body.column === "number" ? body.column : undefined,
    typeof body.version === "number" ? body.version : undefined,
  );
}

export class WorkbenchApi {
  constructor(readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!res.ok) throw await parseError(res);
    if (res.status === 204) return undefined as T;
    return (await res.json()) as T;
  }

  createSession(scenario: string): Promise<SessionInfo> {
    return this.request("POST", "/sessions", { scenario });
  }

  deleteSession(id: string): Promise<void> {
    return this.request("DELETE", `/sessions/${id}`);
  }

  reason(id: string): Promise<MachineReport> {
    return this.request("POST", `/sessions/${id}/reason`);
  }

  assertDirective(id: string, directive: string, version?: number): Promise<SessionInfo> {
    return this.request("POST", `/sessions/${id}/assert`, { directive, version });
  }

  explain(id: string, fact: string): Promise<{ fact: string; tree: ProofNode }> {
    return this.request("GET", `/sessions/${id}/explain?fact=${encodeURIComponent(fact)}`);
  }

  whatif(id: string, overrides: string[]): Promise<WhatifResponse> {
    return this.request("POST", `/sessions/${id}/whatif`, { overrides });
  }
}

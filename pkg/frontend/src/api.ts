/*
  Typed client for the local casekit review service.

  The server is the single authority: every effective value shown in the
  workbench comes from a response body, never from client-side math. Writers
  carry the state version they believe is current (X-Expected-Version) and
  must adopt the version the server returns; a mismatch is a conflict to
  surface, never a silent retry.
*/

export type Dimension = "procedural" | "implementation";
export type Strategy = "conservative_min" | "weighted_mean";

export interface CaseScope {
  application: string;
  assumptions: string[];
  environment: string;
  system_description: string;
}

export interface CounterArgument {
  text: string;
  rejection: string;
  rejection_evidence: string[];
}

export interface Claim {
  id: string;
  parent: string | null;
  children: string[];
  text: string;
  family: string | null;
  poc: string | null;
  status: string;
  justification_narrative: string | null;
  limitations: string[];
  counter_arguments: CounterArgument[];
}

export interface EvidenceItem {
  id: string;
  title: string;
  kind: string;
  uri: string;
  owner: string | null;
  owner_affiliated: boolean;
  created: string;
  last_review: string | null;
  exists: boolean;
  active_confirmed: boolean;
  approvals_documented: boolean;
  controlled_environment: boolean;
  flagged_major_revision: boolean;
  partially_outdated_flagged: boolean;
  revision_history_documented: boolean;
}

export interface EvidenceLink {
  claim_id: string;
  evidence_id: string;
  note: string | null;
}

export interface CaseDocument {
  version: number;
  scope: CaseScope;
  claims: Claim[];
  evidence: EvidenceItem[];
  links: EvidenceLink[];
}

/* Roll-up values arrive as exact fraction strings ("2", "5/3") or null when
   nothing usable contributes; they are displayed verbatim. */
export interface RollupNode {
  claim_id: string;
  procedural: string | null;
  implementation: string | null;
  source: "direct" | "children" | "mixed" | "override";
  contributing_children: string[];
  overridden_dimensions: string[];
}

export interface RegisterEntry {
  claim_id: string;
  dimension: Dimension;
  score: number;
}

export interface RollupDocument {
  case_version: number;
  strategy: Strategy;
  threshold: number;
  nodes: RollupNode[];
  low_score_register: RegisterEntry[];
  warnings: string[];
}

export type QueueReason = "stale" | "unassessed" | "below_threshold";

export interface QueueEntry {
  claim_id: string;
  reason: QueueReason;
  detail: string;
}

export interface RubricCell {
  title: string;
  guidance: string;
}

/* dimension -> level ("0".."3") -> cell, exactly as the server transcribes it */
export type RubricDoc = Record<Dimension, Record<string, RubricCell>>;

export interface AssessmentPayload {
  claim_id: string;
  summary: string;
  assessor: string[];
  assessed_at: string;
  case_version: number;
  procedural: number | null;
  implementation: number | null;
  procedural_na: boolean;
  implementation_na: boolean;
  na_justification: string | null;
}

export interface StoredAssessment extends AssessmentPayload {
  stale: boolean;
}

export type PostResult =
  | { kind: "accepted"; stored: StoredAssessment; currentVersion: number }
  | { kind: "conflict"; code: string; currentVersion: number }
  | { kind: "rejected"; status: number; code: string; message: string; field?: string };

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

function query(params: Record<string, string | number | undefined>): string {
  const parts = Object.entries(params)
    .filter(([, v]) => v !== undefined)
    .map(([k, v]) => `${k}=${encodeURIComponent(String(v))}`);
  return parts.length ? `?${parts.join("&")}` : "";
}

export class WorkbenchClient {
  /** Latest X-State-Version observed on any response, conflicts included. */
  version: number | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const res = await this.fetchFn(this.baseUrl + path, init);
    const seen = res.headers.get("X-State-Version");
    if (seen !== null) this.version = Number(seen);
    return res;
  }

  private async getJson<T>(path: string): Promise<T> {
    const res = await this.request(path);
    if (!res.ok) {
      const body = await res.json().catch(() => ({}));
      throw new ApiError(res.status, body.error ?? "error", body.message ?? res.statusText);
    }
    return (await res.json()) as T;
  }

  getCase(): Promise<CaseDocument> {
    return this.getJson("/case");
  }

  getRollup(strategy?: Strategy, threshold?: number): Promise<RollupDocument> {
    return this.getJson(`/rollup${query({ strategy, threshold })}`);
  }

  getQueue(threshold?: number): Promise<QueueEntry[]> {
    return this.getJson(`/queue${query({ threshold })}`);
  }

  getRubric(): Promise<RubricDoc> {
    return this.getJson("/rubric");
  }

  /* The radar is embedded as server-rendered bytes: one source of truth for
     the chart geometry. */
  async getRadarSvg(strategy?: Strategy): Promise<string> {
    const res = await this.request(`/radar.svg${query({ strategy })}`);
    if (!res.ok) throw new ApiError(res.status, "error", res.statusText);
    return res.text();
  }

  async postAssessment(record: AssessmentPayload, expectedVersion: number): Promise<PostResult> {
    const res = await this.request("/assessments", {
      method: "POST",
      headers: {
        "Content-Type": "application/json",
        "X-Expected-Version": String(expectedVersion),
      },
      body: JSON.stringify(record),
    });
    const body = await res.json().catch(() => ({}));
    if (res.ok) {
      return { kind: "accepted", stored: body.stored, currentVersion: body.current_version };
    }
    if (res.status === 409) {
      // both header races and pinned-version mismatches resolve the same way:
      // reload the latest state, then let the assessor resubmit
      return { kind: "conflict", code: body.error, currentVersion: body.current_version };
    }
    return {
      kind: "rejected",
      status: res.status,
      code: body.error ?? "error",
      message: body.message ?? res.statusText,
      field: body.field,
    };
  }
}

/*
  In-memory double of the review service, faithful to its HTTP contract:
  X-State-Version on every response (errors included), X-Expected-Version
  checked under the same rules, and canned documents swapped in as posts land
  so tests never compute scores client-side either.
*/

import type {
  AssessmentPayload,
  CaseDocument,
  QueueEntry,
  RollupDocument,
  RubricDoc,
} from "../src/api.js";

export interface Stage {
  rollup: RollupDocument;
  queue: QueueEntry[];
  radarSvg: string;
}

function claim(
  id: string,
  parent: string | null,
  children: string[],
  text: string,
  family: string | null,
): CaseDocument["claims"][number] {
  return {
    id,
    parent,
    children,
    text,
    family,
    poc: "Dana Flores",
    status: "narrated",
    justification_narrative: children.length ? "Argued through the children below." : "Backed by the linked artifact.",
    limitations: [],
    counter_arguments: [],
  };
}

export function fakeCase(): CaseDocument {
  return {
    version: 1,
    scope: {
      application: "Pilot shuttle service",
      assumptions: ["Dry roads"],
      environment: "Fenced campus loop",
      system_description: "Low-speed shuttle",
    },
    claims: [
      claim("1", null, ["1.1", "1.2"], "The shuttle is acceptably safe for the pilot.", null),
      claim("1.1", "1", ["1.1.1"], "Hazards in scope are covered.", "Coverage Claims"),
      claim("1.1.1", "1.1", [], "The hazard log is complete for the loop.", "Coverage Claims"),
      claim("1.2", "1", [], "Evaluation evidence is credible.", "Confidence Claims"),
    ],
    evidence: [
      {
        id: "EV-1",
        title: "Hazard log",
        kind: "procedural",
        uri: "docs/hazlog.md",
        owner: "Dana Flores",
        owner_affiliated: true,
        created: "2026-05-01",
        last_review: "2026-07-01",
        exists: true,
        active_confirmed: true,
        approvals_documented: true,
        controlled_environment: true,
        flagged_major_revision: false,
        partially_outdated_flagged: false,
        revision_history_documented: true,
      },
    ],
    links: [{ claim_id: "1.1.1", evidence_id: "EV-1", note: "Reviewed quarterly." }],
  };
}

function rollupDoc(values: Record<string, [string | null, string | null, RollupDocument["nodes"][number]["source"]]>, register: RollupDocument["low_score_register"] = []): RollupDocument {
  return {
    case_version: 1,
    strategy: "conservative_min",
    threshold: 2,
    nodes: Object.entries(values).map(([claim_id, [procedural, implementation, source]]) => ({
      claim_id,
      procedural,
      implementation,
      source,
      contributing_children: [],
      overridden_dimensions: [],
    })),
    low_score_register: register,
    warnings: [],
  };
}

const unassessed = (id: string): QueueEntry => ({
  claim_id: id,
  reason: "unassessed",
  detail: "no recorded assessment",
});

/** Nothing assessed yet; then 1.1.1 scored 0/1; then 1.2 scored 2/2. */
export function defaultStages(): Stage[] {
  return [
    {
      rollup: rollupDoc({
        "1": [null, null, "children"],
        "1.1": [null, null, "children"],
        "1.1.1": [null, null, "direct"],
        "1.2": [null, null, "direct"],
      }),
      queue: [unassessed("1"), unassessed("1.1"), unassessed("1.1.1"), unassessed("1.2")],
      radarSvg: "<svg><text>stage 0</text></svg>",
    },
    {
      // a 0 on the leaf pulls every ancestor to 0 under conservative_min
      rollup: rollupDoc(
        {
          "1": ["0", "1", "children"],
          "1.1": ["0", "1", "children"],
          "1.1.1": ["0", "1", "direct"],
          "1.2": [null, null, "direct"],
        },
        [{ claim_id: "1.1.1", dimension: "procedural", score: 0 }],
      ),
      queue: [
        unassessed("1"),
        unassessed("1.1"),
        unassessed("1.2"),
        { claim_id: "1.1.1", reason: "below_threshold", detail: "procedural=0" },
      ],
      radarSvg: "<svg><text>stage 1</text></svg>",
    },
    {
      rollup: rollupDoc(
        {
          "1": ["0", "1", "children"],
          "1.1": ["0", "1", "children"],
          "1.1.1": ["0", "1", "direct"],
          "1.2": ["2", "2", "direct"],
        },
        [{ claim_id: "1.1.1", dimension: "procedural", score: 0 }],
      ),
      queue: [
        unassessed("1"),
        unassessed("1.1"),
        { claim_id: "1.1.1", reason: "below_threshold", detail: "procedural=0" },
      ],
      radarSvg: "<svg><text>stage 2</text></svg>",
    },
  ];
}

export class FakeService {
  version: number;
  posted: AssessmentPayload[] = [];
  requests: string[] = [];
  /** When set, the next POST is refused with this status/body once. */
  rejectNext: { status: number; body: Record<string, unknown> } | null = null;

  constructor(
    readonly caseDoc: CaseDocument = fakeCase(),
    readonly rubric: RubricDoc = { procedural: {}, implementation: {} },
    readonly stages: Stage[] = defaultStages(),
    startVersion = 7,
  ) {
    this.version = startVersion;
  }

  private stage(): Stage {
    return this.stages[Math.min(this.posted.length, this.stages.length - 1)];
  }

  private respond(status: number, body: unknown, contentType = "application/json"): Response {
    const text = typeof body === "string" ? body : JSON.stringify(body);
    return new Response(text, {
      status,
      headers: { "Content-Type": contentType, "X-State-Version": String(this.version) },
    });
  }

  fetch = async (input: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    this.requests.push(`${method} ${input}`);
    const [path] = input.split("?");

    if (method === "POST" && path === "/assessments") {
      const headers = new Headers(init?.headers);
      const raw = headers.get("X-Expected-Version");
      if (raw === null)
        return this.respond(400, { error: "missing_expected_version", message: "X-Expected-Version header is required" });
      if (this.rejectNext) {
        const { status, body } = this.rejectNext;
        this.rejectNext = null;
        return this.respond(status, body);
      }
      if (Number(raw) !== this.version)
        return this.respond(409, { error: "version_conflict", current_version: this.version });
      const record = JSON.parse(String(init?.body)) as AssessmentPayload;
      this.posted.push(record);
      this.version += 1;
      return this.respond(200, { stored: { ...record, stale: false }, current_version: this.version });
    }

    switch (path) {
      case "/case":
        return this.respond(200, this.caseDoc);
      case "/rollup":
        return this.respond(200, this.stage().rollup);
      case "/queue":
        return this.respond(200, this.stage().queue);
      case "/rubric":
        return this.respond(200, this.rubric);
      case "/radar.svg":
        return this.respond(200, this.stage().radarSvg, "image/svg+xml");
      default:
        return this.respond(404, { error: "not_found", message: `unknown path ${path}` });
    }
  };
}

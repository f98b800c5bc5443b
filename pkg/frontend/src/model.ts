/*
  Pure view-model helpers. Everything here derives from service responses;
  nothing computes scores or roll-ups locally.
*/

import type {
  AssessmentPayload,
  CaseDocument,
  Claim,
  Dimension,
  EvidenceItem,
  QueueEntry,
  RollupDocument,
  RubricCell,
  RubricDoc,
} from "./api.js";

export function claimIndex(doc: CaseDocument): Map<string, Claim> {
  return new Map(doc.claims.map((c) => [c.id, c]));
}

export function rootId(doc: CaseDocument): string {
  const root = doc.claims.find((c) => c.parent === null);
  if (!root) throw new Error("case has no root claim");
  return root.id;
}

/** Ancestors of a claim, nearest parent first; empty for the root. */
export function ancestorsOf(doc: CaseDocument, id: string): string[] {
  const byId = claimIndex(doc);
  const chain: string[] = [];
  let cur = byId.get(id)?.parent ?? null;
  while (cur !== null) {
    chain.push(cur);
    cur = byId.get(cur)?.parent ?? null;
  }
  return chain;
}

export interface TreeRow {
  id: string;
  depth: number;
  text: string;
  family: string | null;
  hasChildren: boolean;
  expanded: boolean;
  selected: boolean;
}

/**
 * Pre-order rows of the claim tree, skipping subtrees under collapsed nodes.
 * The root is always visible, so collapse-all leaves exactly one row.
 */
export function visibleRows(
  doc: CaseDocument,
  expanded: ReadonlySet<string>,
  selected: string | null,
): TreeRow[] {
  const byId = claimIndex(doc);
  const rows: TreeRow[] = [];
  const walk = (id: string, depth: number) => {
    const claim = byId.get(id);
    if (!claim) return;
    const isOpen = expanded.has(id);
    rows.push({
      id,
      depth,
      text: claim.text,
      family: claim.family,
      hasChildren: claim.children.length > 0,
      expanded: isOpen,
      selected: id === selected,
    });
    if (isOpen) {
      for (const child of claim.children) walk(child, depth + 1);
    }
  };
  walk(rootId(doc), 0);
  return rows;
}

/** Expansion set that makes a deep-linked claim visible and openable. */
export function expandFor(doc: CaseDocument, id: string): Set<string> {
  return new Set([id, ...ancestorsOf(doc, id)]);
}

export function allParentIds(doc: CaseDocument): Set<string> {
  return new Set(doc.claims.filter((c) => c.children.length > 0).map((c) => c.id));
}

export interface Badge {
  kind: "stale" | "unassessed" | "scored";
  procedural: string;
  implementation: string;
  source: string;
}

/**
 * Per-node status badge. The queue decides the flag (stale beats unassessed);
 * effective values always come from the server roll-up, whatever the flag.
 */
export function badgeFor(
  id: string,
  rollup: RollupDocument | null,
  queue: readonly QueueEntry[],
): Badge {
  const node = rollup?.nodes.find((n) => n.claim_id === id);
  const queued = queue.find((e) => e.claim_id === id);
  const kind =
    queued?.reason === "stale" ? "stale" : queued?.reason === "unassessed" ? "unassessed" : "scored";
  return {
    kind,
    procedural: node?.procedural ?? "-",
    implementation: node?.implementation ?? "-",
    source: node?.source ?? "-",
  };
}

export interface LinkedEvidence {
  evidence: EvidenceItem;
  note: string | null;
}

export function evidenceForClaim(doc: CaseDocument, id: string): LinkedEvidence[] {
  const byId = new Map(doc.evidence.map((e) => [e.id, e]));
  const out: LinkedEvidence[] = [];
  for (const link of doc.links) {
    if (link.claim_id !== id) continue;
    const item = byId.get(link.evidence_id);
    if (item) out.push({ evidence: item, note: link.note });
  }
  return out;
}

export function rubricCell(
  rubric: RubricDoc | null,
  dim: Dimension,
  level: number,
): RubricCell | null {
  return rubric?.[dim]?.[String(level)] ?? null;
}

// -- score entry form --------------------------------------------------------

export interface FormState {
  summary: string;
  assessors: string;
  procedural: number | null;
  implementation: number | null;
  proceduralNa: boolean;
  implementationNa: boolean;
  naJustification: string;
}

export function emptyForm(): FormState {
  return {
    summary: "",
    assessors: "",
    procedural: null,
    implementation: null,
    proceduralNa: false,
    implementationNa: false,
    naJustification: "",
  };
}

export function parseAssessors(raw: string): string[] {
  return raw
    .split(",")
    .map((name) => name.trim())
    .filter((name) => name.length > 0);
}

/**
 * Mirror of the server's record invariants, used only to gate the submit
 * button; the server remains the validator of record and its rejections are
 * shown verbatim.
 */
export function formIssues(form: FormState): string[] {
  const issues: string[] = [];
  for (const dim of ["procedural", "implementation"] as const) {
    const score = form[dim];
    const na = dim === "procedural" ? form.proceduralNa : form.implementationNa;
    if (na && score !== null) issues.push(`${dim}: clear the score or the N/A mark`);
    if (!na && score === null) issues.push(`${dim}: pick a level or mark N/A`);
    if (score !== null && (!Number.isInteger(score) || score < 0 || score > 3))
      issues.push(`${dim}: level must be 0..3`);
  }
  if ((form.proceduralNa || form.implementationNa) && !form.naJustification.trim())
    issues.push("N/A needs a written justification");
  if (!form.summary.trim()) issues.push("summary is required");
  if (parseAssessors(form.assessors).length === 0) issues.push("name at least one assessor");
  return issues;
}

export function buildRecord(
  form: FormState,
  claimId: string,
  caseVersion: number,
  assessedAt: string,
): AssessmentPayload {
  return {
    claim_id: claimId,
    summary: form.summary,
    assessor: parseAssessors(form.assessors),
    assessed_at: assessedAt,
    case_version: caseVersion,
    procedural: form.proceduralNa ? null : form.procedural,
    implementation: form.implementationNa ? null : form.implementation,
    procedural_na: form.proceduralNa,
    implementation_na: form.implementationNa,
    na_justification:
      form.proceduralNa || form.implementationNa ? form.naJustification : null,
  };
}

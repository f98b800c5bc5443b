/*
  Session state for one workbench tab.

  All data panels hold the latest server responses; a successful score
  submission refetches the live panels (roll-up, queue, radar) in place, so
  the page never reloads. A version conflict parks the form and asks the
  assessor to refresh before resubmitting.
*/

import type {
  CaseDocument,
  QueueEntry,
  RollupDocument,
  RubricDoc,
  Strategy,
  WorkbenchClient,
} from "./api.js";
import { ApiError } from "./api.js";
import {
  allParentIds,
  buildRecord,
  emptyForm,
  expandFor,
  formIssues,
  type FormState,
} from "./model.js";

export interface Banner {
  kind: "unreachable" | "rejected";
  text: string;
}

export interface ConflictInfo {
  currentVersion: number;
}

export interface StoreState {
  caseDoc: CaseDocument | null;
  rollup: RollupDocument | null;
  queue: QueueEntry[];
  rubric: RubricDoc | null;
  radarSvg: string;
  version: number;
  selected: string | null;
  expanded: Set<string>;
  form: FormState;
  strategy: Strategy;
  conflict: ConflictInfo | null;
  banner: Banner | null;
  lastStored: string | null;
}

export class WorkbenchStore {
  state: StoreState = {
    caseDoc: null,
    rollup: null,
    queue: [],
    rubric: null,
    radarSvg: "",
    version: 0,
    selected: null,
    expanded: new Set(),
    form: emptyForm(),
    strategy: "conservative_min",
    conflict: null,
    banner: null,
    lastStored: null,
  };

  onChange: () => void = () => {};

  constructor(private readonly client: WorkbenchClient) {}

  private emit(): void {
    this.onChange();
  }

  private fail(err: unknown): void {
    if (err instanceof ApiError) {
      this.state.banner = { kind: "rejected", text: `${err.code}: ${err.message}` };
    } else {
      this.state.banner = { kind: "unreachable", text: "service unreachable; is `casekit serve` running?" };
    }
    this.emit();
  }

  async initialize(): Promise<void> {
    try {
      const caseDoc = await this.client.getCase();
      this.state.caseDoc = caseDoc;
      this.state.expanded = allParentIds(caseDoc);
      this.state.rubric = await this.client.getRubric();
      await this.refreshLive();
      this.state.banner = null;
    } catch (err) {
      this.fail(err);
      return;
    }
    this.emit();
  }

  /** Refetch the panels that move as assessments land. No reload, no cache. */
  async refreshLive(): Promise<void> {
    this.state.rollup = await this.client.getRollup(this.state.strategy);
    this.state.queue = await this.client.getQueue();
    this.state.radarSvg = await this.client.getRadarSvg(this.state.strategy);
    // GET responses carry the state version too, so a refresh is enough to
    // catch up after someone else wrote
    this.state.version = this.client.version ?? this.state.version;
    this.emit();
  }

  select(id: string): void {
    if (!this.state.caseDoc?.claims.some((c) => c.id === id)) return;
    this.state.selected = id;
    this.state.form = emptyForm();
    this.emit();
  }

  /** Deep link: expand the chain down to the claim, then focus it. */
  deepLink(id: string): void {
    if (!this.state.caseDoc) return;
    for (const node of expandFor(this.state.caseDoc, id)) this.state.expanded.add(node);
    this.select(id);
  }

  toggle(id: string): void {
    if (this.state.expanded.has(id)) this.state.expanded.delete(id);
    else this.state.expanded.add(id);
    this.emit();
  }

  collapseAll(): void {
    this.state.expanded = new Set();
    this.emit();
  }

  async setStrategy(strategy: Strategy): Promise<void> {
    this.state.strategy = strategy;
    try {
      await this.refreshLive();
    } catch (err) {
      this.fail(err);
    }
  }

  patchForm(patch: Partial<FormState>): void {
    this.state.form = { ...this.state.form, ...patch };
    this.emit();
  }

  issues(): string[] {
    return formIssues(this.state.form);
  }

  async submit(assessedAt: string): Promise<void> {
    const { caseDoc, selected } = this.state;
    if (!caseDoc || !selected || this.issues().length > 0) return;
    const record = buildRecord(this.state.form, selected, caseDoc.version, assessedAt);
    let result;
    try {
      result = await this.client.postAssessment(record, this.state.version);
    } catch (err) {
      this.fail(err);
      return;
    }
    if (result.kind === "accepted") {
      this.state.version = result.currentVersion;
      this.state.form = emptyForm();
      this.state.conflict = null;
      this.state.banner = null;
      this.state.lastStored = result.stored.claim_id;
      try {
        await this.refreshLive();
      } catch (err) {
        this.fail(err);
      }
    } else if (result.kind === "conflict") {
      this.state.conflict = { currentVersion: result.currentVersion };
      this.emit();
    } else {
      // the server names the offending field; show its words, not ours
      const where = result.field ? ` (${result.field})` : "";
      this.state.banner = { kind: "rejected", text: `${result.code}${where}: ${result.message}` };
      this.emit();
    }
  }

  /** Conflict dialog action: pull the latest state, keep the typed entry. */
  async reloadAfterConflict(): Promise<void> {
    try {
      await this.refreshLive();
    } catch (err) {
      this.fail(err);
      return;
    }
    this.state.conflict = null;
    this.emit();
  }
}

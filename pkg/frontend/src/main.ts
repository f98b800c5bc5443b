/*
  DOM wiring for the workbench. All state lives in the store; this file only
  paints it and forwards events. Served by `casekit serve --ui-dir`.
*/

import { WorkbenchClient, type Dimension, type Strategy } from "./api.js";
import {
  badgeFor,
  claimIndex,
  evidenceForClaim,
  rubricCell,
  visibleRows,
} from "./model.js";
import { WorkbenchStore } from "./store.js";

const store = new WorkbenchStore(new WorkbenchClient(""));

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

// -- tree ---------------------------------------------------------------------

function renderTree(): void {
  const box = byId("tree");
  box.textContent = "";
  const { caseDoc, expanded, selected, rollup, queue } = store.state;
  if (!caseDoc) return;
  for (const row of visibleRows(caseDoc, expanded, selected)) {
    const line = el("div", "tree-row" + (row.selected ? " selected" : ""));
    line.style.paddingLeft = `${row.depth * 18 + 6}px`;
    line.dataset.claim = row.id;

    const twisty = el("span", "twisty", row.hasChildren ? (row.expanded ? "▾" : "▸") : "·");
    if (row.hasChildren) twisty.dataset.toggle = row.id;
    line.appendChild(twisty);

    line.appendChild(el("span", "claim-id", row.id));
    const badge = badgeFor(row.id, rollup, queue);
    const chip = el("span", `chip chip-${badge.kind}`, badge.kind === "scored" ? `${badge.procedural} / ${badge.implementation}` : badge.kind);
    chip.title = `procedural ${badge.procedural}, implementation ${badge.implementation} (${badge.source})`;
    line.appendChild(chip);
    if (row.family) line.appendChild(el("span", "family-tag", row.family));
    line.appendChild(el("span", "claim-text", row.text));
    box.appendChild(line);
  }
}

// -- detail + score form --------------------------------------------------------

function renderDetail(): void {
  const box = byId("detail");
  box.textContent = "";
  const { caseDoc, selected } = store.state;
  if (!caseDoc || !selected) {
    box.appendChild(el("p", "muted", "Select a claim to read it and enter a score."));
    return;
  }
  const claim = claimIndex(caseDoc).get(selected);
  if (!claim) return;

  const head = el("div", "detail-head");
  head.appendChild(el("span", "claim-id", claim.id));
  head.appendChild(el("span", "status-tag", claim.status));
  if (claim.family) head.appendChild(el("span", "family-tag", claim.family));
  if (claim.poc) head.appendChild(el("span", "muted", `POC: ${claim.poc}`));
  box.appendChild(head);
  box.appendChild(el("p", "claim-full", claim.text));

  if (claim.justification_narrative) {
    box.appendChild(el("h3", undefined, "Justification narrative"));
    box.appendChild(el("p", undefined, claim.justification_narrative));
  }

  if (claim.counter_arguments.length) {
    box.appendChild(el("h3", undefined, "Counter-arguments"));
    for (const ca of claim.counter_arguments) {
      const item = el("div", "counter");
      item.appendChild(el("p", "counter-text", ca.text));
      item.appendChild(el("p", "counter-rejection", `Rejected: ${ca.rejection}`));
      if (ca.rejection_evidence.length)
        item.appendChild(el("p", "muted", `Cited: ${ca.rejection_evidence.join(", ")}`));
      box.appendChild(item);
    }
  }

  if (claim.limitations.length) {
    box.appendChild(el("h3", undefined, "Limitations"));
    const ul = el("ul");
    for (const lim of claim.limitations) ul.appendChild(el("li", undefined, lim));
    box.appendChild(ul);
  }

  const linked = evidenceForClaim(caseDoc, selected);
  if (linked.length) {
    box.appendChild(el("h3", undefined, "Linked evidence"));
    for (const { evidence, note } of linked) {
      const item = el("div", "evidence");
      const head = el("div");
      head.appendChild(el("span", "claim-id", evidence.id));
      head.appendChild(el("span", "kind-tag", evidence.kind));
      head.appendChild(el("span", undefined, evidence.title));
      item.appendChild(head);
      const meta: string[] = [evidence.uri];
      if (evidence.owner) meta.push(`owner ${evidence.owner}`);
      meta.push(evidence.last_review ? `reviewed ${evidence.last_review}` : `created ${evidence.created}`);
      item.appendChild(el("div", "muted", meta.join(" · ")));
      if (note) item.appendChild(el("div", "muted", note));
      box.appendChild(item);
    }
  }
}

function levelButtons(dim: Dimension): HTMLElement {
  const wrap = el("div", "levels");
  const { form } = store.state;
  const picked = dim === "procedural" ? form.procedural : form.implementation;
  const na = dim === "procedural" ? form.proceduralNa : form.implementationNa;
  for (let level = 0; level <= 3; level++) {
    const btn = el("button", "level" + (picked === level && !na ? " picked" : ""), String(level));
    btn.dataset.dim = dim;
    btn.dataset.level = String(level);
    (btn as HTMLButtonElement).type = "button";
    wrap.appendChild(btn);
  }
  const naBtn = el("button", "level na" + (na ? " picked" : ""), "N/A");
  naBtn.dataset.dim = dim;
  naBtn.dataset.na = "1";
  (naBtn as HTMLButtonElement).type = "button";
  wrap.appendChild(naBtn);
  return wrap;
}

function renderForm(): void {
  const box = byId("score-form");
  box.textContent = "";
  const { selected, form } = store.state;
  if (!selected) return;

  box.appendChild(el("h3", undefined, `Score ${selected}`));
  for (const dim of ["procedural", "implementation"] as const) {
    const row = el("div", "form-row");
    row.appendChild(el("label", undefined, dim));
    row.appendChild(levelButtons(dim));
    box.appendChild(row);
  }
  box.appendChild(el("div", "rubric-hint muted", "Hover a level to read the rubric cell."));
  const rubricBox = el("div", "rubric-cell");
  rubricBox.id = "rubric-cell";
  box.appendChild(rubricBox);

  const summary = el("textarea") as HTMLTextAreaElement;
  summary.id = "f-summary";
  summary.placeholder = "Assessment summary (required)";
  summary.value = form.summary;
  box.appendChild(summary);

  const assessors = el("input") as HTMLInputElement;
  assessors.id = "f-assessors";
  assessors.placeholder = "Assessor name(s), comma-separated";
  assessors.value = form.assessors;
  box.appendChild(assessors);

  if (form.proceduralNa || form.implementationNa) {
    const just = el("textarea") as HTMLTextAreaElement;
    just.id = "f-na";
    just.placeholder = "Why is the dimension not applicable? (required)";
    just.value = form.naJustification;
    box.appendChild(just);
  }

  const issues = store.issues();
  if (issues.length) {
    const ul = el("ul", "issues");
    for (const issue of issues) ul.appendChild(el("li", undefined, issue));
    box.appendChild(ul);
  }

  const submit = el("button", "submit", "Submit score") as HTMLButtonElement;
  submit.id = "f-submit";
  submit.type = "button";
  submit.disabled = issues.length > 0;
  box.appendChild(submit);
}

// -- live panels ----------------------------------------------------------------

function renderRollup(): void {
  const box = byId("rollup");
  box.textContent = "";
  const { caseDoc, rollup } = store.state;
  if (!caseDoc || !rollup) return;
  const table = el("table");
  const head = el("tr");
  for (const title of ["claim", "procedural", "implementation", "source"])
    head.appendChild(el("th", undefined, title));
  table.appendChild(head);
  for (const node of rollup.nodes) {
    const tr = el("tr");
    tr.appendChild(el("td", "claim-id", node.claim_id));
    tr.appendChild(el("td", undefined, node.procedural ?? "-"));
    tr.appendChild(el("td", undefined, node.implementation ?? "-"));
    tr.appendChild(el("td", "muted", node.source));
    table.appendChild(tr);
  }
  box.appendChild(table);
  if (rollup.low_score_register.length) {
    box.appendChild(el("h3", undefined, "Low-score register"));
    const ul = el("ul");
    for (const entry of rollup.low_score_register)
      ul.appendChild(el("li", undefined, `${entry.claim_id} ${entry.dimension}=${entry.score}`));
    box.appendChild(ul);
  }
  for (const warning of rollup.warnings) box.appendChild(el("p", "warning", warning));
}

function renderQueue(): void {
  const box = byId("queue");
  box.textContent = "";
  // ordering (stale, then unassessed, then below threshold) is the service's
  // policy; the panel keeps whatever order arrives
  for (const entry of store.state.queue) {
    const line = el("div", "queue-row");
    line.dataset.claim = entry.claim_id;
    line.appendChild(el("span", `chip chip-${entry.reason}`, entry.reason.replace("_", " ")));
    line.appendChild(el("span", "claim-id", entry.claim_id));
    line.appendChild(el("span", "muted", entry.detail));
    box.appendChild(line);
  }
  if (!store.state.queue.length) box.appendChild(el("p", "muted", "Queue is empty; nothing needs attention."));
}

function renderChrome(): void {
  const { caseDoc, version, banner, conflict } = store.state;
  byId("case-title").textContent = caseDoc ? caseDoc.scope.application : "no case loaded";
  byId("version-pill").textContent = `v${version}`;

  const bannerBox = byId("banner");
  bannerBox.textContent = banner ? banner.text : "";
  bannerBox.className = banner ? `banner banner-${banner.kind}` : "banner hidden";

  const dialog = byId("conflict");
  dialog.classList.toggle("hidden", conflict === null);
  if (conflict)
    byId("conflict-text").textContent =
      `Someone else updated the session (now at v${conflict.currentVersion}). ` +
      "Refresh to load their work; your entry is kept for resubmission.";

  byId("radar").innerHTML = store.state.radarSvg;
  (byId("strategy") as HTMLSelectElement).value = store.state.strategy;
}

function render(): void {
  renderChrome();
  renderTree();
  renderDetail();
  renderForm();
  renderRollup();
  renderQueue();
}

// -- events -----------------------------------------------------------------------

function claimFromHash(): string | null {
  const match = /#claim=([^&]+)/.exec(location.hash);
  return match ? decodeURIComponent(match[1]) : null;
}

function wire(): void {
  store.onChange = render;

  byId("tree").addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const toggle = target.closest<HTMLElement>("[data-toggle]");
    if (toggle?.dataset.toggle) {
      store.toggle(toggle.dataset.toggle);
      ev.stopPropagation();
      return;
    }
    const row = target.closest<HTMLElement>("[data-claim]");
    if (row?.dataset.claim) {
      location.hash = `claim=${encodeURIComponent(row.dataset.claim)}`;
      store.select(row.dataset.claim);
    }
  });

  byId("queue").addEventListener("click", (ev) => {
    const row = (ev.target as HTMLElement).closest<HTMLElement>("[data-claim]");
    if (row?.dataset.claim) store.deepLink(row.dataset.claim);
  });

  byId("collapse-all").addEventListener("click", () => store.collapseAll());

  byId("strategy").addEventListener("change", (ev) => {
    void store.setStrategy((ev.target as HTMLSelectElement).value as Strategy);
  });

  const form = byId("score-form");
  form.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    if (target.id === "f-submit") {
      void store.submit(new Date().toISOString().slice(0, 10));
      return;
    }
    const dim = target.dataset.dim as Dimension | undefined;
    if (!dim) return;
    if (target.dataset.na) {
      if (dim === "procedural")
        store.patchForm({ proceduralNa: !store.state.form.proceduralNa, procedural: null });
      else
        store.patchForm({ implementationNa: !store.state.form.implementationNa, implementation: null });
    } else if (target.dataset.level !== undefined) {
      const patch =
        dim === "procedural"
          ? { procedural: Number(target.dataset.level), proceduralNa: false }
          : { implementation: Number(target.dataset.level), implementationNa: false };
      store.patchForm(patch);
    }
  });

  // rubric text is fetched, never transcribed here: the hover panel shows the
  // exact cell the service returned
  form.addEventListener("mouseover", (ev) => {
    const target = (ev.target as HTMLElement).closest<HTMLElement>("[data-level]");
    const cellBox = document.getElementById("rubric-cell");
    if (!cellBox) return;
    if (!target?.dataset.dim || target.dataset.level === undefined) return;
    const cell = rubricCell(store.state.rubric, target.dataset.dim as Dimension, Number(target.dataset.level));
    cellBox.textContent = "";
    if (cell) {
      cellBox.appendChild(el("div", "rubric-title", `${cell.title} (level ${target.dataset.level})`));
      cellBox.appendChild(el("div", "rubric-guidance", cell.guidance));
    }
  });

  form.addEventListener("input", (ev) => {
    const target = ev.target as HTMLInputElement | HTMLTextAreaElement;
    if (target.id === "f-summary") store.state.form.summary = target.value;
    if (target.id === "f-assessors") store.state.form.assessors = target.value;
    if (target.id === "f-na") store.state.form.naJustification = target.value;
    const submit = document.getElementById("f-submit") as HTMLButtonElement | null;
    if (submit) submit.disabled = store.issues().length > 0;
  });

  byId("conflict-refresh").addEventListener("click", () => void store.reloadAfterConflict());

  window.addEventListener("hashchange", () => {
    const id = claimFromHash();
    if (id) store.deepLink(id);
  });
}

async function start(): Promise<void> {
  wire();
  await store.initialize();
  const id = claimFromHash();
  if (id) store.deepLink(id);
}

void start();

// Lineage timeline: every applied step with its change counts, drift
// verdicts (fetched per step from /drift), undo/redo controls, and export
// actions. Steps past the cursor are the redo tail — shown grayed.

import type { StepEval } from "../state.js";
import type { DriftReport, SessionSummary } from "../types.js";
import { dataValue, esc, shortId, show, specLabel } from "./html.js";

function stepDriftLine(report: DriftReport | undefined): string {
  if (!report) return "";
  const flagged = report.entries.filter(
    (e) => e.kind !== "structural" && e.drifted,
  );
  const structural = report.entries.filter((e) => e.kind === "structural");
  const bits: string[] = [];
  if (flagged.length) {
    bits.push(
      `<span class="drifted">drifted: ${flagged
        .map((e) => esc(e.column))
        .join(", ")}</span>`,
    );
  }
  if (structural.length) {
    bits.push(
      `<span class="structural">schema: ${structural
        .map((e) => esc(e.column))
        .join(", ")}</span>`,
    );
  }
  if (!bits.length) bits.push(`<span class="no-drift">no drift</span>`);
  return `<p class="step-drift">${bits.join(" · ")}</p>`;
}

export interface TimelineFlags {
  canUndo: boolean;
  canRedo: boolean;
  busy: boolean;
  stepEval?: Record<string, StepEval>;
}

function stepEvalLine(i: number, ev: StepEval | undefined): string {
  if (!ev) {
    return (
      `<button class="step-eval" data-step="${i}">model Δ…</button>`
    );
  }
  return (
    `<p class="step-eval-line">${esc(ev.metric)}: ` +
    `<span data-step-eval="before" data-value="${dataValue(ev.before)}">${show(ev.before)}</span>` +
    ` → <span data-step-eval="after" data-value="${dataValue(ev.after)}">${show(ev.after)}</span></p>`
  );
}

export function renderTimeline(
  summary: SessionSummary,
  stepDrift: Record<string, DriftReport>,
  flags: TimelineFlags,
): string {
  const stepEval = flags.stepEval ?? {};
  const steps = summary.lineage
    .map((step, i) => {
      const beyond = i >= summary.cursor;
      const counts =
        `${step.cells_changed} cells · ${step.rows_removed} rows ` +
        `· ${step.cols_removed} cols removed`;
      return (
        `<li class="step${beyond ? " beyond-cursor" : ""}" data-step="${i}" ` +
        `data-output="${esc(step.output)}">` +
        `<span class="spec">${specLabel(step.spec)}</span>` +
        `<span class="counts">${counts}</span>` +
        `<span class="snap">${shortId(step.input)} → ${shortId(step.output)}</span>` +
        stepDriftLine(stepDrift[step.output]) +
        stepEvalLine(i, stepEval[step.output]) +
        `</li>`
      );
    })
    .join("");
  const undoAttr = flags.canUndo && !flags.busy ? "" : " disabled";
  const redoAttr = flags.canRedo && !flags.busy ? "" : " disabled";
  return (
    `<div class="timeline" data-cursor="${summary.cursor}">` +
    `<div class="controls">` +
    `<button class="undo"${undoAttr}>Undo</button>` +
    `<button class="redo"${redoAttr}>Redo</button>` +
    `<button class="export-csv">Export CSV</button>` +
    `<button class="export-script">Export script</button>` +
    `</div>` +
    `<p class="position">at <code>${shortId(summary.current_snapshot)}</code>, ` +
    `step ${summary.cursor} of ${summary.lineage.length}</p>` +
    (steps
      ? `<ol class="steps">${steps}</ol>`
      : `<p class="empty">No steps applied yet.</p>`) +
    `</div>`
  );
}

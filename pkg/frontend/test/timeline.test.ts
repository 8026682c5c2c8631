import { describe, expect, it } from "vitest";

import { renderTimeline } from "../src/render/timeline.js";
import type {
  ApplyResponse,
  DriftReport,
  SessionCreated,
  UndoRedoResponse,
} from "../src/types.js";
import { fixture } from "./helpers.js";

const created = fixture<SessionCreated>("session_created.json");
const applied = fixture<ApplyResponse>("apply_ok.json");
const undone = fixture<UndoRedoResponse>("undo.json");
const drift = fixture<DriftReport>("drift_root_current.json");

describe("lineage timeline", () => {
  it("fresh session: empty timeline, undo and redo disabled", () => {
    const html = renderTimeline(created.session, {}, {
      canUndo: false,
      canRedo: false,
      busy: false,
    });
    expect(html).toContain("No steps applied yet.");
    expect(html).toContain('<button class="undo" disabled>');
    expect(html).toContain('<button class="redo" disabled>');
    expect(html).toContain("step 0 of 0");
  });

  it("after an apply: one step with the payload's change counts", () => {
    const html = renderTimeline(applied.session, {}, {
      canUndo: true,
      canRedo: false,
      busy: false,
    });
    const step = applied.session.lineage[0];
    if (!step) throw new Error("fixture has no lineage step");
    expect(html).toContain('data-step="0"');
    expect(html).not.toContain("beyond-cursor");
    expect(html).toContain(
      `${step.cells_changed} cells · ${step.rows_removed} rows`,
    );
    expect(html).toContain(`data-output="${step.output}"`);
    expect(html).toContain('<button class="undo">');
    expect(html).toContain("step 1 of 1");
  });

  it("after an undo: the step is grayed beyond the cursor", () => {
    const html = renderTimeline(undone.session, {}, {
      canUndo: false,
      canRedo: true,
      busy: false,
    });
    expect(undone.session.cursor).toBe(0);
    expect(html).toContain('class="step beyond-cursor"');
    expect(html).toContain('<button class="redo">');
    expect(html).toContain('<button class="undo" disabled>');
  });

  it("step drift verdicts come from the recorded /drift payload", () => {
    const step = applied.session.lineage[0];
    if (!step) throw new Error("fixture has no lineage step");
    const html = renderTimeline(
      applied.session,
      { [step.output]: drift },
      { canUndo: true, canRedo: false, busy: false },
    );
    const anyDrifted = drift.entries.some(
      (e) => e.kind !== "structural" && e.drifted,
    );
    expect(html).toContain(anyDrifted ? 'class="drifted"' : "no drift");
  });

  it("busy sessions freeze the history controls", () => {
    const html = renderTimeline(applied.session, {}, {
      canUndo: true,
      canRedo: true,
      busy: true,
    });
    expect(html).toContain('<button class="undo" disabled>');
    expect(html).toContain('<button class="redo" disabled>');
  });

  it("renders stably (snapshot)", () => {
    const step = applied.session.lineage[0];
    const html = renderTimeline(
      applied.session,
      step ? { [step.output]: drift } : {},
      { canUndo: true, canRedo: false, busy: false },
    );
    expect(html).toMatchSnapshot();
  });
});

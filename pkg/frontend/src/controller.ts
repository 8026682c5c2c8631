// Orchestration: the controller owns a ViewState, talks to the ApiClient,
// and hands complete page HTML to an injected `host` sink after every state
// change. No DOM access here — the browser entry point supplies the sink,
// tests supply a capturing one.
//
// Concurrency discipline (mirrors the state reducer):
//   * mutations (apply/undo/redo) are attempted only when canMutate says so;
//   * every mutation is followed by an optimistic refresh of the report and
//     the candidate ranking;
//   * a 409 is surfaced as the stale prompt and never retried — the user's
//     Refresh click is the only way forward.

import { ApiClient, ApiError } from "./api.js";
import { renderCandidates } from "./render/candidates.js";
import { renderDashboard } from "./render/dashboard.js";
import { renderTimeline } from "./render/timeline.js";
import {
  canMutate,
  canRedo,
  canUndo,
  initialState,
  reduce,
  type Event,
  type ViewState,
} from "./state.js";
import type {
  ProcedureSpec,
  RankingWeights,
  SessionSummary,
} from "./types.js";

export type HtmlSink = (html: string) => void;

function configWeights(summary: SessionSummary): RankingWeights | null {
  const cfg = summary.config;
  if (!cfg || typeof cfg !== "object") return null;
  const w = (cfg as Record<string, unknown>).ranking_weights;
  if (!w || typeof w !== "object") return null;
  const r = w as Record<string, unknown>;
  if (
    typeof r.dq === "number" &&
    typeof r.perf === "number" &&
    typeof r.drift === "number"
  ) {
    return { dq: r.dq, perf: r.perf, drift: r.drift };
  }
  return null;
}

export function renderPage(state: ViewState): string {
  if (!state.summary || !state.report) {
    return `<div class="empty-state"><p>Upload a CSV to begin.</p></div>`;
  }
  const error = state.error
    ? `<div class="api-error" role="alert">error (${state.error.code}): ` +
      `${state.error.message.replace(/</g, "&lt;")}</div>`
    : "";
  const dashboard = renderDashboard(
    state.report,
    state.selectedColumn,
    state.selectedColumn
      ? state.columnStats[state.selectedColumn]
      : undefined,
  );
  const candidates = state.candidates
    ? renderCandidates(state.candidates, state.weights, {
        busy: state.inFlight,
        stale: state.stale,
      })
    : "";
  const timeline = renderTimeline(state.summary, state.stepDrift, {
    canUndo: canUndo(state),
    canRedo: canRedo(state),
    busy: state.inFlight,
    stepEval: state.stepEval,
  });
  return `<main>${error}${dashboard}${candidates}${timeline}</main>`;
}

export class Controller {
  state: ViewState = initialState();

  constructor(
    private readonly client: ApiClient,
    private readonly host: HtmlSink,
  ) {}

  private dispatch(ev: Event): void {
    this.state = reduce(this.state, ev);
    this.host(renderPage(this.state));
  }

  private sessionId(): string {
    const s = this.state.summary;
    if (!s) throw new Error("no session loaded");
    return s.session_id;
  }

  async openCsv(
    csv: string,
    opts: { name?: string; label_column?: string } = {},
  ): Promise<void> {
    const created = await this.client.createSession({ csv, ...opts });
    this.dispatch({
      kind: "session_loaded",
      summary: created.session,
      report: created.report,
    });
    const w = configWeights(created.session);
    if (w) this.dispatch({ kind: "weights_changed", weights: w });
    await this.reloadCandidates();
    await this.fillStepDrift();
  }

  async loadSession(id: string): Promise<void> {
    const summary = await this.client.getSession(id);
    const report = await this.client.report(id);
    this.dispatch({ kind: "session_loaded", summary, report });
    const w = configWeights(summary);
    if (w) this.dispatch({ kind: "weights_changed", weights: w });
    await this.reloadCandidates();
    await this.fillStepDrift();
  }

  private async reloadCandidates(): Promise<void> {
    const s = this.state.summary;
    if (!s) return;
    const response = await this.client.candidates(
      s.session_id,
      s.current_snapshot,
      { weights: this.state.weights },
    );
    this.dispatch({ kind: "candidates_loaded", response });
  }

  private async fillStepDrift(): Promise<void> {
    const s = this.state.summary;
    if (!s) return;
    for (const step of s.lineage) {
      if (this.state.stepDrift[step.output]) continue;
      const report = await this.client.drift(
        s.session_id,
        step.input,
        step.output,
      );
      this.dispatch({
        kind: "step_drift_loaded",
        output: step.output,
        report,
      });
    }
  }

  async selectColumn(column: string | null): Promise<void> {
    this.dispatch({ kind: "column_selected", column });
    if (column && !this.state.columnStats[column]) {
      const stats = await this.client.columnStats(this.sessionId(), column);
      this.dispatch({ kind: "stats_loaded", stats });
    }
  }

  async setWeights(weights: RankingWeights): Promise<void> {
    this.dispatch({ kind: "weights_changed", weights });
    await this.reloadCandidates();
  }

  private async mutate(
    call: () => Promise<SessionSummary>,
  ): Promise<boolean> {
    if (!canMutate(this.state)) return false;
    this.dispatch({ kind: "mutation_started" });
    try {
      const summary = await call();
      this.dispatch({ kind: "mutation_succeeded", summary });
    } catch (err) {
      if (err instanceof ApiError) {
        this.dispatch({
          kind: "mutation_failed",
          status: err.status,
          code: err.code,
          message: err.message,
          detail: err.detail,
        });
        return false;
      }
      throw err;
    }
    // optimistic refresh: the report and the ranking are stale now
    const id = this.sessionId();
    const report = await this.client.report(id);
    this.dispatch({ kind: "report_loaded", report });
    await this.reloadCandidates();
    await this.fillStepDrift();
    return true;
  }

  apply(spec: ProcedureSpec): Promise<boolean> {
    // Always the snapshot on display — never a newer one the server might
    // have moved to behind our back.
    const s = this.state.summary;
    if (!s) return Promise.resolve(false);
    return this.mutate(async () => {
      const resp = await this.client.apply(
        s.session_id,
        s.current_snapshot,
        spec,
      );
      return resp.session;
    });
  }

  undo(): Promise<boolean> {
    if (!canUndo(this.state)) return Promise.resolve(false);
    return this.mutate(async () => {
      const resp = await this.client.undo(this.sessionId());
      return resp.session;
    });
  }

  redo(): Promise<boolean> {
    if (!canRedo(this.state)) return Promise.resolve(false);
    return this.mutate(async () => {
      const resp = await this.client.redo(this.sessionId());
      return resp.session;
    });
  }

  async refresh(): Promise<void> {
    const id = this.sessionId();
    const summary = await this.client.getSession(id);
    const report = await this.client.report(id);
    const candidates = await this.client.candidates(
      id,
      summary.current_snapshot,
      { weights: this.state.weights },
    );
    this.dispatch({ kind: "refresh_done", summary, report, candidates });
    await this.fillStepDrift();
  }

  /** Primary-metric readings around one lineage step, shown on demand in
   *  the timeline. Two /evaluate calls; the client subtracts nothing. */
  async stepEvalDelta(stepIndex: number): Promise<void> {
    const s = this.state.summary;
    const step = s?.lineage[stepIndex];
    if (!s || !step) return;
    try {
      const before = await this.client.evaluate(s.session_id, {
        snapshot_id: step.input,
      });
      const after = await this.client.evaluate(s.session_id, {
        snapshot_id: step.output,
      });
      const metric = after.primary_metric;
      this.dispatch({
        kind: "step_eval_loaded",
        output: step.output,
        eval: {
          metric,
          before: before.mean[metric] ?? NaN,
          after: after.mean[metric] ?? NaN,
        },
      });
    } catch (err) {
      if (err instanceof ApiError) {
        this.dispatch({
          kind: "error_shown",
          code: err.code,
          message: err.message,
        });
        return;
      }
      throw err;
    }
  }

  async evaluate(config?: Record<string, unknown>): Promise<void> {
    try {
      const report = await this.client.evaluate(
        this.sessionId(),
        config ? { config } : {},
      );
      this.dispatch({ kind: "eval_loaded", report });
    } catch (err) {
      if (err instanceof ApiError) {
        this.dispatch({
          kind: "error_shown",
          code: err.code,
          message: err.message,
        });
        return;
      }
      throw err;
    }
  }

  exportCsv(): Promise<string> {
    return this.client.exportCsv(this.sessionId());
  }

  async exportScript(): Promise<string> {
    const doc = await this.client.script(this.sessionId());
    this.dispatch({ kind: "script_loaded", script: doc });
    return JSON.stringify(doc, null, 2);
  }
}

// View state and its pure reducer. Every field that shows up on screen is
// either a verbatim API payload or plain UI input (slider positions,
// selected column). The reducer enforces the two safety rules the views
// rely on:
//
//   * one mutation at a time — `mutation_started` while a mutation is in
//     flight (or while the stale prompt is up) is refused, leaving the
//     state untouched;
//   * a 409 stale-snapshot answer switches the UI into a "please refresh"
//     mode that only `refresh_done` clears. There is no retry path.

import type {
  CandidatesResponse,
  ColumnStats,
  DriftReport,
  EvalReport,
  QualityReport,
  RankingWeights,
  ScriptDoc,
  SessionSummary,
} from "./types.js";

export interface StaleInfo {
  expected: string;
  current: string;
}

/** Primary-metric readings at a step's input and output snapshots, both
 *  taken verbatim from /evaluate responses. */
export interface StepEval {
  metric: string;
  before: number;
  after: number;
}

export interface UiError {
  code: string;
  message: string;
}

export interface ViewState {
  summary: SessionSummary | null;
  report: QualityReport | null;
  candidates: CandidatesResponse | null;
  weights: RankingWeights;
  selectedColumn: string | null;
  columnStats: Record<string, ColumnStats>;
  stepDrift: Record<string, DriftReport>;
  stepEval: Record<string, StepEval>;
  evalReport: EvalReport | null;
  script: ScriptDoc | null;
  inFlight: boolean;
  stale: StaleInfo | null;
  error: UiError | null;
}

export const DEFAULT_WEIGHTS: RankingWeights = { dq: 1, perf: 1, drift: 1 };

export function initialState(): ViewState {
  return {
    summary: null,
    report: null,
    candidates: null,
    weights: { ...DEFAULT_WEIGHTS },
    selectedColumn: null,
    columnStats: {},
    stepDrift: {},
    stepEval: {},
    evalReport: null,
    script: null,
    inFlight: false,
    stale: null,
    error: null,
  };
}

export type Event =
  | { kind: "session_loaded"; summary: SessionSummary; report: QualityReport }
  | { kind: "report_loaded"; report: QualityReport }
  | { kind: "candidates_loaded"; response: CandidatesResponse }
  | { kind: "stats_loaded"; stats: ColumnStats }
  | { kind: "column_selected"; column: string | null }
  | { kind: "weights_changed"; weights: RankingWeights }
  | { kind: "mutation_started" }
  | { kind: "mutation_succeeded"; summary: SessionSummary }
  | {
      kind: "mutation_failed";
      status: number;
      code: string;
      message: string;
      detail: unknown;
    }
  | {
      kind: "refresh_done";
      summary: SessionSummary;
      report: QualityReport;
      candidates: CandidatesResponse | null;
    }
  | { kind: "eval_loaded"; report: EvalReport }
  | { kind: "step_drift_loaded"; output: string; report: DriftReport }
  | { kind: "step_eval_loaded"; output: string; eval: StepEval }
  | { kind: "script_loaded"; script: ScriptDoc }
  | { kind: "error_shown"; code: string; message: string }
  | { kind: "error_cleared" };

export function canMutate(s: ViewState): boolean {
  return s.summary !== null && !s.inFlight && s.stale === null;
}

export function canUndo(s: ViewState): boolean {
  return canMutate(s) && s.summary !== null && s.summary.cursor > 0;
}

export function canRedo(s: ViewState): boolean {
  return (
    canMutate(s) &&
    s.summary !== null &&
    s.summary.cursor < s.summary.lineage.length
  );
}

function asStale(detail: unknown): StaleInfo | null {
  if (typeof detail !== "object" || detail === null) return null;
  const d = detail as Record<string, unknown>;
  if (typeof d.expected === "string" && typeof d.current === "string") {
    return { expected: d.expected, current: d.current };
  }
  return null;
}

export function reduce(s: ViewState, ev: Event): ViewState {
  switch (ev.kind) {
    case "session_loaded":
      return {
        ...initialState(),
        weights: s.weights,
        summary: ev.summary,
        report: ev.report,
      };
    case "report_loaded":
      return { ...s, report: ev.report };
    case "candidates_loaded":
      return { ...s, candidates: ev.response };
    case "stats_loaded":
      return {
        ...s,
        columnStats: { ...s.columnStats, [ev.stats.column]: ev.stats },
      };
    case "column_selected":
      return { ...s, selectedColumn: ev.column };
    case "weights_changed":
      return { ...s, weights: { ...ev.weights } };
    case "mutation_started":
      if (!canMutate(s)) return s; // refused: busy or stale
      return { ...s, inFlight: true, error: null };
    case "mutation_succeeded":
      return { ...s, inFlight: false, summary: ev.summary };
    case "mutation_failed": {
      const base = { ...s, inFlight: false };
      if (ev.status === 409) {
        return {
          ...base,
          stale: asStale(ev.detail) ?? {
            expected: "unknown",
            current: "unknown",
          },
        };
      }
      return { ...base, error: { code: ev.code, message: ev.message } };
    }
    case "refresh_done":
      return {
        ...s,
        stale: null,
        error: null,
        inFlight: false,
        summary: ev.summary,
        report: ev.report,
        candidates: ev.candidates,
      };
    case "eval_loaded":
      return { ...s, evalReport: ev.report };
    case "step_drift_loaded":
      return {
        ...s,
        stepDrift: { ...s.stepDrift, [ev.output]: ev.report },
      };
    case "step_eval_loaded":
      return {
        ...s,
        stepEval: { ...s.stepEval, [ev.output]: ev.eval },
      };
    case "script_loaded":
      return { ...s, script: ev.script };
    case "error_shown":
      return { ...s, error: { code: ev.code, message: ev.message } };
    case "error_cleared":
      return { ...s, error: null };
  }
}

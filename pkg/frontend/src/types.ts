// Shapes of the service's JSON payloads. The client displays these fields
// verbatim; nothing in the UI derives numbers the API didn't send.

export type DimensionName =
  | "completeness"
  | "uniqueness"
  | "validity"
  | "consistency"
  | "outlier_freedom";

export const DIMENSIONS: readonly DimensionName[] = [
  "completeness",
  "uniqueness",
  "validity",
  "consistency",
  "outlier_freedom",
];

export type Scores = Record<DimensionName, number | null> & {
  overall: number | null;
};

export interface ColumnSchema {
  name: string;
  dtype: string;
  declared_format: string | null;
  domain_rule: Record<string, unknown> | null;
}

export interface LineageStep {
  spec: ProcedureSpec;
  input: string;
  output: string;
  cells_changed: number;
  rows_removed: number;
  cols_removed: number;
}

export interface SessionSummary {
  session_id: string;
  root_snapshot: string;
  current_snapshot: string;
  cursor: number;
  n_rows: number;
  n_cols: number;
  label_column: string | null;
  columns: ColumnSchema[];
  config?: Record<string, unknown>;
  lineage: LineageStep[];
}

export interface ColumnIssues {
  missing_rows: number[];
  rule_violations: number[];
  outlier_flags: number[];
}

export interface QualityReport {
  snapshot_id: string;
  per_column: Record<string, { scores: Scores; issues: ColumnIssues }>;
  dataset: Scores;
  issues: {
    duplicate_groups: number[][];
    duplicate_group_of_row: Record<string, number>;
    rule_violations: number[];
  };
}

export interface ColumnStats {
  column: string;
  dtype: string;
  count: number;
  missing_count: number;
  distinct_count: number;
  top_k: { value: unknown; count: number }[];
  mean?: number;
  stddev?: number;
  min?: number;
  max?: number;
  q1?: number;
  q2?: number;
  q3?: number;
  histogram?: { edges: number[]; counts: number[] };
}

export interface ProcedureSpec {
  family: string;
  method: string;
  params: Record<string, unknown>;
  target: string[] | "all";
}

export interface KsEntry {
  kind: "ks";
  column: string;
  n1: number;
  n2: number;
  d_stat: number;
  p_value: number;
  drifted: boolean;
  alpha: number;
}

export interface CategoricalEntry {
  kind: "categorical";
  column: string;
  n1: number;
  n2: number;
  tvd: number;
  threshold: number;
  drifted: boolean;
}

export interface StructuralEntry {
  kind: "structural";
  column: string;
  reason: string;
}

export type DriftEntry = KsEntry | CategoricalEntry | StructuralEntry;

export interface ProcedureResult {
  spec: ProcedureSpec;
  input_snapshot: string;
  output_snapshot: string;
  cells_changed: number;
  rows_removed: number;
  cols_removed: number;
  changed_columns: string[];
  diagnostics: Record<string, unknown>;
}

export interface CandidatePreview {
  result: ProcedureResult;
  drift: DriftEntry[];
  quality: { before: Scores; after: Scores };
  eval: {
    metric: string;
    before: number;
    after: number;
    folds: number;
  } | null;
  eval_note?: string;
}

export interface Candidate {
  spec: ProcedureSpec;
  valid: boolean;
  score: number | null;
  dq_delta: number;
  perf_delta: number;
  perf_available: boolean;
  drift_penalty: number;
  preview: CandidatePreview | Record<string, never>;
  error: { code: string; message: string } | null;
}

export interface CandidatesResponse {
  candidates: Candidate[];
  snapshot_id: string;
}

export interface RankingWeights {
  dq: number;
  perf: number;
  drift: number;
}

export interface ApplyResponse {
  result: ProcedureResult;
  session: SessionSummary;
}

export interface UndoRedoResponse {
  undo?: string | null;
  redo?: string | null;
  session: SessionSummary;
}

export interface EvalReport {
  snapshot_id: string;
  config: Record<string, unknown>;
  task: string;
  rows_used: number;
  rows_dropped: number;
  dropped_rows: number[];
  classes: string[];
  per_fold: Record<string, number>[];
  mean: Record<string, number>;
  std: Record<string, number>;
  primary_metric: string;
}

export interface DriftReport {
  from: string;
  to: string;
  entries: DriftEntry[];
}

export interface ScriptDoc {
  version: number;
  root_snapshot: string;
  final_snapshot: string;
  label_column: string | null;
  type_hints: Record<string, string>;
  specs: ProcedureSpec[];
}

export interface ApiErrorBody {
  error: { code: string; message: string; detail: unknown };
}

export interface SessionCreated {
  session: SessionSummary;
  report: QualityReport;
  warnings: { row: number; column: string; message: string }[];
}

// Thin typed wrapper over the service's HTTP API. `fetch` is injected so
// tests can replay recorded payloads; the browser entry point passes the
// real one. Every non-2xx response is raised as ApiError carrying the
// service's error envelope, so callers can branch on `code` (and the
// controller can treat 409/stale_snapshot specially).

import type {
  ApplyResponse,
  CandidatesResponse,
  ColumnStats,
  DriftReport,
  EvalReport,
  ProcedureSpec,
  QualityReport,
  RankingWeights,
  ScriptDoc,
  SessionCreated,
  SessionSummary,
  UndoRedoResponse,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: {
    method?: string;
    headers?: Record<string, string>;
    body?: string;
  },
) => Promise<{
  status: number;
  ok: boolean;
  json(): Promise<unknown>;
  text(): Promise<string>;
}>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail: unknown = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function raiseEnvelope(resp: {
  status: number;
  json(): Promise<unknown>;
}): Promise<never> {
  let code = "http_error";
  let message = `request failed with status ${resp.status}`;
  let detail: unknown = null;
  try {
    const body = (await resp.json()) as {
      error?: { code?: string; message?: string; detail?: unknown };
    };
    if (body && body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
      detail = body.error.detail ?? null;
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  throw new ApiError(resp.status, code, message, detail);
}

export interface CreateSessionRequest {
  csv: string;
  name?: string;
  label_column?: string;
  delimiter?: string;
  na_tokens?: string[];
  type_hints?: Record<string, string>;
  config?: Record<string, unknown>;
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: Parameters<FetchLike>[1] = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.base + path, init);
    if (!resp.ok) await raiseEnvelope(resp);
    return (await resp.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/health");
  }

  procedureSchema(): Promise<
    Record<string, Record<string, Record<string, unknown>>>
  > {
    return this.request("GET", "/procedures/schema");
  }

  createSession(req: CreateSessionRequest): Promise<SessionCreated> {
    return this.request("POST", "/sessions", req);
  }

  getSession(id: string): Promise<SessionSummary> {
    return this.request("GET", `/sessions/${id}`);
  }

  listSessions(): Promise<{ sessions: SessionSummary[] }> {
    return this.request("GET", "/sessions");
  }

  report(id: string, snapshot?: string): Promise<QualityReport> {
    const q = snapshot ? `?snapshot=${encodeURIComponent(snapshot)}` : "";
    return this.request("GET", `/sessions/${id}/report${q}`);
  }

  columnStats(
    id: string,
    column: string,
    snapshot?: string,
  ): Promise<ColumnStats> {
    const q = snapshot ? `?snapshot=${encodeURIComponent(snapshot)}` : "";
    return this.request(
      "GET",
      `/sessions/${id}/columns/${encodeURIComponent(column)}/stats${q}`,
    );
  }

  candidates(
    id: string,
    snapshotId: string,
    opts: { specs?: ProcedureSpec[]; weights?: RankingWeights } = {},
  ): Promise<CandidatesResponse> {
    const body: Record<string, unknown> = { snapshot_id: snapshotId };
    if (opts.specs) body.specs = opts.specs;
    if (opts.weights) body.weights = opts.weights;
    return this.request("POST", `/sessions/${id}/candidates`, body);
  }

  apply(
    id: string,
    snapshotId: string,
    spec: ProcedureSpec,
  ): Promise<ApplyResponse> {
    return this.request("POST", `/sessions/${id}/apply`, {
      snapshot_id: snapshotId,
      spec,
    });
  }

  undo(id: string): Promise<UndoRedoResponse> {
    return this.request("POST", `/sessions/${id}/undo`);
  }

  redo(id: string): Promise<UndoRedoResponse> {
    return this.request("POST", `/sessions/${id}/redo`);
  }

  evaluate(
    id: string,
    body: { snapshot_id?: string; config?: Record<string, unknown> } = {},
  ): Promise<EvalReport> {
    return this.request("POST", `/sessions/${id}/evaluate`, body);
  }

  drift(id: string, from?: string, to?: string): Promise<DriftReport> {
    const params = new URLSearchParams();
    if (from) params.set("from", from);
    if (to) params.set("to", to);
    const q = params.toString();
    return this.request("GET", `/sessions/${id}/drift${q ? "?" + q : ""}`);
  }

  script(id: string): Promise<ScriptDoc> {
    return this.request("GET", `/sessions/${id}/script`);
  }

  async exportCsv(id: string, snapshot?: string): Promise<string> {
    const q = snapshot ? `?snapshot=${encodeURIComponent(snapshot)}` : "";
    const resp = await this.fetchFn(
      `${this.base}/sessions/${id}/export.csv${q}`,
      { method: "GET" },
    );
    if (!resp.ok) await raiseEnvelope(resp);
    return resp.text();
  }
}

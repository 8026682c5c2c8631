// Candidate panel: ranked repair proposals with their score decomposition,
// per-column drift verdicts, and an Apply button bound to the snapshot the
// panel was computed for. Weight sliders re-rank via the API; the client
// never recombines the component deltas itself.

import type {
  Candidate,
  CandidatesResponse,
  DriftEntry,
  RankingWeights,
} from "../types.js";
import { dataValue, esc, show, specLabel } from "./html.js";

function driftBadges(entries: DriftEntry[]): string {
  const badges = entries
    .map((e) => {
      if (e.kind === "structural") {
        return (
          `<span class="drift structural" data-drift-col="${esc(e.column)}">` +
          `${esc(e.column)}: ${esc(e.reason)}</span>`
        );
      }
      const flag = e.drifted ? "drifted" : "ok";
      const measure =
        e.kind === "ks"
          ? `D=${show(e.d_stat)} p=${show(e.p_value)}`
          : `tvd=${show(e.tvd)}`;
      return (
        `<span class="drift ${flag}" data-drift-col="${esc(e.column)}" ` +
        `data-drifted="${e.drifted}">${esc(e.column)}: ${measure} ${flag}</span>`
      );
    })
    .join(" ");
  return badges ? `<div class="drift-flags">${badges}</div>` : "";
}

function decomposition(c: Candidate): string {
  const perf = c.perf_available
    ? `<dd data-part="perf_delta" data-value="${dataValue(c.perf_delta)}">${show(c.perf_delta)}</dd>`
    : `<dd data-part="perf_delta" class="unavailable">n/a</dd>`;
  return (
    `<dl class="decomposition">` +
    `<dt>quality Δ</dt><dd data-part="dq_delta" data-value="${dataValue(c.dq_delta)}">${show(c.dq_delta)}</dd>` +
    `<dt>model Δ</dt>${perf}` +
    `<dt>drift penalty</dt><dd data-part="drift_penalty" data-value="${dataValue(c.drift_penalty)}">${show(c.drift_penalty)}</dd>` +
    `</dl>`
  );
}

function card(c: Candidate, rank: number, busy: boolean): string {
  const spec = JSON.stringify(c.spec);
  if (!c.valid) {
    return (
      `<article class="candidate invalid" data-rank="${rank}" data-spec="${esc(spec)}">` +
      `<h3>${specLabel(c.spec)}</h3>` +
      `<p class="error">rejected (${esc(c.error?.code ?? "invalid")}): ` +
      `${esc(c.error?.message ?? "")}</p></article>`
    );
  }
  const preview = "result" in c.preview ? c.preview : null;
  const changes = preview
    ? `<p class="changes">${preview.result.cells_changed} cells changed, ` +
      `${preview.result.rows_removed} rows removed</p>`
    : "";
  const evalLine = preview?.eval
    ? `<p class="eval">${esc(preview.eval.metric)}: ` +
      `<span data-eval="before" data-value="${dataValue(preview.eval.before)}">${show(preview.eval.before)}</span>` +
      ` → <span data-eval="after" data-value="${dataValue(preview.eval.after)}">${show(preview.eval.after)}</span>` +
      ` (${preview.eval.folds} folds)</p>`
    : preview?.eval_note
      ? `<p class="eval note">${esc(preview.eval_note)}</p>`
      : "";
  return (
    `<article class="candidate" data-rank="${rank}" data-spec="${esc(spec)}">` +
    `<h3>${specLabel(c.spec)}</h3>` +
    `<p class="score">score <strong data-value="${dataValue(c.score)}">${show(c.score)}</strong></p>` +
    decomposition(c) +
    changes +
    evalLine +
    (preview ? driftBadges(preview.drift) : "") +
    `<button class="apply" data-spec="${esc(spec)}"${busy ? " disabled" : ""}>Apply</button>` +
    `</article>`
  );
}

function slider(name: keyof RankingWeights, value: number): string {
  return (
    `<label class="weight">${name}` +
    `<input type="range" min="0" max="5" step="0.1" name="w-${name}" ` +
    `value="${value}" data-weight="${name}">` +
    `<output data-weight-value="${name}">${value}</output></label>`
  );
}

export interface CandidatePanelFlags {
  busy: boolean; // a mutation is in flight: disable Apply
  stale: { expected: string; current: string } | null;
}

export function renderCandidates(
  response: CandidatesResponse,
  weights: RankingWeights,
  flags: CandidatePanelFlags,
): string {
  const staleBanner = flags.stale
    ? `<div class="stale-prompt" role="alert">` +
      `<p>This view was computed against snapshot ` +
      `<code>${esc(flags.stale.expected.slice(0, 12))}</code> but the session ` +
      `has moved to <code>${esc(flags.stale.current.slice(0, 12))}</code>. ` +
      `Refresh to continue; nothing was applied.</p>` +
      `<button class="refresh">Refresh</button></div>`
    : "";
  const disabled = flags.busy || flags.stale !== null;
  const cards = response.candidates
    .map((c, i) => card(c, i, disabled))
    .join("");
  return (
    `<div class="candidate-panel" data-snapshot="${esc(response.snapshot_id)}">` +
    staleBanner +
    `<form class="weights">` +
    slider("dq", weights.dq) +
    slider("perf", weights.perf) +
    slider("drift", weights.drift) +
    `</form>` +
    `<div class="cards">${cards}</div>` +
    `</div>`
  );
}

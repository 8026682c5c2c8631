// Quality dashboard: dataset dimension summary, per-column score table,
// issue drill-downs, and the selected column's stats/histogram. All numbers
// come straight from the /report and /stats payloads.

import type { ColumnStats, QualityReport } from "../types.js";
import { DIMENSIONS } from "../types.js";
import { dataValue, esc, show } from "./html.js";

function scoreCell(
  col: string | null,
  dim: string,
  value: number | null,
): string {
  const where = col === null ? `data-dim="${esc(dim)}"` :
    `data-col="${esc(col)}" data-dim="${esc(dim)}"`;
  return `<td class="score" ${where} data-value="${dataValue(value)}">` +
    `${show(value)}</td>`;
}

function datasetSummary(report: QualityReport): string {
  const rows = [...DIMENSIONS, "overall" as const]
    .map((dim) => {
      const value = report.dataset[dim];
      const bar =
        value === null
          ? ""
          : `<span class="bar" style="width:${Math.round(value * 100)}%"></span>`;
      return (
        `<tr><th scope="row">${esc(dim)}</th>` +
        scoreCell(null, dim, value) +
        `<td class="meter">${bar}</td></tr>`
      );
    })
    .join("");
  return (
    `<section class="dataset-scores" data-snapshot="${esc(report.snapshot_id)}">` +
    `<h2>Dataset quality</h2><table><tbody>${rows}</tbody></table></section>`
  );
}

function columnTable(report: QualityReport, selected: string | null): string {
  const head = DIMENSIONS.map((d) => `<th>${esc(d)}</th>`).join("");
  const body = Object.entries(report.per_column)
    .map(([col, entry]) => {
      const cells = DIMENSIONS.map((dim) =>
        scoreCell(col, dim, entry.scores[dim]),
      ).join("");
      const cls = col === selected ? ' class="selected"' : "";
      return (
        `<tr${cls} data-col-row="${esc(col)}">` +
        `<th scope="row"><button class="pick-column" data-column="${esc(col)}">` +
        `${esc(col)}</button></th>${cells}</tr>`
      );
    })
    .join("");
  return (
    `<section class="column-scores"><h2>Per-column scores</h2>` +
    `<table><thead><tr><th>column</th>${head}</tr></thead>` +
    `<tbody>${body}</tbody></table></section>`
  );
}

function issueList(title: string, cls: string, body: string): string {
  return `<details class="${cls}"><summary>${esc(title)}</summary>${body}</details>`;
}

function issuesSection(report: QualityReport): string {
  const groups = report.issues.duplicate_groups;
  const dupBody = groups.length
    ? `<ul>${groups
        .map(
          (g, i) =>
            `<li data-dup-group="${i}">rows ${g
              .map((r) => `<span class="row-ref">${r}</span>`)
              .join(", ")}</li>`,
        )
        .join("")}</ul>`
    : "<p>none</p>";

  const ruleRows = report.issues.rule_violations;
  const ruleBody = ruleRows.length
    ? `<p>rows ${ruleRows
        .map((r) => `<span class="row-ref" data-rule-row="${r}">${r}</span>`)
        .join(", ")}</p>`
    : "<p>none</p>";

  const perCol = Object.entries(report.per_column)
    .map(([col, entry]) => {
      const it = entry.issues;
      const parts: string[] = [];
      if (it.missing_rows.length) {
        parts.push(
          `<span class="missing" data-missing-count="${it.missing_rows.length}">` +
            `missing: rows ${it.missing_rows.join(", ")}</span>`,
        );
      }
      if (it.rule_violations.length) {
        parts.push(`rule violations: rows ${it.rule_violations.join(", ")}`);
      }
      if (it.outlier_flags.length) {
        parts.push(
          `<span class="outliers" data-outlier-count="${it.outlier_flags.length}">` +
            `outliers: rows ${it.outlier_flags.join(", ")}</span>`,
        );
      }
      return parts.length
        ? `<li data-issues-col="${esc(col)}"><strong>${esc(col)}</strong> ${parts.join(
            " · ",
          )}</li>`
        : "";
    })
    .filter((s) => s !== "")
    .join("");

  return (
    `<section class="issues"><h2>Issues</h2>` +
    issueList(`Duplicate groups (${groups.length})`, "duplicates", dupBody) +
    issueList(
      `Rule violations (${ruleRows.length})`,
      "rule-violations",
      ruleBody,
    ) +
    issueList(
      "Per-column findings",
      "column-issues",
      perCol ? `<ul>${perCol}</ul>` : "<p>none</p>",
    ) +
    `</section>`
  );
}

function histogram(stats: ColumnStats): string {
  if (!stats.histogram) return "";
  const { edges, counts } = stats.histogram;
  const peak = Math.max(...counts, 1);
  const bars = counts
    .map((c, i) => {
      const lo = edges[i];
      const hi = edges[i + 1];
      return (
        `<div class="hbar" data-bin="${i}" data-count="${c}" ` +
        `title="[${lo}, ${hi}): ${c}" ` +
        `style="height:${Math.round((c / peak) * 100)}%"></div>`
      );
    })
    .join("");
  return `<div class="histogram" data-bins="${counts.length}">${bars}</div>`;
}

function statsPanel(stats: ColumnStats | undefined): string {
  if (!stats) return "";
  const numericRows = (
    ["mean", "stddev", "min", "max", "q1", "q2", "q3"] as const
  )
    .filter((k) => stats[k] !== undefined)
    .map(
      (k) =>
        `<tr><th scope="row">${k}</th><td data-stat="${k}" ` +
        `data-value="${dataValue(stats[k])}">${show(stats[k])}</td></tr>`,
    )
    .join("");
  const topK = stats.top_k
    .map(
      (t) =>
        `<li data-top-value="${dataValue(t.value)}">${show(t.value)} × ${t.count}</li>`,
    )
    .join("");
  return (
    `<section class="column-detail" data-column="${esc(stats.column)}">` +
    `<h2>${esc(stats.column)} <small>${esc(stats.dtype)}</small></h2>` +
    `<table><tbody>` +
    `<tr><th scope="row">observed</th><td data-stat="count" data-value="${dataValue(stats.count)}">${stats.count}</td></tr>` +
    `<tr><th scope="row">missing</th><td data-stat="missing_count" data-value="${dataValue(stats.missing_count)}">${stats.missing_count}</td></tr>` +
    `<tr><th scope="row">distinct</th><td data-stat="distinct_count" data-value="${dataValue(stats.distinct_count)}">${stats.distinct_count}</td></tr>` +
    numericRows +
    `</tbody></table>` +
    histogram(stats) +
    (topK ? `<ol class="top-k">${topK}</ol>` : "") +
    `</section>`
  );
}

export function renderDashboard(
  report: QualityReport,
  selected: string | null,
  stats: ColumnStats | undefined,
): string {
  return (
    `<div class="dashboard">` +
    datasetSummary(report) +
    columnTable(report, selected) +
    issuesSection(report) +
    statsPanel(stats) +
    `</div>`
  );
}

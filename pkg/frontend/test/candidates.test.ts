import { describe, expect, it } from "vitest";

import { renderCandidates } from "../src/render/candidates.js";
import type { CandidatesResponse } from "../src/types.js";
import { attrValues, fixture, unescapeHtml } from "./helpers.js";

const defaultDoc = fixture<CandidatesResponse>("candidates_default.json");
const weights = { dq: 1, perf: 1, drift: 1 };
const calm = { busy: false, stale: null };

function cardSpecs(html: string): unknown[] {
  const specs: unknown[] = [];
  const re = /<article class="candidate[^"]*" data-rank="\d+" data-spec="([^"]*)"/g;
  for (const m of html.matchAll(re)) specs.push(JSON.parse(unescapeHtml(m[1] ?? "")));
  return specs;
}

describe("candidate panel is a pass-through of /candidates", () => {
  const html = renderCandidates(defaultDoc, weights, calm);

  it("card order equals the payload order", () => {
    expect(cardSpecs(html)).toStrictEqual(
      defaultDoc.candidates.map((c) => c.spec),
    );
    const ranks = attrValues(html, "rank").map(Number);
    expect(ranks).toStrictEqual(defaultDoc.candidates.map((_, i) => i));
  });

  it("score and decomposition values equal the payload", () => {
    for (const c of defaultDoc.candidates) {
      if (!c.valid) continue;
      expect(html).toContain(
        `<strong data-value="${JSON.stringify(c.score)}">`,
      );
      expect(html).toContain(
        `data-part="dq_delta" data-value="${JSON.stringify(c.dq_delta)}"`,
      );
      expect(html).toContain(
        `data-part="drift_penalty" data-value="${JSON.stringify(c.drift_penalty)}"`,
      );
      if (c.perf_available) {
        expect(html).toContain(
          `data-part="perf_delta" data-value="${JSON.stringify(c.perf_delta)}"`,
        );
      }
    }
  });

  it("shows per-column drift verdicts from each preview", () => {
    const first = defaultDoc.candidates[0];
    expect(first?.valid).toBe(true);
    if (!first || !("result" in first.preview)) throw new Error("no preview");
    for (const entry of first.preview.drift) {
      expect(html).toContain(`data-drift-col="${entry.column}"`);
    }
  });

  it("eval before/after are payload values", () => {
    const withEval = defaultDoc.candidates.find(
      (c) => c.valid && "result" in c.preview && c.preview.eval,
    );
    expect(withEval).toBeDefined();
    const ev = withEval && "result" in withEval.preview
      ? withEval.preview.eval
      : null;
    expect(html).toContain(
      `data-eval="before" data-value="${JSON.stringify(ev?.before)}"`,
    );
    expect(html).toContain(
      `data-eval="after" data-value="${JSON.stringify(ev?.after)}"`,
    );
  });

  it("apply buttons carry the exact spec and the panel's snapshot", () => {
    expect(html).toContain(
      `data-snapshot="${defaultDoc.snapshot_id}"`,
    );
    const buttons = [
      ...html.matchAll(/<button class="apply" data-spec="([^"]*)"/g),
    ].map((m) => JSON.parse(unescapeHtml(m[1] ?? "")));
    expect(buttons).toStrictEqual(
      defaultDoc.candidates.filter((c) => c.valid).map((c) => c.spec),
    );
  });

  it("invalid candidates render rejected with the error code", () => {
    const invalidDoc: CandidatesResponse = {
      snapshot_id: defaultDoc.snapshot_id,
      candidates: [
        ...defaultDoc.candidates,
        {
          spec: {
            family: "impute",
            method: "mean",
            params: {},
            target: ["ghost"],
          },
          valid: false,
          score: null,
          dq_delta: 0,
          perf_delta: 0,
          perf_available: false,
          drift_penalty: 0,
          preview: {},
          error: {
            code: "unknown_column",
            message: "no column named 'ghost'",
          },
        },
      ],
    };
    const h = renderCandidates(invalidDoc, weights, calm);
    expect(h).toContain('class="candidate invalid"');
    expect(h).toContain("rejected (unknown_column)");
    expect(h).toContain("no column named &#39;ghost&#39;");
  });

  it("in-flight mutations disable every apply button", () => {
    const busyHtml = renderCandidates(defaultDoc, weights, {
      busy: true,
      stale: null,
    });
    const all = busyHtml.match(/<button class="apply"[^>]*>/g) ?? [];
    expect(all.length).toBeGreaterThan(0);
    for (const b of all) expect(b).toContain(" disabled");
  });

  it("the stale prompt names both snapshots and offers only Refresh", () => {
    const staleHtml = renderCandidates(defaultDoc, weights, {
      busy: false,
      stale: { expected: "aaaa1111bbbb2222", current: "cccc3333dddd4444" },
    });
    expect(staleHtml).toContain('class="stale-prompt"');
    expect(staleHtml).toContain("aaaa1111bbbb");
    expect(staleHtml).toContain("cccc3333dddd");
    expect(staleHtml).toContain('<button class="refresh">Refresh</button>');
    expect(staleHtml).not.toContain("retry");
    for (const b of staleHtml.match(/<button class="apply"[^>]*>/g) ?? []) {
      expect(b).toContain(" disabled");
    }
  });

  it("weight sliders reflect the current positions", () => {
    const h = renderCandidates(defaultDoc, { dq: 2.5, perf: 0, drift: 1 }, calm);
    expect(h).toContain('value="2.5" data-weight="dq"');
    expect(h).toContain('value="0" data-weight="perf"');
    expect(h).toContain('value="1" data-weight="drift"');
  });

  it("renders stably (snapshot)", () => {
    expect(html).toMatchSnapshot();
  });
});

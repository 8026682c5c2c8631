// Test plumbing: fixture loading and a scripted fetch.
//
// Fixtures under test/fixtures/ are genuine API responses captured from the
// in-process service by record_fixtures.py. The scripted fetch replays them
// in expectation order, records every request it saw, and fails fast on a
// call the script didn't anticipate — so a silent retry or a skipped
// refresh shows up as a hard test failure, not a green pass.

import { readFileSync } from "node:fs";
import type { FetchLike } from "../src/api.js";

export function fixture<T = unknown>(name: string): T {
  const url = new URL(`./fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf8")) as T;
}

export function fixtureText(name: string): string {
  return readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8");
}

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
}

export interface ScriptedResponse {
  /** substring or regex the request path must match */
  match: string | RegExp;
  method?: string;
  status?: number;
  json?: unknown;
  text?: string;
}

export interface ScriptedFetch {
  fetch: FetchLike;
  calls: RecordedCall[];
  /** throws unless every scripted response was consumed */
  assertDone(): void;
}

export function scriptedFetch(script: ScriptedResponse[]): ScriptedFetch {
  const queue = [...script];
  const calls: RecordedCall[] = [];
  const fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const body = init?.body ? JSON.parse(init.body) : undefined;
    calls.push({ method, path, body });
    const next = queue.shift();
    if (!next) {
      throw new Error(`unexpected request: ${method} ${path}`);
    }
    const matches =
      typeof next.match === "string"
        ? path.includes(next.match)
        : next.match.test(path);
    if (!matches || (next.method && next.method !== method)) {
      throw new Error(
        `request ${method} ${path} does not match scripted ` +
          `${next.method ?? "GET"} ${String(next.match)}`,
      );
    }
    const status = next.status ?? 200;
    return {
      status,
      ok: status >= 200 && status < 300,
      json: async () => next.json,
      text: async () => next.text ?? JSON.stringify(next.json),
    };
  };
  return {
    fetch,
    calls,
    assertDone() {
      if (queue.length) {
        throw new Error(
          `${queue.length} scripted response(s) never requested; next: ` +
            String(queue[0]?.match),
        );
      }
    },
  };
}

const ENTITIES: Record<string, string> = {
  "&amp;": "&",
  "&lt;": "<",
  "&gt;": ">",
  "&quot;": '"',
  "&#39;": "'",
};

export function unescapeHtml(text: string): string {
  return text.replace(/&(?:amp|lt|gt|quot|#39);/g, (m) => ENTITIES[m] ?? m);
}

/** Pull every `data-<attr>="…"` value out of an HTML string, in order. */
export function attrValues(html: string, attr: string): string[] {
  const re = new RegExp(`data-${attr}="([^"]*)"`, "g");
  const out: string[] = [];
  for (const m of html.matchAll(re)) out.push(unescapeHtml(m[1] ?? ""));
  return out;
}

// Browser entry point: binds the controller to the DOM with real fetch.
// All interaction is event delegation over the controller-rendered HTML,
// plus the static upload form in index.html.

import { ApiClient } from "./api.js";
import { Controller } from "./controller.js";
import type { ProcedureSpec, RankingWeights } from "./types.js";

function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return (fromQuery ?? "http://127.0.0.1:8000").replace(/\/$/, "");
}

function download(filename: string, text: string, type: string): void {
  const url = URL.createObjectURL(new Blob([text], { type }));
  const a = document.createElement("a");
  a.href = url;
  a.download = filename;
  a.click();
  URL.revokeObjectURL(url);
}

function currentWeights(root: HTMLElement): RankingWeights {
  const read = (name: string, fallback: number): number => {
    const el = root.querySelector<HTMLInputElement>(
      `input[data-weight="${name}"]`,
    );
    const v = el ? Number(el.value) : NaN;
    return Number.isFinite(v) ? v : fallback;
  };
  return { dq: read("dq", 1), perf: read("perf", 1), drift: read("drift", 1) };
}

function main(): void {
  const app = document.getElementById("app");
  const status = document.getElementById("status");
  if (!app || !status) throw new Error("index.html is missing #app/#status");

  const client = new ApiClient(apiBase(), (url, init) => fetch(url, init));
  const controller = new Controller(client, (html) => {
    app.innerHTML = html;
  });

  const report = (err: unknown): void => {
    status.textContent = err instanceof Error ? err.message : String(err);
  };
  const run = (p: Promise<unknown>): void => {
    status.textContent = "";
    p.catch(report);
  };

  const uploadForm = document.getElementById("upload") as HTMLFormElement;
  uploadForm.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const fileInput = document.getElementById("csv") as HTMLInputElement;
    const labelInput = document.getElementById("label") as HTMLInputElement;
    const file = fileInput.files?.[0];
    if (!file) return;
    run(
      file.text().then((csv) =>
        controller.openCsv(csv, {
          name: file.name,
          ...(labelInput.value ? { label_column: labelInput.value } : {}),
        }),
      ),
    );
  });

  app.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const button = target.closest("button");
    if (!button) return;
    if (button.classList.contains("apply")) {
      const spec = JSON.parse(button.dataset.spec ?? "{}") as ProcedureSpec;
      run(controller.apply(spec));
    } else if (button.classList.contains("undo")) {
      run(controller.undo());
    } else if (button.classList.contains("redo")) {
      run(controller.redo());
    } else if (button.classList.contains("refresh")) {
      run(controller.refresh());
    } else if (button.classList.contains("pick-column")) {
      run(controller.selectColumn(button.dataset.column ?? null));
    } else if (button.classList.contains("step-eval")) {
      run(controller.stepEvalDelta(Number(button.dataset.step)));
    } else if (button.classList.contains("export-csv")) {
      run(
        controller
          .exportCsv()
          .then((text) => download("export.csv", text, "text/csv")),
      );
    } else if (button.classList.contains("export-script")) {
      run(
        controller
          .exportScript()
          .then((text) =>
            download("script.json", text, "application/json"),
          ),
      );
    }
  });

  let weightTimer: ReturnType<typeof setTimeout> | undefined;
  app.addEventListener("input", (ev) => {
    const target = ev.target as HTMLInputElement;
    if (!target.dataset.weight) return;
    const out = app.querySelector(
      `output[data-weight-value="${target.dataset.weight}"]`,
    );
    if (out) out.textContent = target.value;
    clearTimeout(weightTimer);
    const weights = currentWeights(app);
    weightTimer = setTimeout(() => run(controller.setWeights(weights)), 250);
  });
}

main();

// String-building helpers for the render functions. Views return plain HTML
// strings, which keeps them pure and lets tests assert on them without a
// browser.
//
// Numbers are printed with String(), i.e. the shortest representation that
// round-trips to the same double — the value the API sent, not a prettied
// approximation. Cells additionally carry the JSON encoding of their source
// field in a `data-value` attribute so fidelity tests can compare payloads
// byte-for-byte after a JSON round-trip.

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function show(v: unknown): string {
  if (v === null || v === undefined) return "–"; // en dash: not scored
  if (typeof v === "string") return esc(v);
  if (typeof v === "boolean") return v ? "yes" : "no";
  return esc(String(v));
}

// JSON-encode a payload value for a data attribute.
export function dataValue(v: unknown): string {
  return esc(JSON.stringify(v === undefined ? null : v));
}

export function shortId(snapshot: string): string {
  return esc(snapshot.slice(0, 12));
}

export function specLabel(spec: {
  family: string;
  method: string;
  target: string[] | "all";
}): string {
  const target =
    spec.target === "all" ? "all columns" : spec.target.join(", ");
  return `${esc(spec.family)}/${esc(spec.method)} → ${esc(target)}`;
}

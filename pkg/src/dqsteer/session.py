"""Interactive improvement sessions: lineage, previews, ranking, undo/redo.

A session holds a content-addressed snapshot store and an ordered list of
applied procedure results with a cursor for undo/redo.  Previews execute
procedures on scratch copies and never move the cursor; ranking scores
combine the quality delta, the model-performance delta and a drift
penalty under user-adjustable non-negative weights.
"""

from __future__ import annotations

import dataclasses
import json
import os
import threading
import uuid
from dataclasses import dataclass, field

from .dimensions import QualityConfig, QualityReport, quality_report
from .drift import KsResult, drift_report
from .errors import (DqError, InvalidInput, SessionFileError, StaleSnapshot,
                     UnknownSnapshot, VersionMismatch)
from .modeling import EvalConfig, EvalReport, cross_validate
from .modeling.evaluate import METRIC_ORIENTATION
from .procedures import ProcedureResult, ProcedureSpec, run_procedure
from .tabular import MISSING, ColumnSchema, Dataset

SESSION_FILE_VERSION = 1
PREVIEW_FOLDS = 3
EXTERNAL_SNAPSHOT_BYTES = 10 * 1024 * 1024
RANKING_WEIGHT_KEYS = ("dq", "perf", "drift")


@dataclass(frozen=True)
class SessionConfig:
    alpha: float = 0.05
    eval: EvalConfig = field(default_factory=EvalConfig)
    quality: QualityConfig = field(default_factory=QualityConfig)
    ranking_weights: dict = field(
        default_factory=lambda: {"dq": 1.0, "perf": 1.0, "drift": 1.0})

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInput("alpha must lie in (0, 1)")
        weights = dict(self.ranking_weights)
        for key in weights:
            if key not in RANKING_WEIGHT_KEYS:
                raise InvalidInput(f"unknown ranking weight {key!r}")
            if not (weights[key] >= 0):
                raise InvalidInput(f"ranking weight {key!r} must be non-negative")
        for key in RANKING_WEIGHT_KEYS:
            weights.setdefault(key, 1.0)
        object.__setattr__(self, "ranking_weights", weights)

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "eval": self.eval.to_json(),
                "quality": self.quality.to_json(),
                "ranking_weights": dict(self.ranking_weights)}

    @staticmethod
    def from_json(obj: dict) -> "SessionConfig":
        return SessionConfig(
            alpha=float(obj.get("alpha", 0.05)),
            eval=EvalConfig.from_json(obj.get("eval") or {}),
            quality=QualityConfig.from_json(obj.get("quality") or {}),
            ranking_weights=dict(obj.get("ranking_weights")
                                 or {"dq": 1.0, "perf": 1.0, "drift": 1.0}))


@dataclass(frozen=True)
class RankedCandidate:
    spec: ProcedureSpec
    valid: bool
    score: float | None
    dq_delta: float
    perf_delta: float
    perf_available: bool
    drift_penalty: float
    preview: dict
    error: dict | None = None

    def to_json(self) -> dict:
        return {"spec": self.spec.to_json(), "valid": self.valid,
                "score": self.score, "dq_delta": self.dq_delta,
                "perf_delta": self.perf_delta,
                "perf_available": self.perf_available,
                "drift_penalty": self.drift_penalty,
                "preview": self.preview, "error": self.error}


class Session:
    """Mutable session state; mutations are serialized by an internal lock."""

    def __init__(self, root: Dataset, config: SessionConfig | None = None,
                 session_id: str | None = None):
        self.session_id = session_id or "s-" + uuid.uuid4().hex[:12]
        self.config = config or SessionConfig()
        self.snapshots: dict[str, Dataset] = {root.snapshot_id: root}
        self.root_id = root.snapshot_id
        self.lineage: list[ProcedureResult] = []
        self.cursor = 0
        self.baseline_eval: EvalReport | None = None
        self.lock = threading.Lock()
        self._report_cache: dict[str, QualityReport] = {}
        self._eval_cache: dict[tuple, EvalReport] = {}
        self._preview_cache: dict[tuple, RankedCandidate] = {}

    # -- snapshots -------------------------------------------------------

    @property
    def current_id(self) -> str:
        if self.cursor == 0:
            return self.root_id
        return self.lineage[self.cursor - 1].output.snapshot_id

    @property
    def current(self) -> Dataset:
        return self.snapshots[self.current_id]

    def snapshot(self, snapshot_id: str) -> Dataset:
        if snapshot_id not in self.snapshots:
            raise UnknownSnapshot(f"unknown snapshot {snapshot_id!r}")
        return self.snapshots[snapshot_id]

    # -- evaluation ------------------------------------------------------

    def quality(self, snapshot_id: str | None = None) -> QualityReport:
        sid = snapshot_id or self.current_id
        if sid not in self._report_cache:
            self._report_cache[sid] = quality_report(self.snapshot(sid),
                                                     self.config.quality)
        return self._report_cache[sid]

    def _eval(self, ds: Dataset, config: EvalConfig) -> EvalReport:
        key = (ds.snapshot_id,
               json.dumps(config.to_json(), sort_keys=True, separators=(",", ":")))
        if key not in self._eval_cache:
            self._eval_cache[key] = cross_validate(ds, config)
        return self._eval_cache[key]

    def evaluate(self, config: EvalConfig | None = None,
                 snapshot_id: str | None = None) -> EvalReport:
        ds = self.current if snapshot_id is None else self.snapshot(snapshot_id)
        report = self._eval(ds, config or self.config.eval)
        # Only an evaluation of the working snapshot pins the baseline;
        # ad-hoc lookups at historical snapshots are just reads.
        if self.baseline_eval is None and ds.snapshot_id == self.current_id:
            self.baseline_eval = report
        return report

    def drift(self, from_id: str, to_id: str):
        return drift_report(self.snapshot(from_id), self.snapshot(to_id),
                            alpha=self.config.alpha)

    # -- preview and ranking ----------------------------------------------

    def _preview_eval_config(self) -> EvalConfig:
        base = self.config.eval
        return EvalConfig(task=base.task, model=base.model,
                          model_params=dict(base.model_params),
                          folds=PREVIEW_FOLDS, seed=base.seed)

    def preview(self, spec: ProcedureSpec) -> RankedCandidate:
        before = self.current
        key = (before.snapshot_id, spec.canonical())
        if key in self._preview_cache:
            return self._preview_cache[key]
        candidate = self._preview_uncached(before, spec)
        self._preview_cache[key] = candidate
        return candidate

    def _preview_uncached(self, before: Dataset,
                          spec: ProcedureSpec) -> RankedCandidate:
        weights = self.config.ranking_weights
        try:
            result = run_procedure(before, spec)
        except DqError as err:
            return RankedCandidate(
                spec=spec, valid=False, score=None, dq_delta=0.0,
                perf_delta=0.0, perf_available=False, drift_penalty=0.0,
                preview={}, error=err.to_payload())
        after = result.output

        before_q = self.quality(before.snapshot_id)
        after_q = quality_report(after, self.config.quality)
        dq_delta = (after_q.dataset.overall or 0.0) - \
            (before_q.dataset.overall or 0.0)

        perf_delta = 0.0
        perf_available = False
        eval_note = None
        eval_summary = None
        if before.label_column is not None:
            cfg = self._preview_eval_config()
            try:
                before_eval = self._eval(before, cfg)
                after_eval = cross_validate(after, cfg)
            except DqError as err:
                eval_note = err.message
            else:
                orientation = METRIC_ORIENTATION[before_eval.primary_metric]
                perf_delta = orientation * (after_eval.primary_mean
                                            - before_eval.primary_mean)
                perf_available = True
                eval_summary = {
                    "metric": before_eval.primary_metric,
                    "before": before_eval.primary_mean,
                    "after": after_eval.primary_mean,
                    "folds": cfg.folds,
                }

        entries = drift_report(before, after, alpha=self.config.alpha)
        tested = [e for e in entries if isinstance(e, KsResult)]
        drifted = sum(1 for e in tested if e.drifted)
        drift_penalty = drifted / len(tested) if tested else 0.0

        score = weights["dq"] * dq_delta + weights["perf"] * perf_delta \
            - weights["drift"] * drift_penalty
        preview = {"result": result.to_json(),
                   "drift": [e.to_json() for e in entries],
                   "quality": {"before": before_q.dataset.to_json(),
                               "after": after_q.dataset.to_json()},
                   "eval": eval_summary}
        if eval_note:
            preview["eval_note"] = eval_note
        return RankedCandidate(spec=spec, valid=True, score=score,
                               dq_delta=dq_delta, perf_delta=perf_delta,
                               perf_available=perf_available,
                               drift_penalty=drift_penalty, preview=preview)

    def rank_candidates(self, specs: list[ProcedureSpec],
                        weights: dict | None = None) -> list[RankedCandidate]:
        """Rank previews of `specs`, best first.

        `weights` re-scores the candidates with alternative ranking weights
        (same keys and validation as SessionConfig.ranking_weights; omitted
        keys default to 1.0) without touching the session config or the
        preview cache — an exploration knob, not a mutation.
        """
        if not specs:
            raise InvalidInput("rank_candidates needs at least one spec")
        candidates = [self.preview(spec) for spec in specs]
        if weights is not None:
            w = SessionConfig(ranking_weights=weights).ranking_weights
            candidates = [
                c if not c.valid else dataclasses.replace(
                    c, score=w["dq"] * c.dq_delta + w["perf"] * c.perf_delta
                    - w["drift"] * c.drift_penalty)
                for c in candidates]

        def key(c: RankedCandidate):
            if not c.valid:
                return (1, 0.0, 0.0, 0.0, c.spec.canonical())
            return (0, -c.score, -c.perf_delta, c.drift_penalty,
                    c.spec.canonical())

        return sorted(candidates, key=key)

    def default_candidates(self) -> list[ProcedureSpec]:
        """A modest proactive menu derived from the current snapshot."""
        ds = self.current
        specs: list[ProcedureSpec] = []
        numeric_features = [c.name for c in ds.columns
                            if c.dtype in ("numeric", "timestamp")
                            and c.name != ds.label_column]
        for schema in ds.columns:
            values = ds.column_values(schema.name)
            observed = [v for v in values if v is not MISSING]
            has_missing = len(observed) < len(values)
            if has_missing and observed:
                if schema.dtype in ("numeric", "timestamp"):
                    if len(numeric_features) >= 2:
                        specs.append(ProcedureSpec(
                            "impute", "knn", {}, [schema.name]))
                    specs.append(ProcedureSpec(
                        "impute", "mean", {}, [schema.name]))
                else:
                    specs.append(ProcedureSpec(
                        "impute", "mode", {}, [schema.name]))
            if schema.dtype in ("categorical", "text") and any(
                    isinstance(v, str) and v.strip() != v for v in observed):
                specs.append(ProcedureSpec(
                    "standardize", "trim_whitespace", {}, [schema.name]))
        if len(set(ds.rows)) < ds.n_rows:
            specs.append(ProcedureSpec("dedup", "exact", {}, "all"))
        return specs

    # -- mutation ---------------------------------------------------------

    def apply(self, spec: ProcedureSpec,
              expected_snapshot: str | None = None) -> ProcedureResult:
        with self.lock:
            if expected_snapshot is not None and \
                    expected_snapshot != self.current_id:
                raise StaleSnapshot(
                    "snapshot changed since the request was prepared",
                    detail={"expected": expected_snapshot,
                            "current": self.current_id})
            result = run_procedure(self.current, spec)
            self.snapshots.setdefault(result.output.snapshot_id, result.output)
            del self.lineage[self.cursor:]
            self.lineage.append(result)
            self.cursor += 1
            return result

    def undo(self) -> dict:
        with self.lock:
            if self.cursor == 0:
                return {"moved": False, "notice": "nothing to undo",
                        "cursor": self.cursor, "snapshot_id": self.current_id}
            self.cursor -= 1
            return {"moved": True, "notice": None,
                    "cursor": self.cursor, "snapshot_id": self.current_id}

    def redo(self) -> dict:
        with self.lock:
            if self.cursor == len(self.lineage):
                return {"moved": False, "notice": "nothing to redo",
                        "cursor": self.cursor, "snapshot_id": self.current_id}
            self.cursor += 1
            return {"moved": True, "notice": None,
                    "cursor": self.cursor, "snapshot_id": self.current_id}

    # -- export -----------------------------------------------------------

    def export_csv(self, snapshot_id: str | None = None) -> str:
        return self.snapshot(snapshot_id or self.current_id).to_canonical_csv()

    def export_script(self) -> dict:
        """The applied specs up to the cursor, replayable from the root CSV."""
        root = self.snapshots[self.root_id]
        return {"version": SESSION_FILE_VERSION,
                "root_snapshot": self.root_id,
                "final_snapshot": self.current_id,
                "label_column": root.label_column,
                "type_hints": root.canonical_type_hints(),
                "specs": [r.spec.to_json() for r in self.lineage[:self.cursor]]}

    def digest(self) -> dict:
        """Identity-relevant state; equal digests mean interchangeable sessions."""
        return {"session_id": self.session_id,
                "root": self.root_id,
                "cursor": self.cursor,
                "current": self.current_id,
                "chain": [{"spec": r.spec.to_json(),
                           "input": r.input_snapshot,
                           "output": r.output.snapshot_id}
                          for r in self.lineage],
                "config": self.config.to_json()}

    def to_summary(self) -> dict:
        ds = self.current
        return {"session_id": self.session_id,
                "root_snapshot": self.root_id,
                "current_snapshot": self.current_id,
                "cursor": self.cursor,
                "n_rows": ds.n_rows, "n_cols": ds.n_cols,
                "label_column": ds.label_column,
                "columns": [c.to_json() for c in ds.columns],
                "config": self.config.to_json(),
                "lineage": [{"spec": r.spec.to_json(),
                             "input": r.input_snapshot,
                             "output": r.output.snapshot_id,
                             "cells_changed": r.cells_changed,
                             "rows_removed": r.rows_removed,
                             "cols_removed": r.cols_removed}
                            for r in self.lineage]}


# -- persistence ----------------------------------------------------------


def _rows_from_canonical_csv(csv_text: str, columns) -> tuple:
    import csv as _csv
    import io as _io
    reader = _csv.reader(_io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration as exc:
        raise SessionFileError("snapshot CSV is empty") from exc
    if header != [c.name for c in columns]:
        raise SessionFileError("snapshot CSV header does not match its schema")
    rows = []
    for raw in reader:
        if len(raw) != len(columns):
            raise SessionFileError("snapshot CSV row width does not match schema")
        cells = []
        for token, schema in zip(raw, columns):
            if token == "":
                cells.append(MISSING)
            elif schema.dtype == "numeric":
                cells.append(float(token))
            elif schema.dtype == "boolean":
                cells.append(token == "true")
            elif schema.dtype == "timestamp":
                cells.append(int(token))
            else:
                cells.append(token)
        rows.append(tuple(cells))
    return tuple(rows)


def _snapshot_to_parts(ds: Dataset) -> dict:
    return {"columns": [c.to_json() for c in ds.columns],
            "label_column": ds.label_column,
            "parent_id": ds.parent_id,
            "csv": ds.to_canonical_csv()}


def _snapshot_from_parts(parts: dict, expected_id: str) -> Dataset:
    columns = tuple(ColumnSchema.from_json(c) for c in parts["columns"])
    rows = _rows_from_canonical_csv(parts["csv"], columns)
    ds = Dataset(columns=columns, rows=rows,
                 label_column=parts.get("label_column"),
                 parent_id=parts.get("parent_id"))
    if ds.snapshot_id != expected_id:
        raise SessionFileError(
            f"snapshot {expected_id} failed hash verification on load")
    return ds


def save_session(session: Session, path: str) -> None:
    snapshots = {sid: _snapshot_to_parts(ds)
                 for sid, ds in session.snapshots.items()}
    doc = {"version": SESSION_FILE_VERSION,
           "session_id": session.session_id,
           "config": session.config.to_json(),
           "root": session.root_id,
           "cursor": session.cursor,
           "lineage": [{"spec": r.spec.to_json(),
                        "input": r.input_snapshot,
                        "output": r.output.snapshot_id,
                        "cells_changed": r.cells_changed,
                        "rows_removed": r.rows_removed,
                        "cols_removed": r.cols_removed,
                        "changed_columns": list(r.changed_columns),
                        "diagnostics": r.diagnostics}
                       for r in session.lineage],
           "snapshots": snapshots}
    text = json.dumps(doc, indent=1)
    if len(text.encode("utf-8")) > EXTERNAL_SNAPSHOT_BYTES:
        side_dir = path + ".snapshots"
        os.makedirs(side_dir, exist_ok=True)
        for sid, parts in snapshots.items():
            with open(os.path.join(side_dir, sid + ".csv"), "w",
                      encoding="utf-8") as f:
                f.write(parts.pop("csv"))
            parts["csv_ref"] = sid + ".csv"
        text = json.dumps(doc, indent=1)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


def load_session(path: str) -> Session:
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise SessionFileError(f"cannot read session file: {exc}") from exc
    if not isinstance(doc, dict) or "version" not in doc:
        raise SessionFileError("not a session file: missing version")
    if doc["version"] != SESSION_FILE_VERSION:
        raise VersionMismatch(
            f"session file version {doc['version']!r} is not supported "
            f"(expected {SESSION_FILE_VERSION})")
    try:
        snapshots = {}
        for sid, parts in doc["snapshots"].items():
            if "csv_ref" in parts:
                ref = os.path.join(path + ".snapshots", parts["csv_ref"])
                with open(ref, encoding="utf-8") as f:
                    parts = dict(parts, csv=f.read())
            snapshots[sid] = _snapshot_from_parts(parts, sid)
        root = snapshots[doc["root"]]
        session = Session(root, SessionConfig.from_json(doc["config"]),
                          session_id=doc["session_id"])
        session.snapshots = snapshots
        for entry in doc["lineage"]:
            spec = ProcedureSpec.from_json(entry["spec"])
            result = ProcedureResult(
                spec=spec, input_snapshot=entry["input"],
                output=snapshots[entry["output"]],
                cells_changed=entry["cells_changed"],
                rows_removed=entry["rows_removed"],
                cols_removed=entry["cols_removed"],
                changed_columns=tuple(entry.get("changed_columns") or ()),
                diagnostics=entry.get("diagnostics") or {})
            session.lineage.append(result)
        cursor = doc["cursor"]
        if not 0 <= cursor <= len(session.lineage):
            raise SessionFileError(f"cursor {cursor} outside lineage bounds")
        session.cursor = cursor
    except (KeyError, TypeError, OSError) as exc:
        raise SessionFileError(f"malformed session file: {exc}") from exc
    for i in range(1, len(session.lineage)):
        if session.lineage[i].input_snapshot != \
                session.lineage[i - 1].output.snapshot_id:
            raise SessionFileError("lineage chain is broken in session file")
    if session.lineage and session.lineage[0].input_snapshot != session.root_id:
        raise SessionFileError("lineage does not start at the root snapshot")
    return session

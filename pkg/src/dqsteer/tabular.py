"""Typed tabular dataset model: CSV ingestion, snapshot hashing, column stats.

A :class:`Dataset` is an immutable snapshot of a typed table.  Cells are
plain Python values: ``None`` for missing, ``float`` for numeric,
``str`` for categorical/text, ``bool`` for boolean and ``int`` (seconds
since epoch, UTC) for timestamp columns.  NaN and infinities never enter
a dataset; unparseable values become missing with an ingestion warning.

Empty text is canonically identified with missing: a cell that would
hold the empty string is stored as missing, which keeps the canonical
CSV round trip exact (an empty CSV field re-ingests as missing).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .errors import IngestError, InvalidInput, UnknownColumn

MISSING = None

DTYPES = ("numeric", "categorical", "boolean", "timestamp", "text")

DEFAULT_NA_TOKENS = frozenset({"", "na", "n/a", "null", "nan"})

NUMERIC_INFERENCE_THRESHOLD = 0.9

_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_EPOCH_RE = re.compile(r"^[+-]?\d+$")
_BOOL_TOKENS = {"true": True, "false": False}

_HASH_PREFIX = "dqsteer.dataset.v1"


@dataclass(frozen=True)
class IngestWarning:
    row: int
    column: str
    raw: str
    message: str

    def to_json(self) -> dict:
        return {"row": self.row, "column": self.column, "raw": self.raw,
                "message": self.message}


@dataclass(frozen=True)
class ColumnSchema:
    """Schema of one column: name, dtype, optional format and domain rules.

    ``declared_format`` is a format rule id understood by
    :mod:`dqsteer.rules` (e.g. ``"iso_date"`` or ``"regex:^\\d+$"``).
    ``domain_rule`` is ``{"kind": "range", "min": .., "max": ..}`` or
    ``{"kind": "set", "values": [..]}``.
    """

    name: str
    dtype: str
    declared_format: str | None = None
    domain_rule: dict | None = None

    def __post_init__(self):
        if not self.name:
            raise InvalidInput("column name must be non-empty")
        if self.dtype not in DTYPES:
            raise InvalidInput(f"unknown dtype {self.dtype!r} for column {self.name!r}")
        if self.domain_rule is not None:
            kind = self.domain_rule.get("kind")
            if kind == "range":
                if self.dtype not in ("numeric", "timestamp"):
                    raise InvalidInput(
                        f"range domain rule requires a numeric or timestamp column, "
                        f"got {self.dtype!r} for {self.name!r}")
            elif kind == "set":
                if "values" not in self.domain_rule:
                    raise InvalidInput(f"set domain rule on {self.name!r} needs 'values'")
            else:
                raise InvalidInput(f"unknown domain rule kind {kind!r} on {self.name!r}")

    def to_json(self) -> dict:
        return {"name": self.name, "dtype": self.dtype,
                "declared_format": self.declared_format,
                "domain_rule": self.domain_rule}

    @staticmethod
    def from_json(obj: dict) -> "ColumnSchema":
        return ColumnSchema(obj["name"], obj["dtype"],
                            obj.get("declared_format"), obj.get("domain_rule"))


def _normalize_cell(value, dtype: str, col: str):
    """Coerce a cell to its canonical runtime type, or raise InvalidInput."""
    if value is MISSING:
        return MISSING
    if dtype == "numeric":
        if isinstance(value, bool):
            raise InvalidInput(f"boolean in numeric column {col!r}")
        if isinstance(value, (int, float)):
            v = float(value)
            if not np.isfinite(v):
                raise InvalidInput(f"non-finite number in column {col!r}")
            return v
        raise InvalidInput(f"non-numeric cell {value!r} in numeric column {col!r}")
    if dtype == "boolean":
        if isinstance(value, bool):
            return value
        raise InvalidInput(f"non-boolean cell {value!r} in boolean column {col!r}")
    if dtype == "timestamp":
        if isinstance(value, bool) or not isinstance(value, int):
            raise InvalidInput(f"timestamp cells must be int seconds, got {value!r} in {col!r}")
        return value
    # categorical / text
    if not isinstance(value, str):
        raise InvalidInput(f"non-string cell {value!r} in {dtype} column {col!r}")
    if value == "":
        return MISSING
    return value


def render_cell(value, dtype: str) -> str:
    """Canonical string rendering of one cell (missing renders as '')."""
    if value is MISSING:
        return ""
    if dtype == "numeric":
        return repr(value)
    if dtype == "boolean":
        return "true" if value else "false"
    if dtype == "timestamp":
        return str(value)
    return value


@dataclass(frozen=True)
class Dataset:
    """Immutable snapshot of a typed table.

    ``snapshot_id`` is the sha256 hex digest of the canonical
    serialization (schema then rows); it covers cell content, schema and
    column order but not ``label_column`` or ``parent_id``, which are
    session metadata rather than data content.
    """

    columns: tuple[ColumnSchema, ...]
    rows: tuple[tuple, ...]
    label_column: str | None = None
    parent_id: str | None = None
    snapshot_id: str = field(init=False, compare=False, default="")

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise InvalidInput(f"duplicate column names: {dupes}")
        if self.label_column is not None and self.label_column not in names:
            raise UnknownColumn(f"label column {self.label_column!r} not in dataset")
        norm_rows = []
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise InvalidInput(
                    f"row {i} has {len(row)} cells, expected {len(self.columns)}")
            norm_rows.append(tuple(
                _normalize_cell(v, c.dtype, c.name) for v, c in zip(row, self.columns)))
        object.__setattr__(self, "rows", tuple(norm_rows))
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "snapshot_id",
                           hashlib.sha256(self.canonical_bytes()).hexdigest())

    # -- introspection -------------------------------------------------

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    def column_index(self, name: str) -> int:
        for i, c in enumerate(self.columns):
            if c.name == name:
                return i
        raise UnknownColumn(f"unknown column {name!r}")

    def schema(self, name: str) -> ColumnSchema:
        return self.columns[self.column_index(name)]

    def column_values(self, name: str) -> list:
        idx = self.column_index(name)
        return [row[idx] for row in self.rows]

    def observed(self, name: str) -> list:
        """Non-missing values of a column, in row order."""
        idx = self.column_index(name)
        return [row[idx] for row in self.rows if row[idx] is not MISSING]

    def numeric_array(self, name: str) -> np.ndarray:
        """Observed values of a numeric or timestamp column as float64."""
        schema = self.schema(name)
        if schema.dtype not in ("numeric", "timestamp"):
            raise InvalidInput(f"column {name!r} is {schema.dtype}, not numeric")
        return np.array([float(v) for v in self.observed(name)], dtype=np.float64)

    # -- derivation ----------------------------------------------------

    def derive(self, *, columns=None, rows=None, label_column=...,
               parent_id=...) -> "Dataset":
        """New snapshot with the given fields replaced; parent defaults to self."""
        return Dataset(
            columns=tuple(columns) if columns is not None else self.columns,
            rows=tuple(rows) if rows is not None else self.rows,
            label_column=self.label_column if label_column is ... else label_column,
            parent_id=self.snapshot_id if parent_id is ... else parent_id,
        )

    # -- canonical serialization ----------------------------------------

    def canonical_bytes(self) -> bytes:
        schema = [[c.name, c.dtype, c.declared_format,
                   json.dumps(c.domain_rule, sort_keys=True, separators=(",", ":"))
                   if c.domain_rule is not None else None]
                  for c in self.columns]
        buf = io.StringIO()
        buf.write(_HASH_PREFIX + "\n")
        buf.write(json.dumps(schema, separators=(",", ":"), ensure_ascii=False) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        dtypes = [c.dtype for c in self.columns]
        for row in self.rows:
            writer.writerow([render_cell(v, t) for v, t in zip(row, dtypes)])
        return buf.getvalue().encode("utf-8")

    def to_canonical_csv(self) -> str:
        """Canonical CSV text: header row, comma delimiter, minimal quoting."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.column_names)
        dtypes = [c.dtype for c in self.columns]
        for row in self.rows:
            writer.writerow([render_cell(v, t) for v, t in zip(row, dtypes)])
        return buf.getvalue()

    def canonical_type_hints(self) -> dict:
        """Type hints that make ``ingest_csv(to_canonical_csv())`` reproduce dtypes."""
        hints: dict = {}
        for c in self.columns:
            if c.dtype == "timestamp":
                hints[c.name] = {"dtype": "timestamp", "format": "epoch"}
            else:
                hints[c.name] = c.dtype
        return hints

    def to_json_obj(self) -> dict:
        return {
            "snapshot_id": self.snapshot_id,
            "parent_id": self.parent_id,
            "label_column": self.label_column,
            "columns": [c.to_json() for c in self.columns],
            "rows": [list(row) for row in self.rows],
        }


def snapshot_hash(ds: Dataset) -> str:
    """Content hash of a dataset (lowercase hex sha256)."""
    return ds.snapshot_id


# -- ingestion ----------------------------------------------------------


def _parse_number(token: str, thousands: str | None, decimal: str) -> float | None:
    s = token.strip()
    if thousands:
        s = s.replace(thousands, "")
    if decimal != ".":
        if "." in s:
            return None
        s = s.replace(decimal, ".")
    if not _NUMBER_RE.match(s):
        return None
    v = float(s)
    if not np.isfinite(v):
        return None
    return v


_PATTERN_TOKENS = [("YYYY", r"(\d{4})"), ("MM", r"(\d{1,2})"), ("DD", r"(\d{1,2})"),
                   ("HH", r"(\d{1,2})"), ("mm", r"(\d{1,2})"), ("SS", r"(\d{1,2})")]


def compile_date_pattern(pattern: str):
    """Compile a token date pattern (DD/MM/YYYY style) to (regex, field order)."""
    regex_parts = []
    fields = []
    i = 0
    while i < len(pattern):
        for tok, sub in _PATTERN_TOKENS:
            if pattern.startswith(tok, i):
                if tok in fields:
                    raise InvalidInput(f"repeated token {tok!r} in date pattern {pattern!r}")
                regex_parts.append(sub)
                fields.append(tok)
                i += len(tok)
                break
        else:
            regex_parts.append(re.escape(pattern[i]))
            i += 1
    if "YYYY" not in fields or "MM" not in fields or "DD" not in fields:
        raise InvalidInput(f"date pattern {pattern!r} must contain YYYY, MM and DD")
    return re.compile("^" + "".join(regex_parts) + "$"), fields


def parse_timestamp(token: str, fmt: str) -> int | None:
    """Parse a timestamp token under a named format; None when unparseable."""
    s = token.strip()
    if fmt == "epoch":
        if not _EPOCH_RE.match(s):
            return None
        return int(s)
    if fmt == "iso":
        try:
            dt = datetime.fromisoformat(s.replace("Z", "+00:00"))
        except ValueError:
            return None
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return int(dt.timestamp())
    regex, fields = compile_date_pattern(fmt)
    m = regex.match(s)
    if not m:
        return None
    parts = dict(zip(fields, (int(g) for g in m.groups())))
    try:
        dt = datetime(parts["YYYY"], parts["MM"], parts["DD"],
                      parts.get("HH", 0), parts.get("mm", 0), parts.get("SS", 0),
                      tzinfo=timezone.utc)
    except ValueError:
        return None
    return int(dt.timestamp())


def _normalize_hint(col: str, hint) -> dict:
    if isinstance(hint, str):
        hint = {"dtype": hint}
    if not isinstance(hint, dict) or "dtype" not in hint:
        raise InvalidInput(f"type hint for {col!r} must be a dtype or a dict with 'dtype'")
    if hint["dtype"] not in DTYPES:
        raise InvalidInput(f"type hint for {col!r} names unknown dtype {hint['dtype']!r}")
    if hint["dtype"] == "timestamp" and "format" not in hint:
        hint = {**hint, "format": "iso"}
    return hint


def ingest_csv(data, *, delimiter: str = ",", header_row: bool = True,
               na_tokens=None, type_hints: dict | None = None,
               label_column: str | None = None) -> tuple[Dataset, list[IngestWarning]]:
    """Parse RFC-4180-style CSV into a typed Dataset.

    Column dtypes come from ``type_hints`` where given, otherwise are
    inferred: boolean if every non-missing token is true/false, numeric
    if >= 90% of non-missing tokens parse as finite numbers, else
    categorical.  Unparseable values under a typed column become missing
    and produce a warning.  Row indices in errors and warnings are
    0-based over data rows (the header does not count).
    """
    if isinstance(data, bytes):
        text = data.decode("utf-8-sig")
    else:
        text = data.lstrip("﻿")
    if text.strip() == "":
        raise IngestError("empty CSV input")

    raw_rows = list(csv.reader(io.StringIO(text), delimiter=delimiter))
    while raw_rows and raw_rows[0] == []:
        raw_rows.pop(0)
    if not raw_rows:
        raise IngestError("empty CSV input")

    if header_row:
        names = [h.strip() for h in raw_rows[0]]
        data_rows = raw_rows[1:]
        if any(n == "" for n in names):
            raise IngestError("empty column name in header")
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise IngestError(f"duplicate header names: {dupes}")
    else:
        names = [f"c{i}" for i in range(len(raw_rows[0]))]
        data_rows = raw_rows

    n_cols = len(names)
    # in a one-column file a blank line is a missing cell, not noise;
    # wider files treat blank lines as skippable separators
    if n_cols == 1:
        data_rows = [[""] if r == [] else r for r in data_rows]
    else:
        data_rows = [r for r in data_rows if r != []]
    for i, row in enumerate(data_rows):
        if len(row) != n_cols:
            raise IngestError(
                f"ragged row {i}: has {len(row)} fields, expected {n_cols}",
                detail={"row": i})

    na = DEFAULT_NA_TOKENS if na_tokens is None else frozenset(
        t.lower() for t in na_tokens)
    hints = {}
    for col, h in (type_hints or {}).items():
        if col not in names:
            raise UnknownColumn(f"type hint for unknown column {col!r}")
        hints[col] = _normalize_hint(col, h)

    warnings: list[IngestWarning] = []
    columns: list[ColumnSchema] = []
    parsed_cols: list[list] = []

    for j, name in enumerate(names):
        tokens = [row[j] for row in data_rows]
        observed = [(i, t) for i, t in enumerate(tokens) if t.strip().lower() not in na]
        hint = hints.get(name)
        if hint is not None:
            dtype = hint["dtype"]
        elif not observed:
            dtype = "categorical"
        elif all(t.strip().lower() in _BOOL_TOKENS for _, t in observed):
            dtype = "boolean"
        else:
            n_num = sum(1 for _, t in observed
                        if _parse_number(t, None, ".") is not None)
            dtype = ("numeric" if n_num / len(observed) >= NUMERIC_INFERENCE_THRESHOLD
                     else "categorical")

        cells: list = [MISSING] * len(tokens)
        for i, token in enumerate(tokens):
            if token.strip().lower() in na:
                continue
            if dtype == "numeric":
                v = _parse_number(token, (hint or {}).get("thousands"),
                                  (hint or {}).get("decimal", "."))
                if v is None:
                    warnings.append(IngestWarning(i, name, token,
                                                  "unparseable numeric, set missing"))
                else:
                    cells[i] = v
            elif dtype == "boolean":
                b = _BOOL_TOKENS.get(token.strip().lower())
                if b is None:
                    warnings.append(IngestWarning(i, name, token,
                                                  "unparseable boolean, set missing"))
                else:
                    cells[i] = b
            elif dtype == "timestamp":
                ts = parse_timestamp(token, (hint or {}).get("format", "iso"))
                if ts is None:
                    warnings.append(IngestWarning(i, name, token,
                                                  "unparseable timestamp, set missing"))
                else:
                    cells[i] = ts
            else:
                cells[i] = token
        columns.append(ColumnSchema(name, dtype))
        parsed_cols.append(cells)

    rows = tuple(tuple(parsed_cols[j][i] for j in range(n_cols))
                 for i in range(len(data_rows)))
    ds = Dataset(columns=tuple(columns), rows=rows, label_column=label_column)
    return ds, warnings


# -- column statistics ---------------------------------------------------

HISTOGRAM_BINS = 20
TOP_K = 10


def column_stats(ds: Dataset, col: str) -> dict:
    """Summary statistics for one column.

    Numeric aggregates (mean, stddev, min, max, quartiles, histogram)
    are present only for numeric and timestamp columns and are computed
    over non-missing values; quartiles use linear interpolation between
    order statistics and stddev is the population form.
    """
    schema = ds.schema(col)
    values = ds.column_values(col)
    observed = [v for v in values if v is not MISSING]
    stats: dict = {
        "column": col,
        "dtype": schema.dtype,
        "count": len(observed),
        "missing_count": len(values) - len(observed),
        "distinct_count": len(set(observed)),
    }

    counts: dict = {}
    for v in observed:
        counts[v] = counts.get(v, 0) + 1
    first_seen = {}
    for i, v in enumerate(observed):
        if v not in first_seen:
            first_seen[v] = i
    top = sorted(counts.items(), key=lambda kv: (-kv[1], first_seen[kv[0]]))[:TOP_K]
    stats["top_k"] = [{"value": v, "count": n} for v, n in top]

    if schema.dtype in ("numeric", "timestamp") and observed:
        a = np.array([float(v) for v in observed], dtype=np.float64)
        q1, q2, q3 = np.percentile(a, [25.0, 50.0, 75.0])
        hist_counts, hist_edges = np.histogram(a, bins=HISTOGRAM_BINS)
        stats.update({
            "mean": float(a.mean()),
            "stddev": float(a.std()),
            "min": float(a.min()),
            "max": float(a.max()),
            "q1": float(q1), "q2": float(q2), "q3": float(q3),
            "histogram": {"edges": [float(e) for e in hist_edges],
                          "counts": [int(c) for c in hist_counts]},
        })
    return stats

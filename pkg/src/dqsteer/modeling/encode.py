"""Feature encoding for the built-in learners.

Numeric-valued columns (numeric, timestamp, boolean as 0/1) are
z-standardized; categorical and text columns are one-hot encoded over the
categories seen in the fitting rows.  Encoders are always fit on training
rows only so cross-validation cannot leak test-fold statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInput
from ..tabular import MISSING, Dataset


def feature_columns(ds: Dataset) -> list[str]:
    if ds.label_column is None:
        raise InvalidInput("dataset has no label column set")
    return [c.name for c in ds.columns if c.name != ds.label_column]


def complete_rows(ds: Dataset, columns: list[str]) -> list[int]:
    """Indices of rows fully observed in the given columns."""
    idx = [ds.column_index(c) for c in columns]
    return [i for i, row in enumerate(ds.rows)
            if all(row[j] is not MISSING for j in idx)]


def _numeric_value(v) -> float:
    if isinstance(v, bool):
        return 1.0 if v else 0.0
    return float(v)


@dataclass(frozen=True)
class Encoder:
    # per feature column: ("z", mean, std) or ("onehot", categories tuple)
    columns: tuple
    specs: tuple

    def width(self) -> int:
        return sum(1 if s[0] == "z" else len(s[1]) for s in self.specs)

    def scaler_params(self) -> dict:
        return {col: [spec[1], spec[2]]
                for col, spec in zip(self.columns, self.specs)
                if spec[0] == "z"}


def fit_encoder(ds: Dataset, rows: list[int], columns: list[str]) -> Encoder:
    specs = []
    for col in columns:
        schema = ds.schema(col)
        j = ds.column_index(col)
        values = [ds.rows[i][j] for i in rows]
        if schema.dtype in ("numeric", "timestamp", "boolean"):
            nums = np.array([_numeric_value(v) for v in values], dtype=float)
            mean = float(np.mean(nums)) if len(nums) else 0.0
            std = float(np.std(nums)) if len(nums) else 1.0
            if std == 0.0:
                std = 1.0   # constant feature maps to 0, not NaN
            specs.append(("z", mean, std))
        else:
            cats = tuple(sorted({str(v) for v in values}))
            specs.append(("onehot", cats))
    return Encoder(columns=tuple(columns), specs=tuple(specs))


def transform(ds: Dataset, rows: list[int], encoder: Encoder) -> np.ndarray:
    """Encode the given rows; categories unseen at fit time map to all zeros."""
    out = np.zeros((len(rows), encoder.width()), dtype=float)
    offset = 0
    for col, spec in zip(encoder.columns, encoder.specs):
        j = ds.column_index(col)
        if spec[0] == "z":
            _, mean, std = spec
            for r, i in enumerate(rows):
                out[r, offset] = (_numeric_value(ds.rows[i][j]) - mean) / std
            offset += 1
        else:
            cats = spec[1]
            pos = {c: p for p, c in enumerate(cats)}
            for r, i in enumerate(rows):
                p = pos.get(str(ds.rows[i][j]))
                if p is not None:
                    out[r, offset + p] = 1.0
            offset += len(cats)
    return out


def label_values(ds: Dataset, rows: list[int]) -> list:
    j = ds.column_index(ds.label_column)
    return [ds.rows[i][j] for i in rows]


def class_order(values: list) -> list:
    """Distinct label values in a stable sorted order (class id = position)."""
    distinct = set(values)
    if all(isinstance(v, (int, float)) and not isinstance(v, bool)
           for v in distinct):
        return sorted(distinct)
    if all(isinstance(v, bool) for v in distinct):
        return sorted(distinct)
    return sorted(str(v) for v in distinct)


def encode_labels(values: list, classes: list) -> np.ndarray:
    if all(isinstance(c, str) for c in classes):
        index = {c: i for i, c in enumerate(classes)}
        return np.array([index[str(v)] for v in values], dtype=int)
    index = {c: i for i, c in enumerate(classes)}
    return np.array([index[v] for v in values], dtype=int)

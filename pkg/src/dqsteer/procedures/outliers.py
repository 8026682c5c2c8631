"""Outlier detection (z-score, IQR fences, local outlier factor) and treatment.

Detection is read-only and returns a flag set bound to the snapshot it
was computed on; treatment refuses stale flags.  Missing cells are never
flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateInput, InvalidInput, InvalidSpec, StaleSnapshot
from ..tabular import MISSING, Dataset

ZSCORE_DEFAULT_T = 3.0
IQR_DEFAULT_F = 1.5
LOF_DEFAULT_K = 20
LOF_DEFAULT_THRESHOLD = 1.5


@dataclass(frozen=True)
class OutlierFlags:
    snapshot_id: str
    column: str
    method: str
    params: tuple
    flagged: tuple[int, ...]      # row indices
    eligible: int                 # observed cells considered
    warnings: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"snapshot_id": self.snapshot_id, "column": self.column,
                "method": self.method, "params": dict(self.params),
                "flagged": list(self.flagged), "eligible": self.eligible,
                "warnings": list(self.warnings)}


def iqr_fences(values: np.ndarray, f: float) -> tuple[float, float]:
    """Lower/upper Tukey fences (q1 - f*IQR, q3 + f*IQR)."""
    q1, q3 = np.percentile(values, [25.0, 75.0])
    iqr = q3 - q1
    return float(q1 - f * iqr), float(q3 + f * iqr)


def _observed_with_rows(ds: Dataset, col: str) -> tuple[np.ndarray, list[int]]:
    idx = ds.column_index(col)
    rows = [i for i, r in enumerate(ds.rows) if r[idx] is not MISSING]
    return np.array([float(ds.rows[i][idx]) for i in rows], dtype=np.float64), rows


def lof_scores(values: np.ndarray, k: int) -> np.ndarray:
    """Standard local outlier factor over 1-D points.

    Neighborhoods include every point within the k-distance, so ties can
    make them larger than k.  Coincident points get an infinite local
    reachability density; the LOF ratio of two infinite densities is 1.
    """
    n = len(values)
    dist = np.abs(values[:, None] - values[None, :])
    np.fill_diagonal(dist, np.inf)
    sorted_d = np.sort(dist, axis=1)
    k_dist = sorted_d[:, k - 1]
    neighborhoods = [np.flatnonzero(dist[i] <= k_dist[i]) for i in range(n)]

    lrd = np.empty(n)
    for i in range(n):
        reach = np.maximum(k_dist[neighborhoods[i]], dist[i][neighborhoods[i]])
        total = reach.sum()
        lrd[i] = math.inf if total == 0.0 else len(neighborhoods[i]) / total

    scores = np.empty(n)
    for i in range(n):
        ratios = []
        for j in neighborhoods[i]:
            if math.isinf(lrd[j]) and math.isinf(lrd[i]):
                ratios.append(1.0)
            elif math.isinf(lrd[i]):
                ratios.append(0.0)
            elif math.isinf(lrd[j]):
                ratios.append(math.inf)
            else:
                ratios.append(lrd[j] / lrd[i])
        scores[i] = sum(ratios) / len(ratios)
    return scores


def detect(ds: Dataset, col: str, method: str, params: dict | None = None) -> OutlierFlags:
    """Flag outlying cells of a numeric column; never mutates the dataset."""
    params = dict(params or {})
    schema = ds.schema(col)
    if schema.dtype not in ("numeric", "timestamp"):
        raise InvalidInput(f"outlier detection needs a numeric column, "
                           f"{col!r} is {schema.dtype}")
    values, rows = _observed_with_rows(ds, col)
    if len(values) < 3:
        raise DegenerateInput(f"column {col!r} has {len(values)} observed values, "
                              f"need at least 3")

    warnings: list[str] = []
    if method == "zscore":
        t = float(params.get("t", ZSCORE_DEFAULT_T))
        mean = values.mean()
        std = values.std()
        if std == 0.0:
            flagged: list[int] = []
            warnings.append(f"column {col!r} has zero standard deviation; "
                            "z-scores are degenerate, nothing flagged")
        else:
            z = np.abs(values - mean) / std
            flagged = [rows[i] for i in np.flatnonzero(z > t)]
        used = {"t": t}
    elif method == "iqr":
        f = float(params.get("f", IQR_DEFAULT_F))
        lo, hi = iqr_fences(values, f)
        flagged = [rows[i] for i in range(len(values))
                   if values[i] < lo or values[i] > hi]
        used = {"f": f}
    elif method == "lof":
        k = int(params.get("k", LOF_DEFAULT_K))
        threshold = float(params.get("threshold", LOF_DEFAULT_THRESHOLD))
        if k < 1:
            raise InvalidSpec("lof needs k >= 1")
        if len(values) < k + 1:
            raise DegenerateInput(f"lof with k={k} needs at least {k + 1} complete "
                                  f"rows, column {col!r} has {len(values)}")
        scores = lof_scores(values, k)
        flagged = [rows[i] for i in np.flatnonzero(scores > threshold)]
        used = {"k": k, "threshold": threshold}
    else:
        raise InvalidSpec(f"unknown outlier method {method!r}")

    return OutlierFlags(ds.snapshot_id, col, method, tuple(sorted(used.items())),
                        tuple(flagged), len(values), tuple(warnings))


def treat(ds: Dataset, flags: OutlierFlags, action: str,
          fence_factor: float | None = None):
    """Apply a treatment to previously detected flags.

    clip_to_fence clips flagged cells to the IQR fences of the
    pre-treatment distribution (factor from the flag set when it came
    from the iqr detector, else 1.5).
    """
    if flags.snapshot_id != ds.snapshot_id:
        raise StaleSnapshot(
            "outlier flags were computed on a different snapshot",
            detail={"flags_snapshot": flags.snapshot_id, "current": ds.snapshot_id})
    col_idx = ds.column_index(flags.column)
    flagged = set(flags.flagged)

    if action == "to_missing":
        rows = tuple(
            tuple(MISSING if (i in flagged and j == col_idx) else v
                  for j, v in enumerate(row))
            for i, row in enumerate(ds.rows))
        out = ds.derive(rows=rows)
        return out, None, {"action": action, "flagged": sorted(flagged)}

    if action == "clip_to_fence":
        if ds.schema(flags.column).dtype != "numeric":
            raise InvalidInput("clip_to_fence applies to numeric columns only")
        values, _ = _observed_with_rows(ds, flags.column)
        if fence_factor is None:
            fence_factor = dict(flags.params).get("f", IQR_DEFAULT_F)
        lo, hi = iqr_fences(values, float(fence_factor))
        rows = tuple(
            tuple(min(max(v, lo), hi) if (i in flagged and j == col_idx) else v
                  for j, v in enumerate(row))
            for i, row in enumerate(ds.rows))
        out = ds.derive(rows=rows)
        return out, None, {"action": action, "flagged": sorted(flagged),
                           "fence_low": lo, "fence_high": hi}

    if action == "remove_rows":
        survivors = tuple(i for i in range(ds.n_rows) if i not in flagged)
        out = ds.derive(rows=tuple(ds.rows[i] for i in survivors))
        return out, survivors, {"action": action, "flagged": sorted(flagged)}

    raise InvalidSpec(f"unknown outlier treatment {action!r}")

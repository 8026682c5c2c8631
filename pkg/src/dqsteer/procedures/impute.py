"""Missing-value imputation: mean, median, mode, constant, kNN, linear model.

Only missing cells of the target column are ever altered.  A column with
nothing missing imputes to an identity result (zero cells changed); an
all-missing column is an error because there is nothing to learn from.
"""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateInput, InvalidInput, InvalidSpec, SingularDesign
from ..tabular import MISSING, Dataset


def _mode_first_seen(values):
    counts: dict = {}
    order: dict = {}
    for i, v in enumerate(values):
        counts[v] = counts.get(v, 0) + 1
        if v not in order:
            order[v] = i
    return max(counts, key=lambda v: (counts[v], -order[v]))


def _fill_column(ds: Dataset, col_idx: int, fills: dict[int, object]) -> Dataset:
    rows = tuple(
        tuple(fills[i] if (j == col_idx and i in fills) else v
              for j, v in enumerate(row))
        for i, row in enumerate(ds.rows))
    return ds.derive(rows=rows)


def _numeric_feature_columns(ds: Dataset, exclude: str) -> list[str]:
    return [c.name for c in ds.columns
            if c.dtype in ("numeric", "timestamp") and c.name != exclude]


def _zscale_params(ds: Dataset, cols: list[str]) -> dict[str, tuple[float, float]]:
    params = {}
    for c in cols:
        a = ds.numeric_array(c)
        if len(a) == 0:
            params[c] = (0.0, 0.0)
        else:
            params[c] = (float(a.mean()), float(a.std()))
    return params


def knn_fills(ds: Dataset, col: str, k: int) -> dict[int, object]:
    """Donor-based fills for each missing cell of ``col``.

    Donors are rows observed in the target and in every numeric feature
    column; distances are Euclidean over z-standardized numeric features,
    skipping features missing in the query row.  Ties on distance break
    by donor row index.  Numeric targets take the donor mean, others the
    first-seen mode.
    """
    target_idx = ds.column_index(col)
    features = _numeric_feature_columns(ds, col)
    feat_idx = [ds.column_index(f) for f in features]
    scale = _zscale_params(ds, features)

    donors = [i for i, r in enumerate(ds.rows)
              if r[target_idx] is not MISSING
              and all(r[j] is not MISSING for j in feat_idx)]
    if len(donors) < k:
        raise DegenerateInput(
            f"knn imputation with k={k} needs at least {k} complete donor rows, "
            f"found {len(donors)}")

    def z(feature, value):
        mean, std = scale[feature]
        return 0.0 if std == 0.0 else (float(value) - mean) / std

    donor_z = {
        i: [z(f, ds.rows[i][j]) for f, j in zip(features, feat_idx)]
        for i in donors}

    numeric_target = ds.schema(col).dtype in ("numeric", "timestamp")
    fills: dict[int, object] = {}
    for i, row in enumerate(ds.rows):
        if row[target_idx] is not MISSING:
            continue
        present = [p for p, j in enumerate(feat_idx) if row[j] is not MISSING]
        qz = [z(features[p], row[feat_idx[p]]) for p in present]
        scored = []
        for d in donors:
            dz = donor_z[d]
            dist = float(np.sqrt(sum((qz[a] - dz[p]) ** 2
                                     for a, p in enumerate(present))))
            scored.append((dist, d))
        scored.sort()
        chosen = [d for _, d in scored[:k]]
        donor_values = [ds.rows[d][target_idx] for d in chosen]
        if numeric_target:
            mean = float(np.mean([float(v) for v in donor_values]))
            fills[i] = int(round(mean)) if ds.schema(col).dtype == "timestamp" else mean
        else:
            fills[i] = _mode_first_seen(donor_values)
    return fills


def _find_collinear(X: np.ndarray, names: list[str]) -> list[str]:
    """Greedy scan for predictor columns that add no rank."""
    base = np.ones((X.shape[0], 1))
    kept = base
    dependent = []
    for j, name in enumerate(names):
        cand = np.hstack([kept, X[:, j:j + 1]])
        if np.linalg.matrix_rank(cand) == np.linalg.matrix_rank(kept):
            dependent.append(name)
        else:
            kept = cand
    return dependent


def linreg_fills(ds: Dataset, col: str, predictors: list[str]) -> dict[int, float]:
    """Ordinary-least-squares fills for missing cells of a numeric column."""
    if ds.schema(col).dtype != "numeric":
        raise InvalidInput(f"linreg imputation needs a numeric target, "
                           f"{col!r} is {ds.schema(col).dtype}")
    for p in predictors:
        if ds.schema(p).dtype not in ("numeric", "timestamp"):
            raise InvalidInput(f"linreg predictor {p!r} must be numeric")
        if p == col:
            raise InvalidSpec("target column cannot be its own predictor")
    target_idx = ds.column_index(col)
    pred_idx = [ds.column_index(p) for p in predictors]

    fit_rows = [i for i, r in enumerate(ds.rows)
                if r[target_idx] is not MISSING
                and all(r[j] is not MISSING for j in pred_idx)]
    predict_rows = [i for i, r in enumerate(ds.rows) if r[target_idx] is MISSING]
    bad = [i for i in predict_rows
           if any(ds.rows[i][j] is MISSING for j in pred_idx)]
    if bad:
        raise DegenerateInput(
            f"rows {bad[:10]} are missing predictor values; linreg cannot fill them",
            detail={"rows": bad})
    if len(fit_rows) <= len(predictors):
        raise DegenerateInput(
            f"linreg needs more complete rows ({len(fit_rows)}) than "
            f"predictors ({len(predictors)})")

    X = np.array([[float(ds.rows[i][j]) for j in pred_idx] for i in fit_rows])
    y = np.array([float(ds.rows[i][target_idx]) for i in fit_rows])
    design = np.hstack([np.ones((len(fit_rows), 1)), X])
    if np.linalg.matrix_rank(design) < design.shape[1]:
        collinear = _find_collinear(X, predictors)
        raise SingularDesign(
            f"singular design matrix; collinear predictors: {collinear}",
            detail={"collinear": collinear})
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)

    fills = {}
    for i in predict_rows:
        x = np.array([1.0] + [float(ds.rows[i][j]) for j in pred_idx])
        fills[i] = float(x @ beta)
    return fills


def impute_column(ds: Dataset, col: str, method: str, params: dict):
    """Impute one column; returns (dataset, survivors=None, diagnostics)."""
    schema = ds.schema(col)
    target_idx = ds.column_index(col)
    missing_rows = [i for i, r in enumerate(ds.rows) if r[target_idx] is MISSING]
    observed = ds.observed(col)

    if not observed:
        raise DegenerateInput(f"column {col!r} is entirely missing; nothing to impute from")
    if not missing_rows:
        return ds.derive(), None, {"column": col, "filled": 0, "fill_rows": []}

    if method == "mean":
        if schema.dtype != "numeric":
            raise InvalidInput(f"mean imputation needs a numeric column, "
                               f"{col!r} is {schema.dtype}")
        fill = float(np.mean([float(v) for v in observed]))
        fills = {i: fill for i in missing_rows}
    elif method == "median":
        if schema.dtype != "numeric":
            raise InvalidInput(f"median imputation needs a numeric column, "
                               f"{col!r} is {schema.dtype}")
        fill = float(np.percentile([float(v) for v in observed], 50.0))
        fills = {i: fill for i in missing_rows}
    elif method == "mode":
        fill = _mode_first_seen(observed)
        fills = {i: fill for i in missing_rows}
    elif method == "constant":
        if "value" not in params:
            raise InvalidSpec("constant imputation needs a 'value' parameter")
        value = params["value"]
        if schema.dtype == "numeric" and isinstance(value, (int, float)) \
                and not isinstance(value, bool):
            value = float(value)
        fills = {i: value for i in missing_rows}
    elif method == "knn":
        k = int(params.get("k", 5))
        if k < 1:
            raise InvalidSpec("knn imputation needs k >= 1")
        fills = knn_fills(ds, col, k)
    elif method == "linreg":
        predictors = params.get("predictor_cols")
        if not predictors:
            predictors = _numeric_feature_columns(ds, col)
        if not predictors:
            raise InvalidSpec("linreg imputation needs at least one numeric predictor")
        fills = linreg_fills(ds, col, list(predictors))
    else:
        raise InvalidSpec(f"unknown imputation method {method!r}")

    out = _fill_column(ds, target_idx, fills)
    return out, None, {"column": col, "filled": len(fills),
                       "fill_rows": sorted(fills)}

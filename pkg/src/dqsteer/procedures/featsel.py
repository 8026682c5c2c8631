"""Feature selection: variance threshold, correlation filter, mutual information.

All methods treat the label column as protected: it is never a candidate
and never dropped.  Mutual information uses equal-frequency binning
(numeric values split at the 1/bins..(bins-1)/bins quantiles, assigned
with searchsorted side='right') and is reported in bits.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import InvalidSpec, LabelProtected, UnknownColumn
from ..tabular import MISSING, Dataset

MI_DEFAULT_BINS = 10


def _candidate_features(ds: Dataset, target, label: str, dtypes) -> list[str]:
    if target == "all" or target is None:
        return [c.name for c in ds.columns if c.dtype in dtypes and c.name != label]
    cols = list(target)
    for c in cols:
        ds.column_index(c)
        if c == label:
            raise LabelProtected(f"label column {label!r} cannot be a selection candidate")
    return cols


def _drop_columns(ds: Dataset, drop: list[str]):
    keep = [j for j, c in enumerate(ds.columns) if c.name not in set(drop)]
    columns = tuple(ds.columns[j] for j in keep)
    rows = tuple(tuple(r[j] for j in keep) for r in ds.rows)
    return ds.derive(columns=columns, rows=rows)


def _pearson(x: list, y: list) -> float:
    """Pearson r over pairwise-observed entries; 0.0 when degenerate."""
    pairs = [(float(a), float(b)) for a, b in zip(x, y)
             if a is not MISSING and b is not MISSING]
    if len(pairs) < 2:
        return 0.0
    a = np.array([p[0] for p in pairs])
    b = np.array([p[1] for p in pairs])
    sa, sb = a.std(), b.std()
    if sa == 0.0 or sb == 0.0:
        return 0.0
    return float(((a - a.mean()) * (b - b.mean())).mean() / (sa * sb))


def _label_as_numbers(ds: Dataset, label: str) -> list:
    """Label cells as numbers: numeric pass through, others first-seen codes."""
    values = ds.column_values(label)
    if ds.schema(label).dtype in ("numeric", "timestamp"):
        return values
    codes: dict = {}
    out = []
    for v in values:
        if v is MISSING:
            out.append(MISSING)
            continue
        if v not in codes:
            codes[v] = float(len(codes))
        out.append(codes[v])
    return out


def equal_frequency_bins(values: np.ndarray, bins: int) -> np.ndarray:
    """Assign each value to one of at most ``bins`` equal-frequency bins."""
    edges = np.percentile(values, [100.0 * i / bins for i in range(1, bins)])
    return np.searchsorted(edges, values, side="right")


def mutual_information_bits(x_codes, y_codes) -> float:
    """MI of two discrete code sequences, in bits."""
    n = len(x_codes)
    joint: dict = {}
    px: dict = {}
    py: dict = {}
    for a, b in zip(x_codes, y_codes):
        joint[(a, b)] = joint.get((a, b), 0) + 1
        px[a] = px.get(a, 0) + 1
        py[b] = py.get(b, 0) + 1
    mi = 0.0
    for (a, b), c in joint.items():
        p_ab = c / n
        mi += p_ab * math.log2(p_ab * n * n / (px[a] * py[b]))
    return mi


def _discretize_column(ds: Dataset, col: str, rows: list[int], bins: int) -> list:
    idx = ds.column_index(col)
    dtype = ds.schema(col).dtype
    raw = [ds.rows[i][idx] for i in rows]
    if dtype in ("numeric", "timestamp"):
        arr = np.array([float(v) for v in raw])
        return list(equal_frequency_bins(arr, bins))
    return raw


def feature_select(ds: Dataset, method: str, params: dict, target):
    """Drop feature columns by the chosen criterion; label is protected."""
    label = ds.label_column
    if label is None:
        raise InvalidSpec("feature selection needs a label column on the dataset")

    if method == "variance_threshold":
        t = float(params.get("t", 1e-9))
        features = _candidate_features(ds, target, label, ("numeric", "timestamp"))
        dropped, scores = [], {}
        for f in features:
            a = ds.numeric_array(f)
            var = float(a.var()) if len(a) else 0.0
            scores[f] = var
            if var < t:
                dropped.append(f)
        diagnostics = {"method": method, "dropped": dropped, "variance": scores}
    elif method == "correlation_filter":
        r_max = float(params.get("r_max", 0.95))
        features = _candidate_features(ds, target, label, ("numeric", "timestamp"))
        label_values = _label_as_numbers(ds, label)
        col_values = {f: ds.column_values(f) for f in features}
        label_r = {f: abs(_pearson(col_values[f], label_values)) for f in features}
        alive = list(features)
        dropped = []
        pairs = []
        for i in range(len(features)):
            for j in range(i + 1, len(features)):
                fi, fj = features[i], features[j]
                r = _pearson(col_values[fi], col_values[fj])
                if abs(r) > r_max:
                    pairs.append((fi, fj, r))
        for fi, fj, r in pairs:
            if fi not in alive or fj not in alive:
                continue
            # drop the member less correlated with the label; ties drop the later
            victim = fj if label_r[fj] <= label_r[fi] else fi
            alive.remove(victim)
            dropped.append(victim)
        diagnostics = {"method": method, "dropped": dropped,
                       "label_correlation": label_r,
                       "flagged_pairs": [[a, b, r] for a, b, r in pairs]}
    elif method == "mutual_info_topk":
        if "k" not in params:
            raise InvalidSpec("mutual_info_topk needs a 'k' parameter")
        k = int(params["k"])
        bins = int(params.get("bins", MI_DEFAULT_BINS))
        features = _candidate_features(ds, target, label,
                                       ("numeric", "timestamp", "categorical",
                                        "text", "boolean"))
        if k > len(features):
            raise InvalidSpec(f"cannot keep k={k} of {len(features)} features")
        label_idx = ds.column_index(label)
        mi_scores = {}
        for f in features:
            f_idx = ds.column_index(f)
            rows = [i for i, r in enumerate(ds.rows)
                    if r[f_idx] is not MISSING and r[label_idx] is not MISSING]
            if not rows:
                mi_scores[f] = 0.0
                continue
            x_codes = _discretize_column(ds, f, rows, bins)
            y_codes = _discretize_column(ds, label, rows, bins)
            mi_scores[f] = mutual_information_bits(x_codes, y_codes)
        order = {f: i for i, f in enumerate(features)}
        ranked = sorted(features, key=lambda f: (-mi_scores[f], order[f]))
        kept = set(ranked[:k])
        dropped = [f for f in features if f not in kept]
        diagnostics = {"method": method, "dropped": dropped,
                       "mutual_information_bits": mi_scores,
                       "ranking": ranked}
    else:
        raise InvalidSpec(f"unknown feature selection method {method!r}")

    out = _drop_columns(ds, diagnostics["dropped"])
    return out, None, diagnostics

"""Row and column deletion: listwise deletion, explicit rows, column drop."""

from __future__ import annotations

from ..errors import EmptyResultRefused, InvalidSpec, LabelProtected
from ..tabular import MISSING, Dataset


def delete_rows_with_missing(ds: Dataset, cols):
    """Listwise deletion: drop rows missing in any of the listed columns."""
    if cols == "all" or cols is None:
        idxs = list(range(ds.n_cols))
    else:
        idxs = [ds.column_index(c) for c in cols]
    survivors = tuple(i for i, r in enumerate(ds.rows)
                      if all(r[j] is not MISSING for j in idxs))
    if not survivors and ds.n_rows > 0:
        raise EmptyResultRefused("listwise deletion would remove every row; refused")
    out = ds.derive(rows=tuple(ds.rows[i] for i in survivors))
    return out, survivors, {"mode": "rows_with_missing",
                            "removed_rows": [i for i in range(ds.n_rows)
                                             if i not in set(survivors)]}


def delete_rows_by_index(ds: Dataset, indices):
    bad = [i for i in indices if not (0 <= i < ds.n_rows)]
    if bad:
        raise InvalidSpec(f"row indices out of range: {bad[:10]}",
                          detail={"indices": bad})
    drop = set(indices)
    survivors = tuple(i for i in range(ds.n_rows) if i not in drop)
    if not survivors and ds.n_rows > 0:
        raise EmptyResultRefused("deleting these rows would empty the dataset; refused")
    out = ds.derive(rows=tuple(ds.rows[i] for i in survivors))
    return out, survivors, {"mode": "rows_by_index", "removed_rows": sorted(drop)}


def delete_columns(ds: Dataset, cols):
    for c in cols:
        ds.column_index(c)
        if c == ds.label_column:
            raise LabelProtected(f"refusing to delete the label column {c!r}")
    drop = set(cols)
    keep = [j for j, c in enumerate(ds.columns) if c.name not in drop]
    if not keep:
        raise EmptyResultRefused("deleting these columns would empty the dataset; refused")
    columns = tuple(ds.columns[j] for j in keep)
    rows = tuple(tuple(r[j] for j in keep) for r in ds.rows)
    out = ds.derive(columns=columns, rows=rows)
    return out, None, {"mode": "column", "removed_columns": sorted(drop)}

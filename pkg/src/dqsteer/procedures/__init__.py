"""DQI procedure families: parameterized, validated, pure transformations.

A :class:`ProcedureSpec` names a family, a method, parameters and target
columns; :func:`run_procedure` validates it, executes it on an immutable
snapshot and returns a :class:`ProcedureResult` whose change counts are
computed from the actual input/output diff, so they can never disagree
with the data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import InvalidSpec, LabelProtected, UnknownColumn
from ..tabular import MISSING, Dataset
from . import dedup as _dedup
from . import deletion as _deletion
from . import featsel as _featsel
from . import impute as _impute
from . import outliers as _outliers
from . import standardize as _standardize

FAMILIES = ("impute", "outlier", "delete", "standardize", "dedup", "feature_select")


@dataclass(frozen=True)
class ProcedureSpec:
    family: str
    method: str
    params: dict = field(default_factory=dict)
    target: object = "all"   # list of column names, or "all"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidSpec(f"unknown procedure family {self.family!r}")
        if self.target != "all":
            if not isinstance(self.target, (list, tuple)) or \
                    not all(isinstance(c, str) for c in self.target):
                raise InvalidSpec("target must be a list of column names or 'all'")
            object.__setattr__(self, "target", tuple(self.target))

    def to_json(self) -> dict:
        return {"family": self.family, "method": self.method,
                "params": self.params,
                "target": list(self.target) if self.target != "all" else "all"}

    def canonical(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @staticmethod
    def from_json(obj: dict) -> "ProcedureSpec":
        if not isinstance(obj, dict):
            raise InvalidSpec("procedure spec must be a JSON object")
        for key in ("family", "method"):
            if key not in obj:
                raise InvalidSpec(f"procedure spec is missing {key!r}")
        return ProcedureSpec(obj["family"], obj["method"],
                             dict(obj.get("params") or {}),
                             obj.get("target", "all"))


@dataclass(frozen=True)
class ProcedureResult:
    spec: ProcedureSpec
    input_snapshot: str
    output: Dataset
    cells_changed: int
    rows_removed: int
    cols_removed: int
    changed_columns: tuple[str, ...]
    diagnostics: dict

    def to_json(self) -> dict:
        return {"spec": self.spec.to_json(),
                "input_snapshot": self.input_snapshot,
                "output_snapshot": self.output.snapshot_id,
                "cells_changed": self.cells_changed,
                "rows_removed": self.rows_removed,
                "cols_removed": self.cols_removed,
                "changed_columns": list(self.changed_columns),
                "diagnostics": self.diagnostics}


# method -> {param: {type, default, required, doc}}
PARAM_SCHEMAS: dict = {
    "impute": {
        "mean": {},
        "median": {},
        "mode": {},
        "constant": {"value": {"type": "any", "required": True,
                               "doc": "fill value, type-compatible with the column"}},
        "knn": {"k": {"type": "int", "default": 5,
                      "doc": "number of nearest complete donor rows"}},
        "linreg": {"predictor_cols": {"type": "list[str]", "default": None,
                                      "doc": "numeric predictors; default all others"}},
    },
    "outlier": {
        "zscore": {"t": {"type": "float", "default": _outliers.ZSCORE_DEFAULT_T,
                         "doc": "|x-mean|/stddev threshold"},
                   "action": {"type": "str", "default": "to_missing",
                              "doc": "to_missing | clip_to_fence | remove_rows"}},
        "iqr": {"f": {"type": "float", "default": _outliers.IQR_DEFAULT_F,
                      "doc": "fence factor on the interquartile range"},
                "action": {"type": "str", "default": "to_missing",
                           "doc": "to_missing | clip_to_fence | remove_rows"}},
        "lof": {"k": {"type": "int", "default": _outliers.LOF_DEFAULT_K,
                      "doc": "neighborhood size"},
                "threshold": {"type": "float",
                              "default": _outliers.LOF_DEFAULT_THRESHOLD,
                              "doc": "LOF score above which a point is flagged"},
                "action": {"type": "str", "default": "to_missing",
                           "doc": "to_missing | clip_to_fence | remove_rows"}},
    },
    "delete": {
        "rows_with_missing": {},
        "rows_by_index": {"indices": {"type": "list[int]", "required": True,
                                      "doc": "0-based row indices to drop"}},
        "column": {},
    },
    "standardize": {
        "trim_whitespace": {},
        "case_fold": {"mode": {"type": "str", "default": "lower",
                               "doc": "lower | upper"}},
        "date_to_iso": {"pattern": {"type": "str", "required": True,
                                    "doc": "token pattern, e.g. DD/MM/YYYY"}},
        "numeric_unseparate": {"group_char": {"type": "str", "default": ","},
                               "decimal_char": {"type": "str", "default": "."}},
        "map_values": {"mapping": {"type": "dict", "required": True,
                                   "doc": "old value -> new value"}},
    },
    "dedup": {
        "exact": {},
        "fuzzy": {"key_cols": {"type": "list[str]", "required": True,
                               "doc": "text columns compared by edit distance"},
                  "similarity_threshold": {"type": "float", "default": 0.9,
                                           "doc": "group rows at or above this"}},
    },
    "feature_select": {
        "variance_threshold": {"t": {"type": "float", "default": 1e-9,
                                     "doc": "drop numeric features below this variance"}},
        "correlation_filter": {"r_max": {"type": "float", "default": 0.95,
                                         "doc": "|pearson r| above which a pair is pruned"}},
        "mutual_info_topk": {"k": {"type": "int", "required": True,
                                   "doc": "number of features to keep"},
                             "bins": {"type": "int",
                                      "default": _featsel.MI_DEFAULT_BINS,
                                      "doc": "equal-frequency bins for numerics"}},
    },
}


def method_schema() -> dict:
    """Discovery payload: families, methods, and their parameter schemas."""
    return {family: {method: {name: dict(meta) for name, meta in params.items()}
                     for method, params in methods.items()}
            for family, methods in PARAM_SCHEMAS.items()}


def validate_spec(spec: ProcedureSpec, ds: Dataset) -> ProcedureSpec:
    """Check family/method/params against the schema and the dataset."""
    methods = PARAM_SCHEMAS.get(spec.family)
    if spec.method not in methods:
        raise InvalidSpec(f"unknown method {spec.method!r} for family {spec.family!r}")
    schema = methods[spec.method]
    for name in spec.params:
        if name not in schema:
            raise InvalidSpec(f"unknown parameter {name!r} for "
                              f"{spec.family}/{spec.method}")
    for name, meta in schema.items():
        if meta.get("required") and name not in spec.params:
            raise InvalidSpec(f"{spec.family}/{spec.method} requires parameter {name!r}")
    if spec.target != "all":
        for col in spec.target:
            ds.column_index(col)
    return spec


def _target_columns(spec: ProcedureSpec, ds: Dataset, eligible) -> list[str]:
    if spec.target == "all":
        return [c.name for c in ds.columns if eligible(c)]
    return list(spec.target)


def _diff(before: Dataset, after: Dataset, survivors) -> tuple[int, int, int, tuple]:
    before_cols = {c.name: i for i, c in enumerate(before.columns)}
    after_cols = {c.name: i for i, c in enumerate(after.columns)}
    cols_removed = sum(1 for n in before_cols if n not in after_cols)
    rows_removed = before.n_rows - after.n_rows
    if survivors is None:
        survivors = range(before.n_rows)
    shared = [(n, before_cols[n], after_cols[n])
              for n in before_cols if n in after_cols]
    cells_changed = 0
    changed_columns = []
    for out_i, in_i in enumerate(survivors):
        brow = before.rows[in_i]
        arow = after.rows[out_i]
        for name, bi, ai in shared:
            bv, av = brow[bi], arow[ai]
            if (bv is MISSING) != (av is MISSING) or \
                    (bv is not MISSING and (type(bv) is not type(av) or bv != av)):
                cells_changed += 1
                if name not in changed_columns:
                    changed_columns.append(name)
    return cells_changed, rows_removed, cols_removed, tuple(changed_columns)


def run_procedure(ds: Dataset, spec: ProcedureSpec) -> ProcedureResult:
    """Validate and execute a procedure; the input snapshot is never mutated."""
    spec = validate_spec(spec, ds)
    params = dict(spec.params)
    diagnostics: dict = {}
    survivors = None

    if spec.family == "impute":
        cols = _target_columns(
            spec, ds,
            lambda c: any(v is MISSING for v in ds.column_values(c.name))
            and any(v is not MISSING for v in ds.column_values(c.name)))
        if spec.target != "all" and not cols:
            raise InvalidSpec("impute needs at least one target column")
        out = ds
        per_column = []
        for col in cols:
            out, _, d = _impute.impute_column(out, col, spec.method, params)
            per_column.append(d)
        diagnostics = {"columns": per_column}
    elif spec.family == "outlier":
        cols = _target_columns(
            spec, ds, lambda c: c.dtype in ("numeric", "timestamp"))
        if len(cols) != 1:
            raise InvalidSpec("outlier procedures target exactly one column")
        action = params.pop("action", "to_missing")
        flags = _outliers.detect(ds, cols[0], spec.method, params)
        out, survivors, diagnostics = _outliers.treat(ds, flags, action)
        diagnostics["detection"] = flags.to_json()
    elif spec.family == "delete":
        if spec.method == "rows_with_missing":
            cols = spec.target if spec.target != "all" else "all"
            out, survivors, diagnostics = _deletion.delete_rows_with_missing(ds, cols)
        elif spec.method == "rows_by_index":
            out, survivors, diagnostics = _deletion.delete_rows_by_index(
                ds, list(params["indices"]))
        else:
            if spec.target == "all":
                raise InvalidSpec("column deletion needs explicit target columns")
            out, survivors, diagnostics = _deletion.delete_columns(ds, list(spec.target))
    elif spec.family == "standardize":
        cols = _target_columns(
            spec, ds, lambda c: c.dtype in ("categorical", "text"))
        if not cols:
            raise InvalidSpec("standardize needs at least one string target column")
        out = ds
        per_column = []
        for col in cols:
            out, _, d = _standardize.standardize_column(out, col, spec.method, params)
            per_column.append(d)
        diagnostics = {"columns": per_column}
    elif spec.family == "dedup":
        out, survivors, diagnostics = _dedup.dedup(ds, spec.method, params)
    else:  # feature_select
        target = spec.target if spec.target != "all" else "all"
        out, survivors, diagnostics = _featsel.feature_select(
            ds, spec.method, params, target)

    cells_changed, rows_removed, cols_removed, changed_cols = _diff(ds, out, survivors)
    return ProcedureResult(spec=spec, input_snapshot=ds.snapshot_id, output=out,
                           cells_changed=cells_changed, rows_removed=rows_removed,
                           cols_removed=cols_removed, changed_columns=changed_cols,
                           diagnostics=diagnostics)

"""Data-quality dimension scoring.

Five dimensions are scored in [0,1]: completeness, uniqueness, validity,
consistency and outlier freedom.  A dimension that has no evidence to
score against (no declared rules, no configured detector) is *undefined*
and is excluded from the overall mean rather than counted as perfect.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DegenerateInput, DqError, InvalidInput
from .procedures import dedup as _dedup
from .procedures import outliers as _outliers
from .rules import Rule, cell_is_valid, evaluate_rules, parse_rule
from .tabular import MISSING, Dataset

DIMENSIONS = ("completeness", "uniqueness", "validity", "consistency",
              "outlier_freedom")


@dataclass(frozen=True)
class DimensionScores:
    completeness: float | None
    uniqueness: float | None
    validity: float | None
    consistency: float | None
    outlier_freedom: float | None
    overall: float | None

    def to_json(self) -> dict:
        return {name: getattr(self, name)
                for name in DIMENSIONS + ("overall",)}


def _overall(parts: dict, weights: dict) -> float | None:
    defined = [(name, score) for name, score in parts.items() if score is not None]
    if not defined:
        return None
    total = sum(weights.get(name, 1.0) for name, _ in defined)
    if total <= 0:
        raise InvalidInput("dimension weights for the defined dimensions sum to zero")
    return sum(weights.get(name, 1.0) * score for name, score in defined) / total


def build_scores(parts: dict, weights: dict | None = None) -> DimensionScores:
    weights = weights or {}
    for name, w in weights.items():
        if name not in DIMENSIONS:
            raise InvalidInput(f"unknown dimension {name!r} in weights")
        if not (w >= 0):
            raise InvalidInput(f"weight for {name} must be non-negative")
    full = {name: parts.get(name) for name in DIMENSIONS}
    return DimensionScores(overall=_overall(full, weights), **full)


def completeness(ds: Dataset, col: str | None = None) -> float:
    """1 − missing/total over one column or the whole dataset; empty → 1.0."""
    if col is not None:
        values = ds.column_values(col)
        total = len(values)
        missing = sum(1 for v in values if v is MISSING)
    else:
        total = ds.n_rows * ds.n_cols
        missing = sum(1 for row in ds.rows for v in row if v is MISSING)
    if total == 0:
        return 1.0
    return 1.0 - missing / total


def uniqueness(ds: Dataset) -> tuple[float, list[list[int]]]:
    """1 − (duplicate rows beyond first occurrence)/rows, plus the groups."""
    groups = [list(g) for g in _dedup.exact_duplicate_groups(ds)]
    extra = sum(len(g) - 1 for g in groups)
    ratio = 1.0 if ds.n_rows == 0 else 1.0 - extra / ds.n_rows
    return ratio, groups


def validity(ds: Dataset, col: str) -> tuple[float | None, list[int]]:
    """Fraction of non-missing cells meeting declared format/domain rules.

    Undefined (None) when the column declares neither; a column whose
    observed cells all pass — vacuously, if none are observed — scores 1.0.
    """
    schema = ds.schema(col)
    if schema.declared_format is None and schema.domain_rule is None:
        return None, []
    violations = []
    observed = 0
    for i, v in enumerate(ds.column_values(col)):
        if v is MISSING:
            continue
        observed += 1
        if not cell_is_valid(v, schema):
            violations.append(i)
    ratio = 1.0 if observed == 0 else 1.0 - len(violations) / observed
    return ratio, violations


def _parse_rules(ds: Dataset, rules: list) -> list[Rule]:
    parsed = []
    for i, r in enumerate(rules):
        if isinstance(r, Rule):
            parsed.append(r)
            continue
        try:
            parsed.append(parse_rule(r, ds.column_names))
        except DqError as err:
            raise type(err)(f"rule {i}: {err.message}", detail={"rule": i}) \
                from err
    return parsed


def consistency(ds: Dataset, rules: list) -> tuple[float | None, list[int]]:
    """Fraction of rule-eligible rows satisfying every rule; [] rules → None."""
    if not rules:
        return None, []
    parsed = _parse_rules(ds, rules)
    eligible, satisfied = evaluate_rules(ds, parsed)
    violating = [i for i, (e, s) in enumerate(zip(eligible, satisfied))
                 if e and not s]
    n_eligible = sum(eligible)
    ratio = 1.0 if n_eligible == 0 else \
        (n_eligible - len(violating)) / n_eligible
    return ratio, violating


def outlier_freedom(ds: Dataset, col: str, method: str,
                    params: dict | None = None) -> tuple[float, _outliers.OutlierFlags]:
    """1 − flagged/eligible using the same detectors the procedures run."""
    flags = _outliers.detect(ds, col, method, params or {})
    ratio = 1.0 if flags.eligible == 0 else 1.0 - len(flags.flagged) / flags.eligible
    return ratio, flags


@dataclass(frozen=True)
class QualityConfig:
    consistency_rules: tuple[str, ...] = ()
    outlier_method: str | None = None
    outlier_params: dict = field(default_factory=dict)
    dimension_weights: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "consistency_rules",
                           tuple(self.consistency_rules))

    def to_json(self) -> dict:
        return {"consistency_rules": list(self.consistency_rules),
                "outlier_method": self.outlier_method,
                "outlier_params": dict(self.outlier_params),
                "dimension_weights": dict(self.dimension_weights)}

    @staticmethod
    def from_json(obj: dict) -> "QualityConfig":
        return QualityConfig(
            consistency_rules=tuple(obj.get("consistency_rules") or ()),
            outlier_method=obj.get("outlier_method"),
            outlier_params=dict(obj.get("outlier_params") or {}),
            dimension_weights=dict(obj.get("dimension_weights") or {}))


@dataclass(frozen=True)
class QualityReport:
    snapshot_id: str
    per_column: dict
    dataset: DimensionScores
    issues: dict

    def to_json(self) -> dict:
        return {"snapshot_id": self.snapshot_id,
                "per_column": {col: {"scores": entry["scores"].to_json(),
                                     "issues": entry["issues"]}
                               for col, entry in self.per_column.items()},
                "dataset": self.dataset.to_json(),
                "issues": self.issues}


def quality_report(ds: Dataset, config: QualityConfig | None = None) -> QualityReport:
    """Score every dimension the config gives evidence for, per column and overall."""
    config = config or QualityConfig()
    weights = dict(config.dimension_weights)

    uniq_ratio, groups = uniqueness(ds)
    group_of_row: dict[int, int] = {}
    for gid, g in enumerate(groups):
        for r in g:
            group_of_row[r] = gid

    rules = _parse_rules(ds, list(config.consistency_rules))
    cons_ratio, cons_violations = consistency(ds, rules)
    rule_cols = sorted({c for r in rules for c in r.columns})

    per_column: dict = {}
    valid_observed = 0
    valid_bad = 0
    any_validity = False
    out_eligible = 0
    out_flagged = 0
    any_outliers = False

    for schema in ds.columns:
        col = schema.name
        values = ds.column_values(col)
        missing_rows = [i for i, v in enumerate(values) if v is MISSING]
        comp = 1.0 if not values else 1.0 - len(missing_rows) / len(values)

        val_ratio, violations = validity(ds, col)
        if val_ratio is not None:
            any_validity = True
            observed = sum(1 for v in values if v is not MISSING)
            valid_observed += observed
            valid_bad += len(violations)

        out_ratio = None
        flag_rows: list[int] = []
        if config.outlier_method is not None and \
                schema.dtype in ("numeric", "timestamp"):
            try:
                out_ratio, flags = outlier_freedom(
                    ds, col, config.outlier_method, config.outlier_params)
            except DegenerateInput:
                out_ratio = None   # too few observed values to score
            else:
                any_outliers = True
                out_eligible += flags.eligible
                out_flagged += len(flags.flagged)
                flag_rows = list(flags.flagged)

        col_violating = []
        if col in rule_cols:
            referencing = [r for r in rules if col in r.columns]
            _, col_viol = consistency(ds, referencing)
            col_violating = col_viol

        scores = build_scores({"completeness": comp, "uniqueness": None,
                               "validity": val_ratio, "consistency": None,
                               "outlier_freedom": out_ratio}, weights)
        per_column[col] = {"scores": scores,
                           "issues": {"missing_rows": missing_rows,
                                      "rule_violations": col_violating,
                                      "outlier_flags": flag_rows}}

    dataset_parts = {
        "completeness": completeness(ds),
        "uniqueness": uniq_ratio,
        "validity": (None if not any_validity else
                     (1.0 if valid_observed == 0
                      else 1.0 - valid_bad / valid_observed)),
        "consistency": cons_ratio,
        "outlier_freedom": (None if not any_outliers else
                            (1.0 if out_eligible == 0
                             else 1.0 - out_flagged / out_eligible)),
    }
    dataset_scores = build_scores(dataset_parts, weights)
    issues = {"duplicate_groups": groups,
              "duplicate_group_of_row": group_of_row,
              "rule_violations": cons_violations}
    return QualityReport(snapshot_id=ds.snapshot_id, per_column=per_column,
                         dataset=dataset_scores, issues=issues)

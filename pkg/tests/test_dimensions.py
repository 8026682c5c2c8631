"""Dimension scores: hand-computed oracles, undefined handling, invariances."""

import random

import pytest

from dqsteer.dimensions import (
    DIMENSIONS,
    QualityConfig,
    build_scores,
    completeness,
    consistency,
    outlier_freedom,
    quality_report,
    uniqueness,
    validity,
)
from dqsteer.errors import DqError, InvalidInput, UnknownColumn
from dqsteer.tabular import MISSING, ColumnSchema, Dataset

from conftest import random_dataset


def make_ds(cols, rows, **kw):
    return Dataset(columns=tuple(ColumnSchema(*c) for c in cols), rows=rows, **kw)


def naive_scores(ds, config):
    """Independent naive-scan recomputation of the dataset-level scores."""
    total = ds.n_rows * ds.n_cols
    missing = sum(1 for row in ds.rows for v in row if v is MISSING)
    comp = 1.0 if total == 0 else 1.0 - missing / total

    seen = {}
    extra = 0
    for row in ds.rows:
        key = tuple((v is MISSING, None if v is MISSING else v) for v in row)
        if key in seen:
            extra += 1
        else:
            seen[key] = True
    uniq = 1.0 if ds.n_rows == 0 else 1.0 - extra / ds.n_rows

    from dqsteer.rules import cell_is_valid, evaluate_rules, parse_rule
    observed = bad = 0
    ruled = False
    for schema in ds.columns:
        if schema.declared_format is None and schema.domain_rule is None:
            continue
        ruled = True
        for v in ds.column_values(schema.name):
            if v is MISSING:
                continue
            observed += 1
            if not cell_is_valid(v, schema):
                bad += 1
    val = None if not ruled else (1.0 if observed == 0 else 1.0 - bad / observed)

    cons = None
    if config.consistency_rules:
        rules = [parse_rule(r, ds.column_names) for r in config.consistency_rules]
        eligible, satisfied = evaluate_rules(ds, rules)
        n_el = sum(eligible)
        n_bad = sum(1 for e, s in zip(eligible, satisfied) if e and not s)
        cons = 1.0 if n_el == 0 else (n_el - n_bad) / n_el

    return {"completeness": comp, "uniqueness": uniq, "validity": val,
            "consistency": cons}


class TestCompleteness:
    def test_five_missing_in_a_hundred_cells(self):
        cols = [(f"c{j}", "numeric") for j in range(10)]
        rows = [[float(i * 10 + j) for j in range(10)] for i in range(10)]
        rows[0][0] = rows[1][3] = rows[4][7] = rows[8][2] = rows[9][9] = MISSING
        ds = make_ds(cols, rows)
        assert completeness(ds) == pytest.approx(0.95)

    def test_per_column(self):
        ds = make_ds([("a", "numeric"), ("b", "numeric")],
                     [(1.0, MISSING), (MISSING, MISSING), (3.0, 3.0)])
        assert completeness(ds, "a") == pytest.approx(2 / 3)
        assert completeness(ds, "b") == pytest.approx(1 / 3)
        assert completeness(ds) == pytest.approx(3 / 6)

    def test_empty_dataset_is_vacuously_complete(self):
        ds = make_ds([("a", "numeric")], [])
        assert completeness(ds) == 1.0
        assert completeness(ds, "a") == 1.0

    def test_issue_count_matches_score(self):
        # round((1 - score) * total) recovers the number of missing cells
        ds = random_dataset(seed=7, n_rows=50, missing_rate=0.2)
        total = ds.n_rows * ds.n_cols
        missing = sum(1 for row in ds.rows for v in row if v is MISSING)
        assert round((1.0 - completeness(ds)) * total) == missing


class TestUniqueness:
    def test_two_of_four_rows_identical(self):
        ds = make_ds([("a", "numeric"), ("b", "text")],
                     [(1.0, "x"), (2.0, "y"), (1.0, "x"), (3.0, "z")])
        ratio, groups = uniqueness(ds)
        assert ratio == pytest.approx(0.75)
        assert groups == [[0, 2]]

    def test_missing_cells_compare_equal_to_each_other(self):
        ds = make_ds([("a", "numeric")], [(MISSING,), (MISSING,), (1.0,)])
        ratio, groups = uniqueness(ds)
        assert ratio == pytest.approx(2 / 3)
        assert groups == [[0, 1]]

    def test_all_distinct(self):
        ds = make_ds([("a", "numeric")], [(1.0,), (2.0,), (3.0,)])
        ratio, groups = uniqueness(ds)
        assert ratio == 1.0 and groups == []

    def test_empty_dataset(self):
        ds = make_ds([("a", "numeric")], [])
        assert uniqueness(ds) == (1.0, [])


class TestValidity:
    def test_range_rule_two_of_three_pass(self):
        ds = make_ds(
            [("age", "numeric", None, {"kind": "range", "min": 0, "max": 120})],
            [(30.0,), (150.0,), (MISSING,), (45.0,)])
        ratio, violations = validity(ds, "age")
        assert ratio == pytest.approx(2 / 3)
        assert violations == [1]

    def test_undefined_without_declared_rules(self):
        ds = make_ds([("a", "numeric")], [(1.0,)])
        assert validity(ds, "a") == (None, [])

    def test_all_missing_is_vacuously_valid(self):
        ds = make_ds(
            [("d", "text", "iso_date", None)],
            [(MISSING,), (MISSING,)])
        ratio, violations = validity(ds, "d")
        assert ratio == 1.0 and violations == []

    def test_format_rule_on_text(self):
        ds = make_ds([("d", "text", "iso_date", None)],
                     [("2020-01-01",), ("2020-02-31",), ("nope",)])
        ratio, violations = validity(ds, "d")
        assert ratio == pytest.approx(1 / 3)
        assert violations == [1, 2]


class TestConsistency:
    def test_end_at_least_start(self):
        ds = make_ds([("start", "numeric"), ("end", "numeric")],
                     [(1.0, 2.0), (3.0, 1.0), (2.0, 2.0), (MISSING, 5.0)])
        ratio, violating = consistency(ds, ["end >= start"])
        assert ratio == pytest.approx(2 / 3)
        assert violating == [1]

    def test_no_rules_is_undefined(self):
        ds = make_ds([("a", "numeric")], [(1.0,)])
        assert consistency(ds, []) == (None, [])

    def test_no_eligible_rows_is_vacuously_consistent(self):
        ds = make_ds([("a", "numeric")], [(MISSING,), (MISSING,)])
        ratio, violating = consistency(ds, ["a > 0"])
        assert ratio == 1.0 and violating == []

    def test_malformed_rule_error_names_its_index(self):
        ds = make_ds([("a", "numeric")], [(1.0,)])
        with pytest.raises(DqError, match="rule 1"):
            consistency(ds, ["a > 0", "a >"])
        with pytest.raises(UnknownColumn, match="rule 0"):
            consistency(ds, ["b > 0"])


class TestOutlierFreedom:
    def test_zscore_flags_lone_extreme(self):
        rows = [(float(v),) for v in [10, 11, 9, 10, 12, 10, 11, 9, 10, 500]]
        ds = make_ds([("x", "numeric")], rows)
        ratio, flags = outlier_freedom(ds, "x", "zscore", {"t": 2.0})
        assert flags.flagged == (9,)
        assert ratio == pytest.approx(0.9)

    def test_missing_cells_are_not_eligible(self):
        rows = [(float(v),) for v in [10, 11, 9, 10, 12, 10, 11, 9]] + [(MISSING,)]
        ds = make_ds([("x", "numeric")], rows)
        ratio, flags = outlier_freedom(ds, "x", "iqr", {"f": 1.5})
        assert flags.eligible == 8
        assert ratio == 1.0


class TestOverall:
    def test_unweighted_mean_of_defined_dimensions(self):
        scores = build_scores({"completeness": 0.9, "uniqueness": 0.8,
                               "validity": None, "consistency": 0.7,
                               "outlier_freedom": None})
        assert scores.overall == pytest.approx((0.9 + 0.8 + 0.7) / 3)
        assert scores.validity is None

    def test_weighted_mean(self):
        scores = build_scores(
            {"completeness": 1.0, "uniqueness": 0.5, "validity": 0.0,
             "consistency": None, "outlier_freedom": None},
            weights={"completeness": 2.0, "uniqueness": 1.0, "validity": 1.0})
        assert scores.overall == pytest.approx((2.0 * 1.0 + 0.5 + 0.0) / 4.0)

    def test_all_undefined_overall_is_none(self):
        scores = build_scores({name: None for name in DIMENSIONS})
        assert scores.overall is None

    def test_zero_weight_on_every_defined_dimension_rejected(self):
        with pytest.raises(InvalidInput):
            build_scores({"completeness": 1.0, "uniqueness": None,
                          "validity": None, "consistency": None,
                          "outlier_freedom": None},
                         weights={"completeness": 0.0})

    def test_negative_weight_rejected(self):
        with pytest.raises(InvalidInput):
            build_scores({"completeness": 1.0}, weights={"completeness": -1.0})

    def test_unknown_weight_key_rejected(self):
        with pytest.raises(InvalidInput):
            build_scores({"completeness": 1.0}, weights={"sparkle": 1.0})


class TestQualityReport:
    def test_clean_dataset_scores_one_everywhere_defined(self):
        ds = make_ds(
            [("a", "numeric", None, {"kind": "range", "min": 0}),
             ("b", "text")],
            [(1.0, "x"), (2.0, "y"), (3.0, "z")])
        rep = quality_report(ds, QualityConfig(consistency_rules=("a > 0",)))
        d = rep.dataset
        assert d.completeness == 1.0
        assert d.uniqueness == 1.0
        assert d.validity == 1.0
        assert d.consistency == 1.0
        assert d.outlier_freedom is None  # no detector configured
        assert d.overall == 1.0

    def test_default_config_leaves_ruleless_dimensions_undefined(self):
        ds = make_ds([("a", "numeric")], [(1.0,), (2.0,)])
        rep = quality_report(ds)
        assert rep.dataset.validity is None
        assert rep.dataset.consistency is None
        assert rep.dataset.outlier_freedom is None
        assert rep.dataset.overall == pytest.approx(1.0)

    def test_dataset_validity_pools_cells_across_columns(self):
        # micro-average: (2 bad of 5 observed) pooled over both ruled columns
        ds = make_ds(
            [("a", "numeric", None, {"kind": "range", "min": 0}),
             ("b", "numeric", None, {"kind": "range", "max": 10})],
            [(1.0, 5.0), (-1.0, 50.0), (2.0, MISSING)])
        rep = quality_report(ds)
        assert rep.dataset.validity == pytest.approx(1.0 - 2 / 5)
        assert rep.per_column["a"]["scores"].validity == pytest.approx(2 / 3)
        assert rep.per_column["b"]["scores"].validity == pytest.approx(1 / 2)

    def test_per_column_issue_lists(self):
        ds = make_ds(
            [("start", "numeric"), ("end", "numeric")],
            [(1.0, 2.0), (3.0, 1.0), (MISSING, 2.0)])
        rep = quality_report(ds, QualityConfig(consistency_rules=("end >= start",)))
        assert rep.per_column["start"]["issues"]["missing_rows"] == [2]
        assert rep.per_column["start"]["issues"]["rule_violations"] == [1]
        assert rep.per_column["end"]["issues"]["rule_violations"] == [1]
        assert rep.issues["rule_violations"] == [1]

    def test_duplicate_bookkeeping(self):
        ds = make_ds([("a", "numeric")], [(1.0,), (1.0,), (2.0,), (1.0,)])
        rep = quality_report(ds)
        assert rep.issues["duplicate_groups"] == [[0, 1, 3]]
        assert rep.issues["duplicate_group_of_row"] == {0: 0, 1: 0, 3: 0}
        assert rep.dataset.uniqueness == pytest.approx(0.5)

    def test_outlier_dimension_micro_average(self):
        rows = [(float(v), float(w))
                for v, w in zip([10, 11, 9, 10, 12, 10, 11, 9, 10, 500],
                                [5, 5, 6, 5, 4, 5, 6, 5, 4, 5])]
        ds = make_ds([("x", "numeric"), ("y", "numeric")], rows)
        rep = quality_report(ds, QualityConfig(outlier_method="zscore",
                                               outlier_params={"t": 2.0}))
        # one flag among 20 eligible cells
        assert rep.dataset.outlier_freedom == pytest.approx(1.0 - 1 / 20)
        assert rep.per_column["x"]["issues"]["outlier_flags"] == [9]
        assert rep.per_column["x"]["scores"].outlier_freedom == pytest.approx(0.9)
        assert rep.per_column["y"]["scores"].outlier_freedom == 1.0

    def test_column_uniqueness_and_consistency_stay_dataset_level(self):
        ds = make_ds([("a", "numeric")], [(1.0,), (1.0,)])
        rep = quality_report(ds)
        assert rep.per_column["a"]["scores"].uniqueness is None
        assert rep.per_column["a"]["scores"].consistency is None

    def test_report_is_row_permutation_invariant(self):
        ds = random_dataset(seed=3, n_rows=30)
        config = QualityConfig(consistency_rules=("n1 between -1000 and 1000",))
        rep = quality_report(ds, config)
        rng = random.Random(5)
        order = list(range(ds.n_rows))
        rng.shuffle(order)
        shuffled = ds.derive(rows=[ds.rows[i] for i in order])
        rep2 = quality_report(shuffled, config)
        for name in DIMENSIONS + ("overall",):
            a, b = getattr(rep.dataset, name), getattr(rep2.dataset, name)
            if a is None:
                assert b is None
            else:
                assert a == pytest.approx(b)

    def test_fixing_missing_cells_never_lowers_completeness(self):
        ds = random_dataset(seed=9, n_rows=40, missing_rate=0.3)
        base = quality_report(ds).dataset.completeness
        # fill every missing numeric cell with 0
        fixed_rows = []
        for row in ds.rows:
            fixed_rows.append(tuple(
                (0.0 if v is MISSING and c.dtype == "numeric" else v)
                for v, c in zip(row, ds.columns)))
        fixed = ds.derive(rows=fixed_rows)
        assert quality_report(fixed).dataset.completeness >= base

    def test_matches_naive_scan_on_random_fixtures(self):
        for seed in range(12):
            ds = random_dataset(seed=seed, n_rows=35,
                                missing_rate=0.2, dup_rate=0.15)
            config = QualityConfig(consistency_rules=("n1 <= n2",))
            rep = quality_report(ds, config)
            want = naive_scores(ds, config)
            for name, expected in want.items():
                got = getattr(rep.dataset, name)
                if expected is None:
                    assert got is None, name
                else:
                    assert got == pytest.approx(expected, abs=1e-12), (seed, name)

    def test_report_serializes(self):
        import json
        ds = random_dataset(seed=2, n_rows=15)
        rep = quality_report(ds)
        blob = json.dumps(rep.to_json())
        assert ds.snapshot_id in blob

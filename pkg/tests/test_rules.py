"""Format rules, domain rules, and the consistency-rule grammar."""

import pytest

from dqsteer.errors import InvalidRule, UnknownColumn
from dqsteer.rules import (
    Operand,
    cell_is_valid,
    check_domain,
    check_format,
    evaluate_rules,
    parse_rule,
)
from dqsteer.tabular import MISSING, ColumnSchema, Dataset


def make_ds(cols, rows, **kw):
    return Dataset(columns=tuple(ColumnSchema(*c) for c in cols), rows=rows, **kw)


# -- format rules -----------------------------------------------------------


class TestFormatChecks:
    def test_iso_date_accepts_real_dates(self):
        assert check_format("iso_date", "2020-01-31")
        assert check_format("iso_date", "2000-02-29")  # leap year

    def test_iso_date_rejects_calendar_impossible(self):
        assert not check_format("iso_date", "2020-02-31")
        assert not check_format("iso_date", "2021-13-01")
        assert not check_format("iso_date", "2100-02-29")  # not a leap year

    def test_iso_date_rejects_wrong_shape(self):
        for bad in ("2020-1-01", "20200101", "01-02-2020", "2020-01-02T00:00",
                    "2020-01-02 ", " 2020-01-02", ""):
            assert not check_format("iso_date", bad), bad

    def test_iso_datetime_accepts_t_and_space_separators(self):
        assert check_format("iso_datetime", "2020-01-02T03:04:05")
        assert check_format("iso_datetime", "2020-01-02 03:04:05")
        assert check_format("iso_datetime", "2020-01-02T03:04")      # seconds optional
        assert check_format("iso_datetime", "2020-01-02T03:04:05Z")  # trailing Z ok

    def test_iso_datetime_rejects_bad_clock_values(self):
        assert not check_format("iso_datetime", "2020-01-02T25:00:00")
        assert not check_format("iso_datetime", "2020-01-02T03:61")
        assert not check_format("iso_datetime", "2020-02-31T00:00")
        assert not check_format("iso_datetime", "2020-01-02")

    def test_regex_uses_fullmatch(self):
        assert check_format("regex:[A-Z]{2}\\d{3}", "AB123")
        assert not check_format("regex:[A-Z]{2}\\d{3}", "AB123X")  # partial is not enough
        assert not check_format("regex:[A-Z]{2}\\d{3}", "xAB123")

    def test_unknown_format_id_raises(self):
        with pytest.raises(InvalidRule):
            check_format("us_date", "01/02/2020")


class TestDomainChecks:
    def test_range_closed(self):
        rule = {"kind": "range", "min": 0, "max": 10}
        assert check_domain(rule, 0.0, "numeric")
        assert check_domain(rule, 10.0, "numeric")
        assert not check_domain(rule, -0.001, "numeric")
        assert not check_domain(rule, 10.5, "numeric")

    def test_range_open_ended(self):
        assert check_domain({"kind": "range", "min": 0}, 1e12, "numeric")
        assert not check_domain({"kind": "range", "min": 0}, -1.0, "numeric")
        assert check_domain({"kind": "range", "max": 5}, -1e12, "numeric")
        assert not check_domain({"kind": "range", "max": 5}, 5.1, "numeric")

    def test_set_direct_membership(self):
        rule = {"kind": "set", "values": ["a", "b"]}
        assert check_domain(rule, "a", "categorical")
        assert not check_domain(rule, "c", "categorical")

    def test_set_membership_via_rendered_form(self):
        # a numeric cell can satisfy a set whose values were written as strings
        rule = {"kind": "set", "values": ["2.0", "3.0"]}
        assert check_domain(rule, 2.0, "numeric")
        assert not check_domain(rule, 4.0, "numeric")

    def test_unknown_domain_kind_raises(self):
        with pytest.raises(InvalidRule):
            check_domain({"kind": "enum", "values": []}, "a", "categorical")


class TestCellIsValid:
    def test_no_rules_means_valid(self):
        schema = ColumnSchema("c", "text")
        assert cell_is_valid("anything", schema)

    def test_format_and_domain_must_both_hold(self):
        schema = ColumnSchema("d", "text", declared_format="iso_date",
                              domain_rule={"kind": "set", "values": ["2020-01-01"]})
        assert cell_is_valid("2020-01-01", schema)
        assert not cell_is_valid("2020-01-02", schema)   # format ok, domain fails
        assert not cell_is_valid("2020-13-01", schema)   # format fails

    def test_numeric_range_on_schema(self):
        schema = ColumnSchema("age", "numeric",
                              domain_rule={"kind": "range", "min": 0, "max": 120})
        assert cell_is_valid(35.0, schema)
        assert not cell_is_valid(-1.0, schema)


# -- grammar: parsing -------------------------------------------------------


COLS = ("start", "end", "age", "sex", "note", "flag")


class TestParseRule:
    def test_column_vs_column_comparison(self):
        rule = parse_rule("end >= start", COLS)
        assert len(rule.clauses) == 1
        cl = rule.clauses[0]
        assert cl.kind == "cmp" and cl.op == ">=" and cl.column == "end"
        assert cl.rhs == Operand("column", "start")
        assert rule.columns == ["end", "start"]

    def test_all_comparison_operators_parse(self):
        for op in ("<", "<=", ">", ">=", "==", "!="):
            rule = parse_rule(f"age {op} 10", COLS)
            assert rule.clauses[0].op == op
            assert rule.clauses[0].rhs == Operand("number", 10.0)

    def test_in_set_with_bare_and_quoted_members(self):
        rule = parse_rule("sex in {M, F, 'not stated'}", COLS)
        cl = rule.clauses[0]
        assert cl.kind == "in"
        assert [o.value for o in cl.values] == ["M", "F", "not stated"]
        # members are literals, never column references, even if they match a name
        rule2 = parse_rule("note in {start}", COLS)
        assert rule2.clauses[0].values[0] == Operand("string", "start")
        assert rule2.columns == ["note"]

    def test_in_set_numeric_and_bool_members(self):
        rule = parse_rule("age in {1, 2.5, true}", COLS)
        kinds = [o.kind for o in rule.clauses[0].values]
        assert kinds == ["number", "number", "bool"]

    def test_between_parses_bounds(self):
        rule = parse_rule("age between 0 and 120", COLS)
        cl = rule.clauses[0]
        assert cl.kind == "between" and cl.lo == 0.0 and cl.hi == 120.0

    def test_clauses_join_with_and(self):
        rule = parse_rule("end >= start and age > 0 and sex in {M, F}", COLS)
        assert [c.kind for c in rule.clauses] == ["cmp", "cmp", "in"]
        assert rule.columns == ["end", "start", "age", "sex"]

    def test_quoted_string_rhs_with_spaces_and_escapes(self):
        rule = parse_rule('note == "a, b"', COLS)
        assert rule.clauses[0].rhs == Operand("string", "a, b")
        rule2 = parse_rule(r"note == 'it\'s'", COLS)
        assert rule2.clauses[0].rhs == Operand("string", "it's")

    def test_bare_word_rhs_not_a_column_is_a_string(self):
        rule = parse_rule("sex == M", COLS)
        assert rule.clauses[0].rhs == Operand("string", "M")

    def test_rhs_matching_column_name_is_a_reference(self):
        rule = parse_rule("end == start", COLS)
        assert rule.clauses[0].rhs == Operand("column", "start")

    def test_true_false_rhs_are_booleans(self):
        rule = parse_rule("flag == true", COLS)
        assert rule.clauses[0].rhs == Operand("bool", True)
        rule = parse_rule("flag != FALSE", COLS)
        assert rule.clauses[0].rhs == Operand("bool", False)


class TestParseErrors:
    @pytest.mark.parametrize("text", [
        "",                       # empty
        "   ",                    # whitespace only
        "age",                    # dangling column
        "age >=",                 # missing rhs
        "age in 1 2",             # in without braces
        "age in {1, 2",           # unterminated set
        "age between 0 120",      # missing 'and'
        "age between 0 and",      # truncated between
        "age between x and 10",   # non-numeric bound
        "age ~ 5",                # unknown operator
        "age > 1 or age < 9",     # clauses joined with 'or'
        "age > 1 and",            # trailing and
    ])
    def test_malformed_rules_raise(self, text):
        with pytest.raises(InvalidRule):
            parse_rule(text, COLS)

    def test_unknown_column_is_its_own_error(self):
        with pytest.raises(UnknownColumn, match="nope"):
            parse_rule("nope > 1", COLS)
        # ...including a column mentioned after 'and'
        with pytest.raises(UnknownColumn):
            parse_rule("age > 1 and nope < 2", COLS)


# -- grammar: evaluation ----------------------------------------------------


class TestEvaluateRules:
    def test_column_comparison_with_missing_row_excluded(self):
        ds = make_ds(
            [("start", "numeric"), ("end", "numeric")],
            [(1.0, 2.0), (3.0, 1.0), (2.0, 2.0), (MISSING, 5.0)],
        )
        rule = parse_rule("end >= start", ds.column_names)
        eligible, satisfied = evaluate_rules(ds, [rule])
        assert eligible == [True, True, True, False]
        assert satisfied == [True, False, True, False]

    def test_missing_pooled_across_all_rules(self):
        # a row missing in a column referenced by ANY rule is ineligible for all
        ds = make_ds(
            [("a", "numeric"), ("b", "numeric")],
            [(1.0, 1.0), (1.0, MISSING), (MISSING, 1.0)],
        )
        rules = [parse_rule("a > 0", ds.column_names),
                 parse_rule("b > 0", ds.column_names)]
        eligible, satisfied = evaluate_rules(ds, rules)
        assert eligible == [True, False, False]
        assert satisfied == [True, False, False]

    def test_ordering_on_non_numbers_is_false_not_an_error(self):
        ds = make_ds([("note", "text")], [("abc",), ("zzz",)])
        rule = parse_rule("note > 'b'", ds.column_names)
        eligible, satisfied = evaluate_rules(ds, [rule])
        assert eligible == [True, True]
        assert satisfied == [False, False]

    def test_equality_is_type_aware(self):
        ds = make_ds(
            [("n", "numeric"), ("b", "boolean"), ("s", "text")],
            [(1.0, True, "1.0")],
        )
        names = ds.column_names
        # number 1.0 equals literal 1 but not boolean true or string "1.0"
        assert evaluate_rules(ds, [parse_rule("n == 1", names)])[1] == [True]
        assert evaluate_rules(ds, [parse_rule("n == true", names)])[1] == [False]
        assert evaluate_rules(ds, [parse_rule("b == true", names)])[1] == [True]
        assert evaluate_rules(ds, [parse_rule("b == 1", names)])[1] == [False]
        assert evaluate_rules(ds, [parse_rule("s == '1.0'", names)])[1] == [True]

    def test_in_set_matches_by_type_with_string_fallback(self):
        ds = make_ds(
            [("code", "text"), ("n", "numeric")],
            [("2.0", 2.0), ("x", 3.0)],
        )
        names = ds.column_names
        # string cell "2.0" matches the numeric member 2.0 by rendered form
        _, sat = evaluate_rules(ds, [parse_rule("code in {2.0, x}", names)])
        assert sat == [True, True]
        # numeric cell matches numeric member only
        _, sat = evaluate_rules(ds, [parse_rule("n in {2, 4}", names)])
        assert sat == [True, False]

    def test_between_is_inclusive_and_numeric_only(self):
        ds = make_ds(
            [("age", "numeric"), ("note", "text")],
            [(0.0, "a"), (120.0, "b"), (121.0, "c")],
        )
        names = ds.column_names
        _, sat = evaluate_rules(ds, [parse_rule("age between 0 and 120", names)])
        assert sat == [True, True, False]
        _, sat = evaluate_rules(ds, [parse_rule("note between 0 and 9", names)])
        assert sat == [False, False, False]

    def test_multi_clause_requires_every_clause(self):
        ds = make_ds(
            [("start", "numeric"), ("end", "numeric"), ("age", "numeric")],
            [(1.0, 2.0, 30.0), (1.0, 2.0, -4.0), (5.0, 2.0, 30.0)],
        )
        rule = parse_rule("end >= start and age > 0", ds.column_names)
        eligible, satisfied = evaluate_rules(ds, [rule])
        assert eligible == [True, True, True]
        assert satisfied == [True, False, False]

    def test_timestamp_cells_compare_as_numbers(self):
        ds = make_ds(
            [("t0", "timestamp"), ("t1", "timestamp")],
            [(100, 200), (300, 250)],
        )
        rule = parse_rule("t1 >= t0", ds.column_names)
        _, sat = evaluate_rules(ds, [rule])
        assert sat == [True, False]

    def test_no_rules_means_every_row_eligible_and_satisfied(self):
        ds = make_ds([("a", "numeric")], [(1.0,), (MISSING,)])
        eligible, satisfied = evaluate_rules(ds, [])
        assert eligible == [True, True]
        assert satisfied == [True, True]

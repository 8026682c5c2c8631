"""Format rules, domain rules, and the cross-column consistency grammar.

Consistency rules are small textual predicates over rows::

    "end >= start"
    "age between 0 and 120"
    "sex in {M, F}"
    "end >= start and age > 0"

Clauses combine with ``and``.  Bare words that match a column name are
column references; quoted tokens are string literals; numeric tokens are
numbers.  Rows with a missing value in any referenced column are
excluded from a rule's denominator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime

from .errors import InvalidRule, UnknownColumn
from .tabular import MISSING, Dataset, render_cell

# -- format rules ---------------------------------------------------------

_ISO_DATE_RE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")
_ISO_DATETIME_RE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})[T ](\d{2}):(\d{2})(:(\d{2}))?Z?$")


def _is_iso_date(s: str) -> bool:
    m = _ISO_DATE_RE.match(s)
    if not m:
        return False
    try:
        datetime(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    except ValueError:
        return False
    return True


def _is_iso_datetime(s: str) -> bool:
    m = _ISO_DATETIME_RE.match(s)
    if not m:
        return False
    try:
        datetime(int(m.group(1)), int(m.group(2)), int(m.group(3)),
                 int(m.group(4)), int(m.group(5)), int(m.group(7) or 0))
    except ValueError:
        return False
    return True


def check_format(format_id: str, rendered: str) -> bool:
    """Does a rendered cell satisfy a named format rule?"""
    if format_id == "iso_date":
        return _is_iso_date(rendered)
    if format_id == "iso_datetime":
        return _is_iso_datetime(rendered)
    if format_id.startswith("regex:"):
        return re.fullmatch(format_id[len("regex:"):], rendered) is not None
    raise InvalidRule(f"unknown format rule id {format_id!r}")


def check_domain(rule: dict, value, dtype: str) -> bool:
    """Does a non-missing cell satisfy a domain rule?"""
    kind = rule.get("kind")
    if kind == "range":
        v = float(value)
        lo = rule.get("min")
        hi = rule.get("max")
        if lo is not None and v < lo:
            return False
        if hi is not None and v > hi:
            return False
        return True
    if kind == "set":
        allowed = rule["values"]
        return value in allowed or render_cell(value, dtype) in {str(a) for a in allowed}
    raise InvalidRule(f"unknown domain rule kind {kind!r}")


def cell_is_valid(value, schema) -> bool:
    """Check a non-missing cell against the column's declared rules."""
    if schema.declared_format is not None:
        if not check_format(schema.declared_format, render_cell(value, schema.dtype)):
            return False
    if schema.domain_rule is not None:
        if not check_domain(schema.domain_rule, value, schema.dtype):
            return False
    return True


# -- consistency rule grammar ---------------------------------------------

_TOKEN_RE = re.compile(r"""
    \s*(
        <=|>=|==|!=|<|>
      | \{|\}|,
      | "(?:[^"\\]|\\.)*"
      | '(?:[^'\\]|\\.)*'
      | [^\s{},<>=!]+
    )""", re.VERBOSE)

_OPS = {"<=", ">=", "==", "!=", "<", ">"}


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise InvalidRule(f"cannot tokenize rule near {text[pos:pos+10]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


@dataclass(frozen=True)
class Operand:
    kind: str  # "column" | "number" | "string" | "bool"
    value: object


@dataclass(frozen=True)
class Clause:
    kind: str            # "cmp" | "in" | "between"
    column: str
    op: str | None = None
    rhs: Operand | None = None
    values: tuple = ()
    lo: float = 0.0
    hi: float = 0.0


@dataclass(frozen=True)
class Rule:
    text: str
    clauses: tuple[Clause, ...]

    @property
    def columns(self) -> list[str]:
        cols = []
        for cl in self.clauses:
            if cl.column not in cols:
                cols.append(cl.column)
            if cl.kind == "cmp" and cl.rhs.kind == "column" and cl.rhs.value not in cols:
                cols.append(cl.rhs.value)
        return cols


def _literal(token: str, column_names) -> Operand:
    if token[0] in "\"'" and token[-1] == token[0] and len(token) >= 2:
        body = token[1:-1]
        body = body.replace("\\" + token[0], token[0]).replace("\\\\", "\\")
        return Operand("string", body)
    low = token.lower()
    if low in ("true", "false"):
        return Operand("bool", low == "true")
    try:
        return Operand("number", float(token))
    except ValueError:
        pass
    if token in column_names:
        return Operand("column", token)
    return Operand("string", token)


def _expect_number(token: str, rule_text: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise InvalidRule(f"expected a number, got {token!r} in rule {rule_text!r}")


def parse_rule(text: str, column_names) -> Rule:
    """Parse one consistency rule; raises InvalidRule on malformed input."""
    tokens = _tokenize(text)
    if not tokens:
        raise InvalidRule(f"empty rule {text!r}")
    clauses: list[Clause] = []
    i = 0
    names = set(column_names)
    while i < len(tokens):
        col = tokens[i]
        if col not in names:
            raise UnknownColumn(f"rule {text!r} references unknown column {col!r}")
        i += 1
        if i >= len(tokens):
            raise InvalidRule(f"dangling column reference in rule {text!r}")
        word = tokens[i]
        if word in _OPS:
            if i + 1 >= len(tokens):
                raise InvalidRule(f"missing right-hand side in rule {text!r}")
            rhs = _literal(tokens[i + 1], names)
            clauses.append(Clause("cmp", col, op=word, rhs=rhs))
            i += 2
        elif word.lower() == "in":
            if i + 1 >= len(tokens) or tokens[i + 1] != "{":
                raise InvalidRule(f"'in' needs a {{...}} value set in rule {text!r}")
            i += 2
            values = []
            while i < len(tokens) and tokens[i] != "}":
                if tokens[i] != ",":
                    values.append(_literal(tokens[i], set()))
                i += 1
            if i >= len(tokens):
                raise InvalidRule(f"unterminated value set in rule {text!r}")
            i += 1
            clauses.append(Clause("in", col, values=tuple(values)))
        elif word.lower() == "between":
            if i + 3 >= len(tokens) or tokens[i + 2].lower() != "and":
                raise InvalidRule(f"'between' needs 'between LO and HI' in rule {text!r}")
            lo = _expect_number(tokens[i + 1], text)
            hi = _expect_number(tokens[i + 3], text)
            clauses.append(Clause("between", col, lo=lo, hi=hi))
            i += 4
        else:
            raise InvalidRule(f"expected an operator after {col!r} in rule {text!r}")
        if i < len(tokens):
            if tokens[i].lower() != "and":
                raise InvalidRule(f"clauses must be joined with 'and' in rule {text!r}")
            i += 1
            if i >= len(tokens):
                raise InvalidRule(f"trailing 'and' in rule {text!r}")
    return Rule(text, tuple(clauses))


def _as_comparable(value):
    if isinstance(value, bool):
        return ("bool", value)
    if isinstance(value, (int, float)):
        return ("number", float(value))
    return ("string", value)


def _operand_value(op: Operand, row, col_index):
    if op.kind == "column":
        return row[col_index[op.value]]
    return op.value


def _clause_holds(cl: Clause, row, col_index) -> bool:
    left = row[col_index[cl.column]]
    if cl.kind == "in":
        lk, lv = _as_comparable(left)
        for cand in cl.values:
            ck, cv = _as_comparable(cand.value)
            if lk == ck and lv == cv:
                return True
            if lk == "string" and str(cv) == lv:
                return True
        return False
    if cl.kind == "between":
        if isinstance(left, bool) or not isinstance(left, (int, float)):
            return False
        return cl.lo <= float(left) <= cl.hi
    right = _operand_value(cl.rhs, row, col_index)
    lk, lv = _as_comparable(left)
    rk, rv = _as_comparable(right)
    if cl.op == "==":
        return lk == rk and lv == rv
    if cl.op == "!=":
        return not (lk == rk and lv == rv)
    if lk != "number" or rk != "number":
        return False
    if cl.op == "<":
        return lv < rv
    if cl.op == "<=":
        return lv <= rv
    if cl.op == ">":
        return lv > rv
    return lv >= rv


def evaluate_rules(ds: Dataset, rules: list[Rule]) -> tuple[list[bool], list[bool]]:
    """Row-wise evaluation of parsed rules over a dataset.

    Returns (eligible, satisfied): a row is eligible when none of the
    referenced columns is missing; satisfied means all clauses hold.
    """
    col_index = {c.name: i for i, c in enumerate(ds.columns)}
    referenced = []
    for rule in rules:
        for c in rule.columns:
            if c not in referenced:
                referenced.append(c)
    ref_idx = [col_index[c] for c in referenced]
    eligible = []
    satisfied = []
    for row in ds.rows:
        if any(row[i] is MISSING for i in ref_idx):
            eligible.append(False)
            satisfied.append(False)
            continue
        eligible.append(True)
        ok = True
        for rule in rules:
            if not all(_clause_holds(cl, row, col_index) for cl in rule.clauses):
                ok = False
                break
        satisfied.append(ok)
    return eligible, satisfied

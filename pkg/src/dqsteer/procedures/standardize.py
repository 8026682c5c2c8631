"""Format standardization rules for string columns.

Cells that fail a rule's parse are left unchanged and reported as
unconverted, never silently set missing.  A conversion may retype the
column (text to numeric) only when 100% of non-missing cells convert.
"""

from __future__ import annotations

from ..errors import InvalidInput, InvalidSpec
from ..tabular import (MISSING, ColumnSchema, Dataset, compile_date_pattern,
                       render_cell, _parse_number)


def _require_stringy(ds: Dataset, col: str):
    dtype = ds.schema(col).dtype
    if dtype not in ("categorical", "text"):
        raise InvalidInput(f"standardize rule applies to string columns; "
                           f"{col!r} is {dtype}")


def _rewrite(ds: Dataset, col: str, transform):
    """Apply transform(cell)->new_value|None to non-missing cells of col.

    Returns (new cells list, converted rows, unconverted rows).  A None
    result means the rule's parse failed and the cell is left as-is.
    """
    idx = ds.column_index(col)
    cells = []
    converted, unconverted = [], []
    for i, row in enumerate(ds.rows):
        v = row[idx]
        if v is MISSING:
            cells.append(MISSING)
            continue
        new = transform(v)
        if new is None:
            cells.append(v)
            unconverted.append(i)
        else:
            cells.append(new)
            converted.append(i)
    return cells, converted, unconverted


def _replace_column(ds: Dataset, col: str, cells, schema: ColumnSchema | None = None):
    idx = ds.column_index(col)
    columns = list(ds.columns)
    if schema is not None:
        columns[idx] = schema
    rows = tuple(
        tuple(cells[i] if j == idx else v for j, v in enumerate(row))
        for i, row in enumerate(ds.rows))
    return ds.derive(columns=tuple(columns), rows=rows)


def standardize_column(ds: Dataset, col: str, rule: str, params: dict):
    """Apply one standardization rule to one column."""
    emptied = 0

    if rule == "trim_whitespace":
        _require_stringy(ds, col)
        cells, converted, unconverted = _rewrite(ds, col, lambda s: s.strip())
        emptied = sum(1 for c in cells if c == "")
        new_ds = _replace_column(ds, col, cells)
    elif rule == "case_fold":
        _require_stringy(ds, col)
        mode = params.get("mode", "lower")
        if mode not in ("lower", "upper"):
            raise InvalidSpec("case_fold mode must be 'lower' or 'upper'")
        fold = str.lower if mode == "lower" else str.upper
        cells, converted, unconverted = _rewrite(ds, col, fold)
        new_ds = _replace_column(ds, col, cells)
    elif rule == "date_to_iso":
        _require_stringy(ds, col)
        pattern = params.get("pattern")
        if not pattern:
            raise InvalidSpec("date_to_iso needs a 'pattern' parameter")
        regex, fields = compile_date_pattern(pattern)

        def to_iso(s: str):
            m = regex.match(s.strip())
            if not m:
                return None
            parts = dict(zip(fields, (int(g) for g in m.groups())))
            from datetime import datetime
            try:
                datetime(parts["YYYY"], parts["MM"], parts["DD"])
            except ValueError:
                return None
            return f"{parts['YYYY']:04d}-{parts['MM']:02d}-{parts['DD']:02d}"

        cells, converted, unconverted = _rewrite(ds, col, to_iso)
        schema = None
        if not unconverted and converted:
            old = ds.schema(col)
            schema = ColumnSchema(old.name, old.dtype, "iso_date", old.domain_rule)
        new_ds = _replace_column(ds, col, cells, schema)
    elif rule == "numeric_unseparate":
        _require_stringy(ds, col)
        group_char = params.get("group_char", ",")
        decimal_char = params.get("decimal_char", ".")
        if group_char == decimal_char:
            raise InvalidSpec("group_char and decimal_char must differ")

        def unseparate(s: str):
            v = _parse_number(s, group_char, decimal_char)
            return None if v is None else repr(v)

        cells, converted, unconverted = _rewrite(ds, col, unseparate)
        schema = None
        if not unconverted and converted:
            # 100% converted: retype text -> numeric
            old = ds.schema(col)
            schema = ColumnSchema(old.name, "numeric", old.declared_format,
                                  old.domain_rule)
            cells = [MISSING if c is MISSING else float(c) for c in cells]
        new_ds = _replace_column(ds, col, cells, schema)
    elif rule == "map_values":
        _require_stringy(ds, col)
        mapping = params.get("mapping")
        if not isinstance(mapping, dict) or not mapping:
            raise InvalidSpec("map_values needs a non-empty 'mapping' parameter")
        cells, converted, unconverted = _rewrite(
            ds, col, lambda s: mapping[s] if s in mapping else None)
        emptied = sum(1 for c in cells if c == "")
        # unmapped values are simply out of scope for the dictionary
        new_ds = _replace_column(ds, col, cells)
        unconverted = []
    else:
        raise InvalidSpec(f"unknown standardization rule {rule!r}")

    diagnostics = {"column": col, "rule": rule,
                   "converted": len(converted), "unconverted_rows": unconverted,
                   "retyped": new_ds.schema(col).dtype != ds.schema(col).dtype}
    if emptied:
        diagnostics["emptied_to_missing"] = emptied
    return new_ds, None, diagnostics

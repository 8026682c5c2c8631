"""Batch command line for the same engine the HTTP service exposes.

Exit codes: 0 success, 1 validation problem (bad input, bad flags),
2 internal failure.  ``--json`` switches stdout to machine-readable JSON.
"""

from __future__ import annotations

import json
import sys

import click

from . import __version__
from .dimensions import QualityConfig, quality_report
from .drift import drift_report
from .errors import DqError, InvalidInput
from .modeling import EvalConfig, cross_validate
from .procedures import ProcedureSpec, run_procedure
from .service import BIND_DEFAULT, BIND_ENV, DATA_DIR_ENV
from .service import serve as _serve
from .tabular import ingest_csv


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path!r}: {exc}") from exc


def _json_arg(value: str):
    """Inline JSON or a path to a JSON file."""
    text = value.strip()
    if not text.startswith(("{", "[")):
        text = _read_text(value)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"not valid JSON: {exc}") from exc


def _ingest(path: str, label: str | None, hints_json: str | None):
    hints = _json_arg(hints_json) if hints_json else None
    ds, warnings = ingest_csv(_read_text(path), type_hints=hints,
                              label_column=label)
    for w in warnings:
        click.echo(f"warning: row {w.row} column {w.column}: {w.message}",
                   err=True)
    return ds


@click.group()
@click.version_option(__version__, prog_name="dqsteer")
def cli():
    """Data-quality scoring, improvement procedures and drift checks."""


@cli.command()
@click.argument("csv_path", type=click.Path())
@click.option("--label", default=None, help="Label column name.")
@click.option("--hints", default=None, help="Type hints, JSON inline or a file.")
@click.option("--rule", "rules", multiple=True,
              help="Consistency rule (repeatable), e.g. 'end >= start'.")
@click.option("--outlier-method", default=None,
              type=click.Choice(["zscore", "iqr", "lof"]),
              help="Score outlier freedom with this detector.")
@click.option("--json", "as_json", is_flag=True, help="JSON output.")
def report(csv_path, label, hints, rules, outlier_method, as_json):
    """Quality report for a CSV file."""
    ds = _ingest(csv_path, label, hints)
    config = QualityConfig(consistency_rules=tuple(rules),
                           outlier_method=outlier_method)
    rep = quality_report(ds, config)
    if as_json:
        click.echo(json.dumps(rep.to_json(), indent=1))
        return
    click.echo(f"snapshot {rep.snapshot_id[:12]}  "
               f"{ds.n_rows} rows x {ds.n_cols} cols")
    for name, value in rep.dataset.to_json().items():
        shown = "undefined" if value is None else f"{value:.4f}"
        click.echo(f"  {name:16s} {shown}")


@cli.command()
@click.argument("csv_path", type=click.Path())
@click.option("--spec", required=True,
              help="ProcedureSpec, JSON inline or a file.")
@click.option("--out", required=True, type=click.Path(),
              help="Where to write the transformed CSV.")
@click.option("--label", default=None, help="Label column name.")
@click.option("--hints", default=None, help="Type hints, JSON inline or a file.")
@click.option("--json", "as_json", is_flag=True, help="JSON output.")
def apply(csv_path, spec, out, label, hints, as_json):
    """Run one procedure on a CSV and write the result."""
    ds = _ingest(csv_path, label, hints)
    result = run_procedure(ds, ProcedureSpec.from_json(_json_arg(spec)))
    with open(out, "w", encoding="utf-8") as f:
        f.write(result.output.to_canonical_csv())
    if as_json:
        click.echo(json.dumps(result.to_json(), indent=1))
    else:
        click.echo(f"{result.spec.family}/{result.spec.method}: "
                   f"{result.cells_changed} cells changed, "
                   f"{result.rows_removed} rows removed, "
                   f"{result.cols_removed} cols removed -> {out}")


@cli.command()
@click.argument("csv_path", type=click.Path())
@click.option("--script", required=True,
              help="Spec list or exported script, JSON inline or a file.")
@click.option("--out", required=True, type=click.Path(),
              help="Where to write the final CSV.")
@click.option("--label", default=None, help="Label column name.")
@click.option("--hints", default=None, help="Type hints, JSON inline or a file.")
@click.option("--json", "as_json", is_flag=True, help="JSON output.")
def pipeline(csv_path, script, out, label, hints, as_json):
    """Replay a list of procedures in order and write the final CSV."""
    doc = _json_arg(script)
    if isinstance(doc, dict):
        specs_json = doc.get("specs")
        if specs_json is None:
            raise InvalidInput("script object has no 'specs' list")
        label = label or doc.get("label_column")
        if hints is None and doc.get("type_hints"):
            hints = json.dumps(doc["type_hints"])
    else:
        specs_json = doc
    if not isinstance(specs_json, list):
        raise InvalidInput("script must be a list of procedure specs")
    ds = _ingest(csv_path, label, hints)
    steps = []
    for i, spec_json in enumerate(specs_json):
        result = run_procedure(ds, ProcedureSpec.from_json(spec_json))
        steps.append({"step": i, "spec": result.spec.to_json(),
                      "input": result.input_snapshot,
                      "output": result.output.snapshot_id,
                      "cells_changed": result.cells_changed,
                      "rows_removed": result.rows_removed,
                      "cols_removed": result.cols_removed})
        ds = result.output
    with open(out, "w", encoding="utf-8") as f:
        f.write(ds.to_canonical_csv())
    summary = {"steps": steps, "final_snapshot": ds.snapshot_id, "out": out}
    if as_json:
        click.echo(json.dumps(summary, indent=1))
    else:
        click.echo(f"{len(steps)} steps -> {out}  "
                   f"(snapshot {ds.snapshot_id[:12]})")


@cli.command()
@click.argument("csv_path", type=click.Path())
@click.option("--label", required=True, help="Label column name.")
@click.option("--config", "config_json", default=None,
              help="Eval config, JSON inline or a file.")
@click.option("--hints", default=None, help="Type hints, JSON inline or a file.")
@click.option("--json", "as_json", is_flag=True, help="JSON output.")
def evaluate(csv_path, label, config_json, hints, as_json):
    """Cross-validated model evaluation of a labeled CSV."""
    ds = _ingest(csv_path, label, hints)
    config = EvalConfig.from_json(_json_arg(config_json)) if config_json \
        else EvalConfig()
    rep = cross_validate(ds, config)
    if as_json:
        click.echo(json.dumps(rep.to_json(), indent=1))
        return
    click.echo(f"{rep.task} / {rep.config.model}, {rep.config.folds} folds, "
               f"{rep.rows_used} rows used ({rep.rows_dropped} dropped)")
    for metric in sorted(rep.mean):
        click.echo(f"  {metric:16s} {rep.mean[metric]:.4f} "
                   f"+/- {rep.std[metric]:.4f}")


@cli.command()
@click.argument("before_csv", type=click.Path())
@click.argument("after_csv", type=click.Path())
@click.option("--alpha", default=0.05, show_default=True,
              help="Significance level for the KS test.")
@click.option("--hints", default=None, help="Type hints, JSON inline or a file.")
@click.option("--json", "as_json", is_flag=True, help="JSON output.")
def drift(before_csv, after_csv, alpha, hints, as_json):
    """Column-drift report between two CSV files."""
    before = _ingest(before_csv, None, hints)
    after = _ingest(after_csv, None, hints)
    entries = drift_report(before, after, alpha=alpha)
    if as_json:
        click.echo(json.dumps({"alpha": alpha,
                               "entries": [e.to_json() for e in entries]},
                              indent=1))
        return
    for e in entries:
        j = e.to_json()
        if j["kind"] == "ks":
            mark = "DRIFTED" if j["drifted"] else "ok"
            click.echo(f"  {j['column']:20s} ks d={j['d_stat']:.4f} "
                       f"p={j['p_value']:.4g} {mark}")
        elif j["kind"] == "categorical":
            mark = "SHIFTED" if j["drifted"] else "ok"
            click.echo(f"  {j['column']:20s} tvd={j['tvd']:.4f} {mark}")
        else:
            click.echo(f"  {j['column']:20s} structural: {j['reason']}")


@cli.command()
@click.option("--bind", default=None,
              help=f"host:port (default ${BIND_ENV} or {BIND_DEFAULT}).")
@click.option("--data-dir", default=None,
              help=f"Session persistence directory (default ${DATA_DIR_ENV}).")
def serve(bind, data_dir):
    """Run the HTTP service."""
    _serve(bind=bind, data_dir=data_dir)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as err:
        click.echo(err.format_message(), err=True)
        if err.ctx is not None:
            click.echo(err.ctx.get_usage(), err=True)
        return 1
    except click.ClickException as err:
        err.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except DqError as err:
        click.echo(f"error ({err.code}): {err.message}", err=True)
        return 1 if err.http_status < 500 else 2
    except Exception as err:   # pragma: no cover - safety net
        click.echo(f"internal error: {type(err).__name__}: {err}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())

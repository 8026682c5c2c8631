"""Batch CLI: exit codes, JSON parity with the service, pipeline replay."""

import json

import pytest

from dqsteer.cli import main
from dqsteer.procedures import ProcedureSpec, run_procedure
from dqsteer.session import Session
from dqsteer.tabular import ingest_csv

from conftest import two_cluster_csv

CSV = "x1,x2,c,y\n1.0,3.0,a,pos\n2.0,,a ,neg\n,5.0,b,pos\n4.0,6.0,b,neg\n" \
      "5.0,7.0,a,pos\n6.0,8.0,b,neg\n1.0,3.0,a,pos\n"


@pytest.fixture()
def csv_path(tmp_path):
    p = tmp_path / "data.csv"
    p.write_text(CSV)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_version_is_success(self, capsys):
        code, out, _ = run(capsys, "--version")
        assert code == 0
        assert "dqsteer" in out

    def test_missing_argument_is_usage_error(self, capsys):
        code, _, err = run(capsys, "report")
        assert code == 1
        assert "Usage:" in err

    def test_unknown_command_is_usage_error(self, capsys):
        code, _, err = run(capsys, "frobnicate")
        assert code == 1

    def test_unreadable_file_is_a_validation_failure(self, capsys, tmp_path):
        code, _, err = run(capsys, "report", str(tmp_path / "absent.csv"))
        assert code == 1
        assert "cannot read" in err

    def test_domain_errors_exit_1_with_the_code(self, capsys, csv_path):
        code, _, err = run(capsys, "report", csv_path, "--label", "ghost")
        assert code == 1
        assert "error (unknown_column)" in err

    def test_malformed_inline_json_exits_1(self, capsys, csv_path, tmp_path):
        code, _, err = run(capsys, "apply", csv_path,
                           "--spec", "{not json", "--out",
                           str(tmp_path / "o.csv"))
        assert code == 1
        assert "not valid JSON" in err

    def test_bad_bind_address_exits_1(self, capsys):
        code, _, err = run(capsys, "serve", "--bind", "nonsense")
        assert code == 1
        assert "host:port" in err


class TestReport:
    def test_text_report_lists_each_dimension(self, capsys, csv_path):
        code, out, _ = run(capsys, "report", csv_path, "--label", "y")
        assert code == 0
        for name in ("completeness", "uniqueness", "validity",
                     "consistency", "outlier_freedom", "overall"):
            assert name in out
        assert "7 rows x 4 cols" in out
        assert "undefined" in out   # no rules configured

    def test_json_report_matches_the_engine(self, capsys, csv_path):
        code, out, _ = run(capsys, "report", csv_path, "--label", "y",
                           "--json")
        assert code == 0
        doc = json.loads(out)
        ds, _ = ingest_csv(CSV, label_column="y")
        engine = json.loads(json.dumps(Session(ds).quality().to_json()))
        assert doc == engine

    def test_rules_and_outliers_feed_the_report(self, capsys, csv_path):
        code, out, _ = run(capsys, "report", csv_path,
                           "--rule", "x2 >= 4", "--outlier-method", "zscore",
                           "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["dataset"]["consistency"] is not None
        assert doc["dataset"]["outlier_freedom"] is not None

    def test_malformed_rule_is_a_validation_failure(self, capsys, csv_path):
        code, _, err = run(capsys, "report", csv_path, "--rule", "x2 >=")
        assert code == 1
        assert "error (invalid_rule)" in err


class TestApply:
    def test_writes_the_canonical_transform(self, capsys, csv_path, tmp_path):
        out_path = tmp_path / "out.csv"
        spec = '{"family": "dedup", "method": "exact"}'
        code, out, _ = run(capsys, "apply", csv_path, "--spec", spec,
                           "--out", str(out_path), "--json")
        assert code == 0
        doc = json.loads(out)
        ds, _ = ingest_csv(CSV)
        expect = run_procedure(ds, ProcedureSpec("dedup", "exact"))
        assert doc["output_snapshot"] == expect.output.snapshot_id
        assert out_path.read_text() == expect.output.to_canonical_csv()

    def test_spec_can_live_in_a_file(self, capsys, csv_path, tmp_path):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(
            {"family": "impute", "method": "mean", "target": ["x1"]}))
        out_path = tmp_path / "out.csv"
        code, out, _ = run(capsys, "apply", csv_path,
                           "--spec", str(spec_path), "--out", str(out_path))
        assert code == 0
        assert "impute/mean: 1 cells changed" in out


class TestPipeline:
    def test_replays_an_exported_script_to_the_same_snapshot(
            self, capsys, csv_path, tmp_path):
        ds, _ = ingest_csv(CSV, label_column="y")
        s = Session(ds)
        s.apply(ProcedureSpec("standardize", "trim_whitespace", target=["c"]))
        s.apply(ProcedureSpec("impute", "mean", target=["x1"]))
        s.apply(ProcedureSpec("dedup", "exact"))
        script_path = tmp_path / "script.json"
        script_path.write_text(json.dumps(s.export_script()))

        out_path = tmp_path / "final.csv"
        code, out, _ = run(capsys, "pipeline", csv_path,
                           "--script", str(script_path),
                           "--out", str(out_path), "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["final_snapshot"] == s.current_id
        assert len(doc["steps"]) == 3
        assert out_path.read_text() == s.export_csv()

    def test_accepts_a_bare_spec_list(self, capsys, csv_path, tmp_path):
        specs = [{"family": "dedup", "method": "exact"}]
        out_path = tmp_path / "o.csv"
        code, out, _ = run(capsys, "pipeline", csv_path,
                           "--script", json.dumps(specs),
                           "--out", str(out_path))
        assert code == 0
        assert "1 steps ->" in out

    def test_script_object_without_specs_is_rejected(self, capsys, csv_path,
                                                     tmp_path):
        code, _, err = run(capsys, "pipeline", csv_path,
                           "--script", '{"version": 1}',
                           "--out", str(tmp_path / "o.csv"))
        assert code == 1
        assert "specs" in err


class TestEvaluate:
    def test_reports_cross_validated_metrics(self, capsys, tmp_path):
        p = tmp_path / "clusters.csv"
        p.write_text(two_cluster_csv())
        code, out, _ = run(capsys, "evaluate", str(p), "--label", "y",
                           "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["task"] == "classification"
        assert doc["mean"]["f1_macro"] == pytest.approx(1.0)

    def test_custom_config(self, capsys, tmp_path):
        p = tmp_path / "clusters.csv"
        p.write_text(two_cluster_csv())
        code, out, _ = run(capsys, "evaluate", str(p), "--label", "y",
                           "--config", '{"model": "knn", "folds": 3}')
        assert code == 0
        assert "classification / knn, 3 folds" in out

    def test_label_is_mandatory(self, capsys, tmp_path):
        p = tmp_path / "clusters.csv"
        p.write_text(two_cluster_csv())
        code, _, err = run(capsys, "evaluate", str(p))
        assert code == 1
        assert "Usage:" in err


class TestDrift:
    def test_identical_files_do_not_drift(self, capsys, csv_path):
        code, out, _ = run(capsys, "drift", csv_path, csv_path)
        assert code == 0
        assert "DRIFTED" not in out and "SHIFTED" not in out
        assert "d=0.0000" in out

    def test_json_entries_match_the_engine(self, capsys, csv_path, tmp_path):
        other = tmp_path / "after.csv"
        other.write_text(CSV.replace("c,y", "c2,y"))
        code, out, _ = run(capsys, "drift", csv_path, str(other), "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["alpha"] == 0.05
        reasons = {e["column"]: e["reason"] for e in doc["entries"]
                   if e["kind"] == "structural"}
        assert reasons == {"c": "column absent after",
                           "c2": "column absent before"}

    def test_disjoint_schemas_fail(self, capsys, csv_path, tmp_path):
        other = tmp_path / "other.csv"
        other.write_text("p,q\n1,2\n")
        code, _, err = run(capsys, "drift", csv_path, str(other))
        assert code == 1
        assert "error (validation_error)" in err

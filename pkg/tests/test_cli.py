import json
import math

import pytest

from sud_estimate.cache import level_filename
from sud_estimate.cli import (
    EXIT_INFEASIBLE,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_VERIFY_FAILED,
    main,
)
from sud_estimate.weights import load_weights


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


class TestRisk:
    def test_golden_product_risk(self, capsys):
        code, payload, _ = run_json(
            capsys, "risk", "-d", "2", "-N", "5", "--no-timestamp"
        )
        assert code == EXIT_OK
        assert payload["risk"] == "7/26"
        assert payload["numerator"] == "38/1"
        assert payload["norm_sq"] == "13/1"
        assert payload["support_size"] == 2
        assert payload["config"]["scheme"] == "product"
        assert "generated_at" not in payload

    def test_terms_flag_lists_numerator_terms(self, capsys):
        code, payload, _ = run_json(
            capsys, "risk", "-d", "2", "-N", "5", "--terms", "--no-timestamp"
        )
        assert code == EXIT_OK
        terms = {tuple(t["parts"]): t["value"] for t in payload["numerator_terms"]}
        assert terms == {
            (6, 0): "0/1",
            (5, 1): "9/1",
            (4, 2): "25/1",
            (3, 3): "4/1",
        }

    def test_uniform_scheme(self, capsys):
        code, payload, _ = run_json(
            capsys, "risk", "-d", "2", "-N", "5",
            "--scheme", "uniform", "--no-timestamp",
        )
        assert code == EXIT_OK
        assert payload["risk"] == "1/4"

    def test_csv_format(self, capsys):
        code, out, _ = run(
            capsys, "risk", "-d", "2", "-N", "5", "--format", "csv"
        )
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "d,N,scheme,risk_num,risk_den,risk_float"
        assert lines[1].startswith("2,5,product,7,26,")

    def test_infeasible_level_exits_2(self, capsys):
        code, out, err = run(capsys, "risk", "-d", "3", "-N", "4")
        assert code == EXIT_INFEASIBLE
        assert out == ""
        assert json.loads(err)["type"] == "EmptySupportError"

    def test_bad_scheme_exits_2(self, capsys):
        code, _, err = run(capsys, "risk", "-d", "2", "-N", "5", "--scheme", "bogus")
        assert code == EXIT_INFEASIBLE
        assert json.loads(err)["type"] == "ValueError"

    def test_timestamp_present_by_default(self, capsys):
        _, payload, _ = run_json(capsys, "risk", "-d", "2", "-N", "5")
        assert "generated_at" in payload


class TestSweep:
    def test_json_rows_and_fit(self, capsys):
        code, payload, _ = run_json(
            capsys, "sweep", "-d", "2", "-N", "3:6", "--exact", "--no-timestamp"
        )
        assert code == EXIT_OK
        rows = {r["N"]: r for r in payload["rows"]}
        assert rows[5]["risk"] == "7/26"
        assert payload["skipped"] == []
        assert "fit" in payload and payload["fit"]["constant"] > 0

    def test_csv_header_and_exact_columns(self, capsys):
        code, out, _ = run(
            capsys, "sweep", "-d", "2", "-N", "3:5", "--exact", "--format", "csv"
        )
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "N,risk_num,risk_den,risk_float,N2_risk"
        assert lines[3].startswith("5,7,26,")

    def test_float_path_leaves_exact_columns_empty(self, capsys):
        _, out, _ = run(
            capsys, "sweep", "-d", "2", "-N", "3:5", "--format", "csv"
        )
        assert out.splitlines()[1].split(",")[1] == ""

    def test_skipped_levels_reported(self, capsys):
        code, payload, _ = run_json(
            capsys, "sweep", "-d", "2", "-N", "2:4", "--no-fit", "--no-timestamp"
        )
        assert code == EXIT_OK
        assert [r["N"] for r in payload["rows"]] == [3, 4]
        assert [s["N"] for s in payload["skipped"]] == [2]

    def test_fully_infeasible_range_exits_2(self, capsys):
        code, _, err = run(capsys, "sweep", "-d", "3", "-N", "1:4")
        assert code == EXIT_INFEASIBLE
        assert json.loads(err)["type"] == "EmptySupportError"

    def test_repeat_runs_byte_identical(self, capsys):
        args = ("sweep", "-d", "2", "-N", "5:12", "--exact", "--no-timestamp")
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second

    def test_workers_do_not_change_output(self, capsys):
        # identical results; only the echoed workers setting may differ
        args = ("sweep", "-d", "2", "-N", "5:12", "--exact", "--no-timestamp")
        _, solo, _ = run_json(capsys, *args, "--workers", "1")
        _, duo, _ = run_json(capsys, *args, "--workers", "2")
        solo["config"].pop("workers")
        duo["config"].pop("workers")
        assert solo == duo


class TestConstant:
    def test_exact_value(self, capsys):
        code, payload, _ = run_json(
            capsys, "constant", "-d", "2", "--no-timestamp"
        )
        assert code == EXIT_OK
        assert payload["exact"] == "10/1"
        assert payload["float"] == 10.0
        assert payload["numerator_integral"] == "1/3"
        assert payload["denominator_integral"] == "1/30"

    def test_riemann_levels_attached(self, capsys):
        code, payload, _ = run_json(
            capsys, "constant", "-d", "2", "--riemann", "100:300:100",
            "--no-timestamp",
        )
        assert code == EXIT_OK
        assert [row["N"] for row in payload["riemann"]] == [100, 200, 300]
        for row in payload["riemann"]:
            assert row["value"] == pytest.approx(10.0, rel=0.05)

    def test_csv_format(self, capsys):
        code, out, _ = run(
            capsys, "constant", "-d", "3", "--riemann", "50", "--format", "csv"
        )
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "kind,N,value"
        assert lines[1].startswith("exact,,")
        assert lines[2].startswith("riemann,50,")


class TestOptimal:
    def test_report_fields(self, capsys):
        code, payload, _ = run_json(
            capsys, "optimal", "-d", "2", "-N", "5", "--no-timestamp"
        )
        assert code == EXIT_OK
        assert payload["eigmax"] == pytest.approx(2 + math.sqrt(2), abs=1e-10)
        assert payload["optimal_risk"] == pytest.approx(
            math.sin(math.pi / 8) ** 2, abs=1e-10
        )
        assert payload["product_risk"] == "7/26"
        assert payload["product_gap"] >= 0
        assert payload["iterations"] >= 1
        assert payload["residual"] <= 1e-12 * payload["eigmax"]

    def test_export_round_trip(self, capsys, tmp_path):
        path = tmp_path / "opt.json"
        code, payload, _ = run_json(
            capsys, "optimal", "-d", "2", "-N", "6",
            "--export", str(path), "--no-timestamp",
        )
        assert code == EXIT_OK
        w = load_weights(path)
        assert w.d == 2 and w.level == 6
        got = {tuple(rec["parts"]): rec["weight"] for rec in payload["coefficients"]}
        want = {p: f"{v.numerator}/{v.denominator}" for p, v in w.entries.items()}
        assert got == want

    def test_exported_scheme_feeds_back_into_risk(self, capsys, tmp_path):
        path = tmp_path / "opt.json"
        run(capsys, "optimal", "-d", "2", "-N", "6", "--export", str(path))
        code, payload, _ = run_json(
            capsys, "risk", "-d", "2", "-N", "6",
            "--scheme", f"file:{path}", "--no-timestamp",
        )
        assert code == EXIT_OK
        assert payload["risk_float"] == pytest.approx(
            math.sin(math.pi / 9) ** 2, abs=1e-9
        )

    def test_strict_support(self, capsys):
        code, payload, _ = run_json(
            capsys, "optimal", "-d", "2", "-N", "5",
            "--support", "strict", "--no-timestamp",
        )
        assert code == EXIT_OK
        assert payload["strict_optimal_risk"] >= payload["full_optimal_risk"] - 1e-9
        parts = {tuple(rec["parts"]) for rec in payload["coefficients"]}
        assert parts <= {(4, 1), (3, 2)}

    def test_iteration_cap_exits_3(self, capsys):
        code, _, err = run(
            capsys, "optimal", "-d", "2", "-N", "12", "--max-iterations", "2"
        )
        assert code == EXIT_NUMERICAL
        assert json.loads(err)["type"] == "ConvergenceError"

    def test_csv_lists_coefficients(self, capsys):
        code, out, _ = run(
            capsys, "optimal", "-d", "2", "-N", "5", "--format", "csv"
        )
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "parts,weight"
        assert len(lines) == 4  # all three level-5 partitions carry weight


class TestVerify:
    def test_all_checks_pass(self, capsys):
        code, payload, _ = run_json(
            capsys, "verify", "-d", "2", "--n-max", "5",
            "--points", "20", "--no-timestamp",
        )
        assert code == EXIT_OK
        assert payload["pass"] is True
        names = [c["name"] for c in payload["checks"]]
        assert names == [
            "haar-normalization",
            "character-orthogonality",
            "branching-pointwise",
            "risk-oracle",
            "expansion-identities",
        ]
        assert all(c["pass"] for c in payload["checks"])
        assert EXIT_VERIFY_FAILED == 1

    def test_csv_format(self, capsys):
        code, out, _ = run(
            capsys, "verify", "-d", "2", "--n-max", "4",
            "--points", "10", "--format", "csv",
        )
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "check,max_error,tolerance,pass"
        assert len(lines) == 6


class TestCache:
    def test_build_then_reuse(self, capsys, tmp_path):
        code, payload, _ = run_json(
            capsys, "cache", "-d", "2", "--n-max", "5",
            "--cache-dir", str(tmp_path), "--no-timestamp",
        )
        assert code == EXIT_OK
        assert payload["rebuilt_levels"] == [0, 1, 2, 3, 4, 5]
        assert payload["reused_levels"] == []
        code, payload, _ = run_json(
            capsys, "cache", "-d", "2", "--n-max", "5",
            "--cache-dir", str(tmp_path), "--no-timestamp",
        )
        assert code == EXIT_OK
        assert payload["reused_levels"] == [0, 1, 2, 3, 4, 5]
        assert payload["rebuilt_levels"] == []
        assert payload["warnings"] == []

    def test_environment_variable_picks_directory(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("SUD_ESTIMATE_CACHE", str(tmp_path))
        code, payload, _ = run_json(
            capsys, "cache", "-d", "3", "--n-max", "2", "--no-timestamp"
        )
        assert code == EXIT_OK
        assert payload["directory"] == str(tmp_path)
        assert (tmp_path / level_filename(3, 2)).exists()

    def test_csv_lists_manifest(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "cache", "-d", "2", "--n-max", "3",
            "--cache-dir", str(tmp_path), "--format", "csv",
        )
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "d,level,path,sha256"
        assert len(lines) == 5


class TestParser:
    def test_missing_subcommand_is_usage_error(self, capsys):
        with pytest.raises(SystemExit):
            main([])
        assert "usage" in capsys.readouterr().err

    def test_missing_required_flag_is_usage_error(self, capsys):
        with pytest.raises(SystemExit):
            main(["risk", "-d", "2"])

    def test_bad_range_is_usage_error(self, capsys):
        with pytest.raises(SystemExit):
            main(["sweep", "-d", "2", "-N", "3:x"])

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit):
            main(["--version"])
        assert "sud-estimate" in capsys.readouterr().out

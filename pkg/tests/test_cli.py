"""CLI: config parsing, check execution, report schema, exports, exit codes."""

import csv
import json
import pathlib

import pytest

from grushin_hardy import cli

GOLDEN = json.loads((pathlib.Path(__file__).parent / "golden" / "constants.json").read_text())

BASE_CONFIG = {
    "space": {"m": 1, "k": 1, "gamma": 1.0},
    "pair": {"id": "dambrosio_power", "alpha": 0.0, "beta": 0.0},
    "p": 2.0,
    "checks": ["identity"],
    "seed": 7,
}


def write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- constants ----------------------------------------------------------------


def test_constants_cp_p2(capsys):
    code, out, _ = run_cli(capsys, "constants", "--kind", "cp", "--p", "2")
    assert code == 0
    rec = json.loads(out)
    assert rec["value"] == pytest.approx(1.0, abs=1e-10)


def test_constants_c3_within_interval(capsys):
    code, out, _ = run_cli(capsys, "constants", "--kind", "c3", "--p", "1.5")
    assert code == 0
    rec = json.loads(out)
    assert 0.0 < rec["value"] <= 0.375


def test_constants_cp4_matches_golden(capsys):
    golden = next(
        e["value"] for e in GOLDEN["entries"] if e["kind"] == "cp_pge2" and e["p"] == 4.0
    )
    code, out, _ = run_cli(capsys, "constants", "--kind", "cp", "--p", "4")
    assert code == 0
    rec = json.loads(out)
    lo, hi = rec["bracket"]
    assert lo - 1e-12 <= golden <= hi + 1e-12


def test_constants_invalid_combination(capsys):
    code, _, err = run_cli(capsys, "constants", "--kind", "cp", "--p", "1.5")
    assert code == 2
    assert "error:" in err


def test_constants_tol_gate(capsys):
    # the p=2 bracket is ~1e-11 wide; an impossible tol forces exit 1
    code, _, err = run_cli(capsys, "constants", "--kind", "cp", "--p", "2", "--tol", "1e-30")
    assert code == 1
    assert "exceeds" in err


# -- verify -------------------------------------------------------------------


def test_verify_identity_config(tmp_path, capsys):
    path = write_config(tmp_path, BASE_CONFIG)
    code, out, _ = run_cli(capsys, "verify", "--config", path)
    assert code == 0
    report = json.loads(out)
    assert report["summary"] == {"passed": 1, "failed": 0}
    assert report["checks"][0]["name"] == "identity"
    assert report["checks"][0]["passed"] is True
    # defaults were resolved against the pair's singular set
    assert report["config"]["field"]["family"] == "bump_radial_x_cutoff"
    assert report["config"]["field"]["x_floor"] == 0.125
    assert report["versions"]["package"]


def test_verify_validation_exits_2(tmp_path, capsys):
    bad = dict(BASE_CONFIG, pair={"id": "dambrosio_power", "alpha": 4.0, "beta": 0.0})
    path = write_config(tmp_path, bad)
    code, _, err = run_cli(capsys, "verify", "--config", path)
    assert code == 2
    assert "requires Q > alpha - beta" in err


def test_verify_empty_checks(tmp_path, capsys):
    path = write_config(tmp_path, dict(BASE_CONFIG, checks=[]))
    code, out, _ = run_cli(capsys, "verify", "--config", path)
    assert code == 0
    report = json.loads(out)
    assert report["checks"] == []
    assert report["summary"] == {"passed": 0, "failed": 0}


def test_verify_unknown_check(tmp_path, capsys):
    path = write_config(tmp_path, dict(BASE_CONFIG, checks=["identty"]))
    code, _, err = run_cli(capsys, "verify", "--config", path)
    assert code == 2
    assert "unknown check" in err


def test_verify_non_numeric_config_value(tmp_path, capsys):
    cfg = dict(BASE_CONFIG, pair={"id": "dambrosio_power", "alpha": {"nested": 1}, "beta": 0.0})
    path = write_config(tmp_path, cfg)
    code, _, err = run_cli(capsys, "verify", "--config", path)
    assert code == 2
    assert "pair.alpha must be a number" in err


def test_verify_precondition_blocks_whole_run(tmp_path, capsys):
    # remainder_pge2 at p = 1.5 must abort before the identity integrates
    cfg = dict(BASE_CONFIG, p=1.5, checks=["identity", "remainder_pge2"])
    path = write_config(tmp_path, cfg)
    code, out, err = run_cli(capsys, "verify", "--config", path)
    assert code == 2
    assert "needs p >= 2" in err
    assert out == ""


def test_verify_hpw_needs_matching_pair(tmp_path, capsys):
    cfg = dict(
        BASE_CONFIG,
        pair={"id": "darca_power", "theta": 0.5, "alpha": 1.0, "R": 1e30},
        checks=["hpw"],
    )
    path = write_config(tmp_path, cfg)
    code, _, err = run_cli(capsys, "verify", "--config", path)
    assert code == 2
    assert "no hpw case" in err


def test_verify_ckn_requires_section(tmp_path, capsys):
    path = write_config(tmp_path, dict(BASE_CONFIG, checks=["ckn"]))
    code, _, err = run_cli(capsys, "verify", "--config", path)
    assert code == 2
    assert "ckn section" in err


def test_verify_flag_overrides(tmp_path, capsys):
    path = write_config(tmp_path, dict(BASE_CONFIG, checks=["divergence"]))
    code, out, _ = run_cli(
        capsys, "verify", "--config", path, "--p", "3", "--seed", "11", "--max-evals", "1000000"
    )
    assert code == 0
    report = json.loads(out)
    assert report["config"]["p"] == 3.0
    assert report["config"]["seed"] == 11
    assert report["config"]["quadrature"]["max_evals"] == 1000000


def test_verify_determinism(tmp_path, capsys):
    cfg = dict(BASE_CONFIG, checks=["identity", "divergence", "condition"])
    path = write_config(tmp_path, cfg)
    code1, out1, _ = run_cli(capsys, "verify", "--config", path)
    code2, out2, _ = run_cli(capsys, "verify", "--config", path)
    assert code1 == code2 == 0
    rep1, rep2 = json.loads(out1), json.loads(out2)
    rep1.pop("wall_clock_seconds")
    rep2.pop("wall_clock_seconds")
    assert json.dumps(rep1, sort_keys=True) == json.dumps(rep2, sort_keys=True)


def test_verify_all_suite(tmp_path, capsys):
    out_path = tmp_path / "all.json"
    code, _, _ = run_cli(capsys, "verify", "--all", "--out", str(out_path))
    assert code == 0
    report = json.loads(out_path.read_text())
    assert report["summary"]["failed"] == 0
    assert report["summary"]["passed"] == len(report["checks"]) > 0
    names = [c["name"] for c in report["checks"]]
    assert len(names) == len(set(names))
    assert any("phase_twisted" in n for n in names)


def test_verify_needs_config_or_all(capsys):
    code, _, err = run_cli(capsys, "verify")
    assert code == 2
    assert "--config" in err


# -- export -------------------------------------------------------------------


def test_export_roundtrip_and_csv(tmp_path, capsys):
    cfg = dict(BASE_CONFIG, checks=["identity", "divergence"])
    path = write_config(tmp_path, cfg)
    report_path = tmp_path / "report.json"
    code, _, _ = run_cli(capsys, "verify", "--config", path, "--out", str(report_path))
    assert code == 0

    json_copy = tmp_path / "copy.json"
    code, _, _ = run_cli(
        capsys, "export", "--report", str(report_path), "--format", "json", "--out", str(json_copy)
    )
    assert code == 0
    assert json.loads(json_copy.read_text()) == json.loads(report_path.read_text())

    csv_path = tmp_path / "report.csv"
    code, _, _ = run_cli(
        capsys, "export", "--report", str(report_path), "--format", "csv", "--out", str(csv_path)
    )
    assert code == 0
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2
    assert rows[0]["name"] == "identity"
    assert rows[0]["passed"] == "True"


def test_export_unknown_format_is_usage_error(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["export", "--report", "x.json", "--format", "yaml", "--out", "y"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_export_missing_report(tmp_path, capsys):
    code, _, err = run_cli(
        capsys, "export", "--report", str(tmp_path / "nope.json"), "--format", "csv",
        "--out", str(tmp_path / "o.csv"),
    )
    assert code == 2
    assert "error:" in err


# -- standalone subcommands -----------------------------------------------------


def test_sharpness_command(capsys):
    code, out, _ = run_cli(capsys, "sharpness", "--pair", "dambrosio_power", "--levels", "3")
    assert code == 0
    rec = json.loads(out)
    assert rec["sharp_constant"] == 2.25
    assert rec["passed"] is True
    assert rec["final_gap"] <= 0.05


def test_check_divergence_command(capsys):
    code, out, _ = run_cli(capsys, "check-divergence", "--space", "2,1,0.0", "--samples", "25")
    assert code == 0
    rec = json.loads(out)
    assert rec["max_rel_err"] <= 1e-6


def test_condition_command(capsys):
    code, out, _ = run_cli(capsys, "condition", "--pair", "log_ball", "--samples", "64")
    assert code == 0
    rec = json.loads(out)
    assert rec["min_phi"] >= -1e-9
    assert rec["max_abs_mismatch"] <= 1e-6

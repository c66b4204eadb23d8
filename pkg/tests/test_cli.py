"""Test the command line entry points end to end on small runs."""
import json
from pathlib import Path

import pandas as pd
import pytest

from tridyson.cli import dumps, main

CHECKS = str(Path(__file__).resolve().parent.parent / "checks" / "acceptance.json")


def _config(tmp_path, text, name="run.conf"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def _report(out):
    with open(Path(out) / "report.json", "r", encoding="utf-8") as handle:
        return json.load(handle)


SMALL = "n = 3\nalpha = 3, 3\nx0 = 1, 1\ndt = 0.01\nt_end = 0.1\npaths = 2\nseed = 5\nranges = 1:2\n"


def test_simulate_writes_trajectories(tmp_path):
    """simulate writes one CSV per path and a manifest."""
    out = tmp_path / "out"
    assert main(["simulate", "-c", _config(tmp_path, SMALL), "-o", str(out)]) == 0
    frame = pd.read_csv(out / "paths" / "path_0000.csv")
    assert list(frame.columns) == [
        "t", "lambda_1", "lambda_2", "lambda_3", "lambda_1_2_1", "lambda_1_2_2",
    ]
    assert len(frame) == 11
    assert (out / "paths" / "path_0001.csv").exists()
    manifest = (out / "manifest.txt").read_text(encoding="utf-8")
    assert "command: simulate" in manifest
    assert "paths/path_0001.csv" in manifest


def test_simulate_is_deterministic(tmp_path):
    """Same config and seed give byte-identical trajectories; --seed changes them."""
    config = _config(tmp_path, SMALL)
    for name in ("a", "b"):
        assert main(["simulate", "-c", config, "-o", str(tmp_path / name), "--threads", "2"]) == 0
    assert main(["simulate", "-c", config, "-o", str(tmp_path / "c"), "--seed", "6"]) == 0
    first = (tmp_path / "a" / "paths" / "path_0001.csv").read_bytes()
    assert first == (tmp_path / "b" / "paths" / "path_0001.csv").read_bytes()
    assert first != (tmp_path / "c" / "paths" / "path_0001.csv").read_bytes()


def test_missing_required_key_exits_2(tmp_path, capsys):
    """Config errors exit with status 2 and name the key."""
    config = _config(tmp_path, "dt = 0.01\n")
    assert main(["simulate", "-c", config, "-o", str(tmp_path / "out")]) == 2
    assert "missing required config key 'n'" in capsys.readouterr().err


def test_missing_config_file_exits_2(tmp_path, capsys):
    """A config path that does not exist is a config error."""
    assert main(["gbe", "-c", str(tmp_path / "nope.conf"), "-o", str(tmp_path / "out")]) == 2
    assert "not found" in capsys.readouterr().err


def test_config_flag_required():
    """Commands that simulate need --config."""
    with pytest.raises(SystemExit):
        main(["simulate"])


def test_verify_identities_and_report(tmp_path):
    """verify-identities passes on a short run and renders to Markdown."""
    out = tmp_path / "ids"
    code = main(
        ["verify-identities", "--count", "2", "--max-size", "3", "-o", str(out), "--checks", CHECKS]
    )
    assert code == 0
    report = _report(out)
    assert report["passed"] is True
    assert report["metrics"]["identities"]["failures_total"] == 0
    assert {c["check_id"] for c in report["checks"]} == {"ID-01", "ID-02"}
    assert len(report["identity_reports"]) == report["metrics"]["identities"]["checks"]

    markdown = tmp_path / "ids.md"
    assert main(["report", "-i", str(out / "report.json"), "-o", str(markdown)]) == 0
    text = markdown.read_text(encoding="utf-8")
    assert text.startswith("# tridyson verify-identities report")
    assert "zero_pivot_scope" in text


def test_verify_sde_small_run(tmp_path):
    """verify-sde reports coefficient, pathwise and quadratic-variation metrics."""
    config = _config(tmp_path, "n = 2\nalpha = 3\nx0 = 1\ndt = 0.005\nt_end = 0.05\npaths = 2\n")
    out = tmp_path / "sde"
    code = main(["verify-sde", "-c", config, "-o", str(out), "--checks", CHECKS])
    assert code in (0, 1)
    report = _report(out)
    metrics = report["metrics"]
    assert metrics["coefficients"]["paths"] == 2
    assert metrics["coefficients"]["identity_residual_max"] < 1e-8
    assert metrics["pathwise"]["refine_factor"] == 2
    assert len(metrics["pathwise"]["per_path"]) == 2
    assert metrics["qv"]["diag_mean_relative_error_max"] <= metrics["qv"]["diag_relative_error_max"]
    assert report["scopes"] == ["pair", "regular"]
    ids = {c["check_id"] for c in report["checks"]}
    assert {"COEF-01", "PATH-01", "QV-01", "QV-04", "QV-05"} <= ids
    assert not any(i.startswith("COL-") for i in ids)
    assert report["summary"]["total_checks"] == len(report["checks"])


def test_collision_study_table(tmp_path):
    """collision-study writes one row per alpha vector."""
    config = _config(
        tmp_path,
        "n = 3\nx0 = 1, 1\ndt = 0.01\nt_end = 0.1\npaths = 2\nalpha_grid = 3, 3; 1, 1\n",
    )
    out = tmp_path / "col"
    assert main(["collision-study", "-c", config, "-o", str(out), "--checks", CHECKS]) in (0, 1)
    table = pd.read_csv(out / "collisions.csv")
    assert table["alpha"].tolist() == ["3,3", "1,1"]
    metrics = _report(out)["metrics"]["collisions"]
    assert metrics["rows"] == 2
    assert metrics["regular"]["absorbed"] == 0
    assert "recurrent" in metrics
    ids = {c["check_id"] for c in _report(out)["checks"]}
    assert ids == {"COL-01", "COL-02", "COL-03", "COL-04", "COL-05"}


def test_collision_checks_follow_the_grid(tmp_path):
    """A grid without alpha < 2 rows runs only the regular collision checks, all required."""
    config = _config(
        tmp_path,
        "n = 3\nx0 = 1, 1\ndt = 0.01\nt_end = 0.1\npaths = 2\nalpha_grid = 3, 3\n",
    )
    out = tmp_path / "col"
    assert main(["collision-study", "-c", config, "-o", str(out), "--checks", CHECKS]) == 0
    report = _report(out)
    assert report["scopes"] == ["regular"]
    assert {c["check_id"] for c in report["checks"]} == {"COL-01", "COL-02", "COL-03", "COL-05"}
    assert all(c["passed"] for c in report["checks"])


def test_gbe_command(tmp_path):
    """gbe reports the three moment comparisons."""
    config = _config(tmp_path, "n = 2\nbeta = 2\nsamples = 300\nseed = 1\n")
    out = tmp_path / "gbe"
    assert main(["gbe", "-c", config, "-o", str(out), "--checks", CHECKS]) in (0, 1)
    report = _report(out)
    assert [r["name"] for r in report["moment_reports"]] == ["trace_moment", "gap_moment", "time_slice"]
    assert {c["check_id"] for c in report["checks"]} == {"GBE-01", "GBE-02", "GBE-03"}


def test_dumps_drops_non_finite():
    """NaN and infinities become null; keys are sorted."""
    text = dumps({"b": float("nan"), "a": [1.0, float("inf")]})
    assert json.loads(text) == {"a": [1.0, None], "b": None}
    assert text.index('"a"') < text.index('"b"')

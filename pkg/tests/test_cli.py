"""Command-line wiring: exit codes, JSON output, config resolution."""

import json
import math

import pytest

from shrinker_ot.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ----------------------------------------------------------------------
# model-info


def test_model_info_cylinder_constants(capsys):
    code, out, _ = run_cli(capsys, "model-info", "--model", "cylinder",
                           "--n", "3", "--k", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    model = doc["model"]
    assert model["entropy"] == pytest.approx(math.log(2.0) - 1.0, abs=1e-15)
    assert abs(model["hamilton_residual"]) < 1e-12
    assert model["cut_radius"] == pytest.approx(math.pi * math.sqrt(2.0),
                                                abs=1e-12)
    assert model["ambient_dim"] == 4
    assert doc["config"]["model"] == "cylinder"
    assert doc["config"]["s"] == [0.0]


def test_model_info_gaussian_has_no_cut(capsys):
    code, out, _ = run_cli(capsys, "model-info")
    assert code == 0
    doc = json.loads(out)
    assert doc["model"]["cut_radius"] is None
    assert doc["model"]["entropy"] == 0.0


def test_output_documents_are_bitwise_reproducible(tmp_path, monkeypatch,
                                                   capsys):
    # the resolved config (including the out path) is part of the document,
    # so rerun with an identical relative path from two directories
    texts = []
    for sub in ("first", "second"):
        workdir = tmp_path / sub
        workdir.mkdir()
        monkeypatch.chdir(workdir)
        code, out, _ = run_cli(capsys, "model-info", "--model", "sphere",
                               "--n", "3", "--out", "info.json")
        assert code == 0
        assert out == ""  # routed to the file, not stdout
        texts.append((workdir / "info.json").read_bytes())
    assert texts[0] == texts[1]
    json.loads(texts[0].decode())


# ----------------------------------------------------------------------
# argument and config validation (exit status 2)


BAD_ARGV = [
    ("model-info", "--model", "cylinder", "--n", "3", "--k", "3"),
    ("model-info", "--n", "1"),
    ("model-info", "--model", "sphere", "--n", "3", "--k", "1"),
    ("model-info", "--resolution", "4"),
    ("check", "bogus-theorem"),
    ("check", "restricted", "--s", "-1"),
    ("check", "main", "--csv"),
    ("sweep", "resolution"),
    ("sweep", "resolution", "12,foo"),
    ("sweep", "resolution", "12.5"),
    ("sweep", "voltage", "1,2"),
    ("moments", "0"),
    ("moments", "two,four"),
    ("model-info", "--config", "/nonexistent/run.cfg"),
]


@pytest.mark.parametrize("argv", BAD_ARGV, ids=lambda a: " ".join(a))
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2
    assert err  # argparse or error: diagnostics on stderr


def test_unknown_subcommand_exits_2(capsys):
    assert run_cli(capsys, "frobnicate")[0] == 2
    assert run_cli(capsys)[0] == 2


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("model = gaussian\nvolume = 12\n")
    code, _, err = run_cli(capsys, "model-info", "--config", str(cfg))
    assert code == 2
    assert "volume" in err


def test_flags_override_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# comparison run\n"
        "model = cylinder\n"
        "n = 4\n"
        "k = 1\n"
        "resolution = 16\n"
        "s = 0,1\n")
    code, out, _ = run_cli(capsys, "model-info", "--config", str(cfg),
                           "--n", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["config"]["n"] == 3
    assert doc["config"]["k"] == 1
    assert doc["config"]["resolution"] == 16
    assert doc["config"]["s"] == [0.0, 1.0]
    assert doc["model"]["entropy"] == pytest.approx(math.log(2.0) - 1.0,
                                                    abs=1e-15)


def test_thread_cap_env_is_validated(capsys, monkeypatch):
    monkeypatch.setenv("SHRINKER_OT_THREADS", "zebra")
    code, _, err = run_cli(capsys, "sweep", "resolution", "12",
                           "--model", "gaussian", "--n", "2")
    assert code == 2
    assert "SHRINKER_OT_THREADS" in err
    monkeypatch.setenv("SHRINKER_OT_THREADS", "0")
    assert run_cli(capsys, "sweep", "resolution", "12")[0] == 2


# ----------------------------------------------------------------------
# checks


def test_check_main_gaussian_passes(capsys):
    code, out, _ = run_cli(capsys, "check", "main", "--model", "gaussian",
                           "--n", "2", "--resolution", "16")
    assert code == 0
    doc = json.loads(out)
    report = doc["reports"][0]
    assert report["passed"] is True
    assert report["theorem_id"] == "main"
    assert report["rhs"] == 0.0
    assert report["lhs"] < 1e-12


def test_check_restricted_expands_over_s(capsys):
    code, out, _ = run_cli(capsys, "check", "restricted", "--model",
                           "gaussian", "--n", "2", "--resolution", "16",
                           "--s", "0,1")
    assert code == 0
    doc = json.loads(out)
    assert [rep["constants"]["s"] for rep in doc["reports"]] == [0.0, 1.0]
    assert all(rep["passed"] for rep in doc["reports"])
    masses = [rep["constants"]["nu_mass"] for rep in doc["reports"]]
    assert masses[1] < masses[0] <= 1.0 + 1e-12


def test_check_growth_cylinder(capsys):
    code, out, _ = run_cli(capsys, "check", "growth", "--model", "cylinder",
                           "--n", "3", "--k", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["reports"][0]["theorem_id"] == "growth"
    assert doc["reports"][0]["passed"] is True


def test_check_lsi_reweighted_gaussian(capsys):
    code, out, _ = run_cli(capsys, "check", "lsi", "--resolution", "24")
    assert code == 0
    doc = json.loads(out)
    report = doc["reports"][0]
    assert report["passed"] is True
    assert 0.0 < report["lhs"] < report["rhs"]


def test_check_talagrand_halfspace_on_sphere(capsys):
    code, out, _ = run_cli(capsys, "check", "talagrand", "--model", "sphere",
                           "--n", "3")
    assert code == 0
    doc = json.loads(out)
    report = doc["reports"][0]
    assert report["passed"] is True
    # doubling a half-space costs exactly log 2 in relative entropy
    assert report["constants"]["relative_entropy"] == pytest.approx(
        math.log(2.0), abs=1e-9)
    assert report["rhs"] == pytest.approx(4.0 * math.log(2.0), abs=1e-9)


def test_check_failure_exits_1(capsys):
    # coarse cylinder minimum run drifts above the 5% band: the report
    # itself must carry passed=false and the process must say so
    code, out, _ = run_cli(capsys, "check", "minimum", "--model", "cylinder",
                           "--n", "3", "--k", "1", "--resolution", "16")
    assert code == 1
    doc = json.loads(out)
    assert doc["reports"][0]["passed"] is False


def test_check_writes_file_csv_and_summary(tmp_path, capsys):
    out_path = tmp_path / "main.json"
    code, out, err = run_cli(capsys, "check", "main", "--model", "gaussian",
                             "--n", "2", "--resolution", "12",
                             "--out", str(out_path), "--csv")
    assert code == 0
    assert out == ""
    assert "[pass] main" in err
    doc = json.loads(out_path.read_text())
    assert doc["reports"][0]["passed"] is True
    table = (tmp_path / "main.csv").read_text().splitlines()
    assert "theorem_id" in table[0].split(",")
    assert len(table) == 2


# ----------------------------------------------------------------------
# sweep


def test_sweep_over_s_labels_rows(capsys, monkeypatch):
    monkeypatch.setenv("SHRINKER_OT_THREADS", "2")
    code, out, _ = run_cli(capsys, "sweep", "s", "0,1", "--model",
                           "gaussian", "--n", "2", "--resolution", "12")
    assert code == 0
    doc = json.loads(out)
    rows = doc["rows"]
    assert [row["value"] for row in rows] == [0.0, 1.0]
    assert [row["theorem_id"] for row in rows] == ["main", "restricted"]
    assert all(row["passed"] for row in rows)
    assert all(isinstance(c, int) for row in rows for c in row["support"])


def test_sweep_resolution_rows_are_integers(capsys):
    code, out, _ = run_cli(capsys, "sweep", "resolution", "12,16",
                           "--model", "gaussian", "--n", "2")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [row["value"] for row in rows] == [12, 16]
    assert all(row["passed"] for row in rows)


def test_sweep_rejects_b_below_feasible(capsys):
    code, _, err = run_cli(capsys, "sweep", "b", "1.0", "--model",
                           "cylinder", "--n", "3", "--k", "1")
    assert code == 2
    assert "below the fitted feasible" in err


# ----------------------------------------------------------------------
# moments and fit-potential


def test_moments_default_orders(capsys):
    code, out, _ = run_cli(capsys, "moments", "--model", "gaussian",
                           "--n", "2")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [row["order"] for row in rows] == [1, 2, 4, 6]
    by_order = {row["order"]: row["value"] for row in rows}
    assert by_order[2] == pytest.approx(4.0, rel=1e-6)


def test_moments_custom_orders(capsys):
    code, out, _ = run_cli(capsys, "moments", "2,4", "--model", "cylinder",
                           "--n", "3", "--k", "1")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [row["order"] for row in rows] == [2, 4]
    assert rows[0]["value"] == pytest.approx(math.pi ** 2 - 2.0, abs=1e-3)


def test_fit_potential_reports_one_fit_per_s(capsys):
    code, out, _ = run_cli(capsys, "fit-potential", "--model", "cylinder",
                           "--n", "3", "--k", "1", "--s", "0,3")
    assert code == 0
    fits = json.loads(out)["fits"]
    assert [fit["s"] for fit in fits] == [0.0, 3.0]
    for fit in fits:
        assert fit["a"] == 0.0
        assert fit["b"] == pytest.approx(4.3264881203844574, abs=1e-12)
        assert fit["grid_margin"] >= 0.0
    assert fits[0]["alpha"] == pytest.approx(327.42017197397035, rel=1e-12)

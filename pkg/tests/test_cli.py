import json
import subprocess
import sys

import pytest


def run_cli(*args, env=None):
    return subprocess.run([sys.executable, "-m", "fem_surrogate", *args],
                          capture_output=True, text=True, env=env)


@pytest.fixture(scope="module")
def osc_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "osc.csv"
    res = run_cli("generate", "--experiment", "example1", "--out", str(path))
    assert res.returncode == 0, res.stderr
    return path


@pytest.fixture(scope="module")
def beam_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "beam.csv"
    res = run_cli("generate", "--experiment", "example2", "--out", str(path),
                  "--grid-start", "1", "--grid-stop", "120", "--grid-points", "40",
                  "--n-elements", "8")
    assert res.returncode == 0, res.stderr
    return path


@pytest.fixture(scope="module")
def beam_model(tmp_path_factory, beam_csv):
    path = tmp_path_factory.mktemp("models") / "beam.model"
    res = run_cli("train", "--data", str(beam_csv), "--out-model", str(path),
                  "--experiment", "example2", "--hidden", "16,16",
                  "--epochs", "150", "--lr", "0.003", "--seed", "7")
    assert res.returncode == 0, res.stderr
    return path


# --- generate ----------------------------------------------------------------

def test_generate_example1_default_grid(osc_csv):
    lines = osc_csv.read_text().splitlines()
    assert lines[0] == "freq_hz,amplitude"
    assert len(lines) == 201  # header + 200 rows
    assert all(len(ln.split(",")) == 2 for ln in lines[1:])


def test_generate_example2_default_grid(tmp_path):
    path = tmp_path / "beam_default.csv"
    res = run_cli("generate", "--experiment", "example2", "--out", str(path))
    assert res.returncode == 0, res.stderr
    lines = path.read_text().splitlines()
    assert lines[0] == "freq_hz,ux_max,uy_max,uz_max"
    assert len(lines) == 401  # header + 400 rows
    assert all(len(ln.split(",")) == 4 for ln in lines[1:])
    assert "rows=400" in res.stdout


def test_generate_reports_rows_and_bounds(osc_csv, tmp_path):
    res = run_cli("generate", "--experiment", "example1",
                  "--out", str(tmp_path / "x.csv"),
                  "--grid-start", "1", "--grid-stop", "5", "--grid-points", "17")
    assert res.returncode == 0
    assert "rows=17" in res.stdout
    assert "f_min_hz=1" in res.stdout and "f_max_hz=5" in res.stdout


def test_generate_invalid_n_elements_exits_2(tmp_path):
    res = run_cli("generate", "--experiment", "example2",
                  "--out", str(tmp_path / "x.csv"), "--n-elements", "1")
    assert res.returncode == 2
    assert "n_elements" in res.stderr


def test_generate_invalid_grid_exits_2(tmp_path):
    res = run_cli("generate", "--experiment", "example1",
                  "--out", str(tmp_path / "x.csv"),
                  "--grid-start", "5", "--grid-stop", "1", "--grid-points", "10")
    assert res.returncode == 2


def test_generate_unwritable_out_path_exits_2_before_solving(tmp_path):
    res = run_cli("generate", "--experiment", "example1",
                  "--out", str(tmp_path / "missing_dir" / "x.csv"))
    assert res.returncode == 2
    assert "output directory" in res.stderr


# --- train -------------------------------------------------------------------

def test_train_writes_model_and_history(tmp_path, osc_csv):
    model = tmp_path / "osc.model"
    history = tmp_path / "hist.csv"
    res = run_cli("train", "--data", str(osc_csv), "--out-model", str(model),
                  "--history", str(history), "--hidden", "8,8",
                  "--epochs", "60", "--seed", "3")
    assert res.returncode == 0, res.stderr
    assert "final_train_mse_scaled=" in res.stdout
    assert "final_test_mse_scaled=" in res.stdout
    doc = json.loads(model.read_text())
    assert doc["layer_sizes"] == [1, 8, 8, 1]
    hist_lines = history.read_text().splitlines()
    assert hist_lines[0] == "epoch,train_mse,test_mse"
    assert len(hist_lines) == 61


def test_train_is_byte_deterministic(tmp_path, osc_csv):
    out = []
    for name in ("a.model", "b.model"):
        path = tmp_path / name
        res = run_cli("train", "--data", str(osc_csv), "--out-model", str(path),
                      "--hidden", "8", "--epochs", "40", "--seed", "7")
        assert res.returncode == 0, res.stderr
        out.append(path.read_bytes())
    assert out[0] == out[1]


def test_train_missing_data_exits_3(tmp_path):
    missing = tmp_path / "nope.csv"
    res = run_cli("train", "--data", str(missing),
                  "--out-model", str(tmp_path / "m.model"))
    assert res.returncode == 3
    assert "nope.csv" in res.stderr


def test_train_divergence_exits_4(tmp_path, osc_csv):
    res = run_cli("train", "--data", str(osc_csv),
                  "--out-model", str(tmp_path / "m.model"),
                  "--optimizer", "sgd", "--lr", "1e9", "--epochs", "30",
                  "--hidden", "8")
    assert res.returncode == 4
    assert "epoch" in res.stderr


@pytest.mark.slow
def test_train_example1_defaults_reaches_spec_loss(tmp_path, osc_csv):
    res = run_cli("train", "--data", str(osc_csv),
                  "--out-model", str(tmp_path / "osc_default.model"),
                  "--seed", "42")
    assert res.returncode == 0, res.stderr
    val = float(res.stdout.split("final_train_mse_scaled=")[1].split()[0])
    assert val < 1e-3


# --- predict -----------------------------------------------------------------

def test_predict_single_frequency(beam_model):
    res = run_cli("predict", "--model", str(beam_model), "--freq", "9")
    assert res.returncode == 0, res.stderr
    vals = [float(v) for v in res.stdout.split()]
    assert len(vals) == 3
    assert all(v > 0.0 for v in vals)
    assert res.stderr == ""


def test_predict_out_of_range_warns_but_succeeds(beam_model):
    res = run_cli("predict", "--model", str(beam_model), "--freq", "500")
    assert res.returncode == 0
    assert "warning" in res.stderr.lower()
    assert len(res.stdout.split()) == 3


def test_predict_grid_mode_writes_curve(tmp_path, beam_model):
    out = tmp_path / "curve.csv"
    res = run_cli("predict", "--model", str(beam_model), "--grid-start", "5",
                  "--grid-stop", "100", "--grid-points", "20", "--out", str(out))
    assert res.returncode == 0, res.stderr
    lines = out.read_text().splitlines()
    assert lines[0] == "freq_hz,pred_1,pred_2,pred_3"
    assert len(lines) == 21


def test_predict_corrupt_model_exits_5(tmp_path, beam_model):
    bad = tmp_path / "bad.model"
    bad.write_text(beam_model.read_text()[:100])
    res = run_cli("predict", "--model", str(bad), "--freq", "9")
    assert res.returncode == 5


def test_predict_wrong_version_exits_5(tmp_path, beam_model):
    doc = beam_model.read_text().replace('"format_version": 1',
                                         '"format_version": 3')
    bad = tmp_path / "old.model"
    bad.write_text(doc)
    res = run_cli("predict", "--model", str(bad), "--freq", "9")
    assert res.returncode == 5


def test_predict_conflicting_modes_exits_2(beam_model):
    res = run_cli("predict", "--model", str(beam_model), "--freq", "9",
                  "--grid-points", "10")
    assert res.returncode == 2
    assert "conflict" in res.stderr


# --- eval --------------------------------------------------------------------

def test_eval_small_run_writes_artifacts(tmp_path):
    out_dir = tmp_path / "report"
    svg = tmp_path / "plot.svg"
    res = run_cli("eval", "--experiment", "example2", "--out-dir", str(out_dir),
                  "--plot", str(svg), "--grid-start", "1", "--grid-stop", "120",
                  "--grid-points", "30", "--n-elements", "8",
                  "--hidden", "16,16", "--epochs", "100", "--seed", "1")
    assert res.returncode == 0, res.stderr
    curves = out_dir / "example2_curves.csv"
    metrics = out_dir / "example2_metrics.txt"
    assert curves.exists() and metrics.exists() and svg.exists()
    kv = dict(line.split("=", 1) for line in metrics.read_text().splitlines())
    assert kv["experiment"] == "example2"
    assert "final_test_mse_scaled" in kv
    assert svg.read_text().count("<polyline") == 6


def test_eval_unknown_flag_exits_2(tmp_path):
    res = run_cli("eval", "--experiment", "example1", "--freq", "9",
                  "--out-dir", str(tmp_path))
    assert res.returncode == 2


def test_config_file_supplies_defaults_and_flags_override(tmp_path, osc_csv):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"hidden": "8", "epochs": 25, "seed": 9}))
    m1 = tmp_path / "m1.model"
    res = run_cli("train", "--data", str(osc_csv), "--out-model", str(m1),
                  "--config", str(cfg))
    assert res.returncode == 0, res.stderr
    doc = json.loads(m1.read_text())
    assert doc["layer_sizes"] == [1, 8, 1]
    assert doc["meta"]["seed"] == 9
    # explicit flag beats the config value
    m2 = tmp_path / "m2.model"
    res = run_cli("train", "--data", str(osc_csv), "--out-model", str(m2),
                  "--config", str(cfg), "--hidden", "4")
    assert res.returncode == 0
    assert json.loads(m2.read_text())["layer_sizes"] == [1, 4, 1]


def test_config_file_unknown_key_exits_2(tmp_path, osc_csv):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"not_a_flag": 1}))
    res = run_cli("train", "--data", str(osc_csv),
                  "--out-model", str(tmp_path / "m.model"), "--config", str(cfg))
    assert res.returncode == 2
    assert "not_a_flag" in res.stderr


def test_missing_subcommand_exits_2():
    res = run_cli()
    assert res.returncode == 2

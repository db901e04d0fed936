import csv
import json

import pytest

from dopplerkb import cli
from dopplerkb.thermometry import default_ledger

SMALL = {
    "version": 1,
    "campaign": {"pressures": [0.25, 1.0, 2.5], "spectra_per_pressure": 5},
    "analysis": {"g_bracket": [60000.0, 200000.0]},
}


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    root = tmp_path_factory.mktemp("run")
    cfg = write(root / "cfg.json", SMALL)
    camp = str(root / "camp")
    assert cli.main(["synth", "--config", cfg, "--seed", "7", "--out", camp]) == 0
    fit = str(root / "fit")
    assert cli.main(["fit", camp, "--workers", "1", "--out", fit]) == 0
    return root, cfg, camp, fit


def test_synth_writes_one_file_per_spectrum(small_run):
    root, _, camp, _ = small_run
    manifest = json.loads((root / "camp" / "manifest.json").read_text())
    assert len(manifest["files"]) == 15
    assert len(list((root / "camp").glob("spectrum_*.csv"))) == 15
    assert len(list((root / "camp").glob("spectrum_*.json"))) == 15
    with open(root / "camp" / manifest["files"][0]) as fh:
        assert next(csv.reader(fh)) == ["freq_offset_hz", "signal", "sigma"]
    assert manifest["config"]["version"] == 1 and manifest["master_seed"] == 7
    assert manifest["notes"]


def test_synth_is_byte_identical(small_run, tmp_path):
    root, cfg, _, _ = small_run
    assert cli.main(["synth", "--config", cfg, "--seed", "7", "--out", str(tmp_path)]) == 0
    for f in (root / "camp").iterdir():
        assert (tmp_path / f.name).read_bytes() == f.read_bytes()


@pytest.mark.parametrize(
    "bad",
    [
        {"version": 1, "campaign": {"pressures": [0.0, 1.0]}},
        {"version": 1, "campaign": {"pressures": [-1.0]}},
        {"version": 2},
        {"campaign": {}},
        {"version": 1, "campaign": {"pressure": [1.0]}},
        {"version": 1, "extra": 1},
        {"version": 1, "analysis": {"g_bracket": [5.0, 1.0]}},
    ],
)
def test_synth_schema_errors(tmp_path, bad):
    cfg = write(tmp_path / "bad.json", bad)
    assert cli.main(["synth", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_usage_errors(tmp_path):
    assert cli.main([]) == 2
    assert cli.main(["synth"]) == 2
    assert cli.main(["fit", str(tmp_path), "--out", str(tmp_path), "--g-bracket", "5"]) == 2
    assert cli.main(["fit", str(tmp_path), "--out", str(tmp_path), "--model", "lorentz"]) == 2
    (tmp_path / "broken.json").write_text("{not json")
    assert cli.main(["synth", "--config", str(tmp_path / "broken.json"), "--out", str(tmp_path)]) == 2


def test_fit_recovers_kb(small_run, capsys):
    root, _, _, fit = small_run
    summary = json.loads((root / "fit" / "campaign.json").read_text())
    truth = summary["config"]["campaign"]["kb_truth"]
    assert abs(summary["kb_j_per_k"] - truth) < 3 * summary["kb_rel_sigma"] * truth
    assert summary["n_spectra"] == 15
    assert len((root / "fit" / "fits.jsonl").read_text().splitlines()) == 15


def test_fit_is_reproducible(small_run, tmp_path):
    root, _, camp, _ = small_run
    assert cli.main(["fit", camp, "--workers", "2", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "campaign.json").read_bytes() == (root / "fit" / "campaign.json").read_bytes()
    assert (tmp_path / "fits.jsonl").read_bytes() == (root / "fit" / "fits.jsonl").read_bytes()


def test_fit_models_differ(small_run, tmp_path):
    root, _, camp, _ = small_run
    assert cli.main(["fit", camp, "--model", "voigt", "--workers", "1", "--out", str(tmp_path)]) == 0
    v = json.loads((tmp_path / "campaign.json").read_text())
    g = json.loads((root / "fit" / "campaign.json").read_text())
    assert v["model"] == "voigt" and g["model"] == "galatry"
    assert v["kb_j_per_k"] < g["kb_j_per_k"]


def test_fit_input_errors(tmp_path):
    assert cli.main(["fit", str(tmp_path), "--out", str(tmp_path / "o")]) == 2
    assert cli.main(["fit", str(tmp_path / "missing"), "--out", str(tmp_path / "o")]) == 2


def test_numerical_failure_exit_code(tmp_path):
    cfg = write(tmp_path / "one.json", {"version": 1, "campaign": {"pressures": [1.0], "spectra_per_pressure": 3}})
    camp = str(tmp_path / "camp")
    assert cli.main(["synth", "--config", cfg, "--out", camp]) == 0
    assert cli.main(["fit", camp, "--workers", "1", "--out", str(tmp_path / "fit")]) == 3


def test_bracket_without_sign_change_exit_code(small_run, tmp_path):
    _, _, camp, _ = small_run
    assert cli.main(["fit", camp, "--g-bracket", "180000,200000", "--workers", "1", "--out", str(tmp_path)]) == 3


def test_hyperfine_default_constants(tmp_path, capsys):
    assert cli.main(["hyperfine", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "hyperfine_report.json").read_text())
    assert rep["width_ppm"] == pytest.approx(4.355, rel=0.1)
    assert rep["kb_ppm"] == pytest.approx(-8.71, rel=0.1)
    assert rep["weak_fraction"] == pytest.approx(0.91, abs=0.05)
    assert len((tmp_path / "sticks.csv").read_text().splitlines()) == 79
    assert "k_B correction" in capsys.readouterr().out


def test_hyperfine_zero_constants(tmp_path):
    zero = {"eqq": 0.0, "r": 0.0, "s": 0.0, "t": 0.0, "u": 0.0}
    cfg = write(tmp_path / "hf.json", {"version": 1, "lower": zero, "upper": zero})
    assert cli.main(["hyperfine", "--config", cfg, "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "hyperfine_report.json").read_text())
    assert rep["n_effective_sticks"] == 1
    assert rep["width_ppm"] == pytest.approx(0.0, abs=1e-6)


def test_hyperfine_bad_inputs(tmp_path):
    assert cli.main(["hyperfine", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 2
    cfg = write(tmp_path / "hf.json", {"version": 1, "lower": {"eqq": "x"}, "upper": {"eqq": 1.0}})
    assert cli.main(["hyperfine", "--config", cfg, "--out", str(tmp_path)]) == 2
    cfg = write(tmp_path / "hf2.json", {"version": 1, "lower": {"r": 1.0}, "upper": {"eqq": 1.0}})
    assert cli.main(["hyperfine", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_report_identity_ledger(small_run, tmp_path, capsys):
    root, _, _, _ = small_run
    led = write(tmp_path / "empty.json", [])
    assert cli.main(["report", str(root / "fit" / "campaign.json"), "--ledger", led, "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["kb_corrected"] == rep["kb_raw"]
    assert rep["syst_rel"] == 0.0
    assert (tmp_path / "subsets.csv").read_text().splitlines()[0] == "subset,width_mean_hz,width_sigma_hz"
    assert len((tmp_path / "uncertainty_vs_time.csv").read_text().splitlines()) == 16


def test_report_default_ledger(small_run, capsys):
    root, _, _, _ = small_run
    assert cli.main(["report", str(root / "fit" / "campaign.json")]) == 0
    out = capsys.readouterr().out
    assert "Hyperfine" in out and "-8.71" in out
    assert "corrected" in out


def test_report_ledger_file_roundtrip(small_run, tmp_path):
    root, _, _, _ = small_run
    led = write(tmp_path / "led.json", default_ledger().to_list())
    assert cli.main(["report", str(root / "fit" / "campaign.json"), "--ledger", led, "--out", str(tmp_path)]) == 0


def test_report_malformed_inputs(small_run, tmp_path):
    root, _, _, _ = small_run
    summary = str(root / "fit" / "campaign.json")
    (tmp_path / "bad.json").write_text("[{")
    assert cli.main(["report", summary, "--ledger", str(tmp_path / "bad.json")]) == 2
    led = write(tmp_path / "led.json", [{"name": "x", "width_ppm": 1.0}])
    assert cli.main(["report", summary, "--ledger", led]) == 2
    led = write(tmp_path / "led2.json", [{"name": "x", "width_ppm": 1.0, "uncertainty_ppm": 1.0, "kind": "guess"}])
    assert cli.main(["report", summary, "--ledger", led]) == 2
    assert cli.main(["report", write(tmp_path / "s.json", {"x": 1})]) == 2


def test_bias_command(small_run, tmp_path, capsys):
    _, _, camp, _ = small_run
    code = cli.main(["bias", camp, "--p-max", "1.0,2.5", "--workers", "1", "--out", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "bias.csv").read_text().splitlines()
    assert lines[0] == "p_max_pa,bias_ppm,sigma_ppm" and len(lines) == 3
    assert float(lines[2].split(",")[1]) < 0
    assert (tmp_path / "bias_theory.csv").exists()


def test_bias_too_few_spectra(small_run, tmp_path):
    _, _, camp, _ = small_run
    assert cli.main(["bias", camp, "--p-max", "0.3", "--workers", "1", "--out", str(tmp_path)]) == 2


def test_bootstrap_command(small_run, tmp_path, capsys):
    _, _, camp, _ = small_run
    assert cli.main(["bootstrap", camp, "--index", "5", "--replicates", "50", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "bootstrap.json").read_text())
    assert rep["bootstrap_sigma_hz"] / rep["covariance_sigma_hz"] == pytest.approx(1.0, abs=0.35)
    assert cli.main(["bootstrap", camp, "--index", "99"]) == 2
    assert cli.main(["bootstrap", camp, "--replicates", "1"]) == 2


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "dopplerkb", "hyperfine", "--out", str(tmp_path)], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr

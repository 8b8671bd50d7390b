"""Command-line front end: configs, exports, presets and the suite runner."""

import json
import subprocess
import sys

import numpy as np
import pytest

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from pdmdho.cli import (EXIT_CHECK, EXIT_NUMERICS, EXIT_OK, EXIT_VALIDATION, load_config, main)
from pdmdho.errors import ConfigError

CONFIG = """\
family = "mathews_lakshmanan"
lambda = 2.0
omega0 = 1.0
eta = 0.2
amplitudes = [1.0]
t_span = [0.0, 10.0]
sample_count = 101
"""


def _write(tmp_path, text, name="scenario.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_run_writes_csv(tmp_path):
    out = tmp_path / "out"
    assert main(["run", _write(tmp_path, CONFIG), "--out", str(out), "--plot"]) == EXIT_OK
    lines = (out / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "t,x_1,xdot_1,p_1,E,q_ref_1"
    assert len(lines) == 102
    first = lines[1].split(",")
    assert first[0] == "0.0000000000000000e+00"
    # 17 significant digits in scientific notation
    assert all(len(v.lstrip("-").split("e")[0]) == 18 for v in first)
    assert float(first[1]) == pytest.approx(np.sinh(2.0) / 2.0, rel=1e-15)
    assert (out / "phase.csv").read_text().splitlines()[0] == "t,x_1,p_1"
    assert (out / "plot.svg").read_text().startswith("<svg")


def test_run_ndim_and_integrated(tmp_path):
    text = ('family = "ndim_ml"\nlambda = 1.0\ndimension = 3\neta = 0.05\n'
            'amplitudes = [0.3, 0.3, 0.3]\nsource = "integrated"\nsample_count = 51\n')
    out = tmp_path / "nd"
    assert main(["run", _write(tmp_path, text), "--out", str(out), "--tol", "1e-11"]) == EXIT_OK
    header = (out / "trajectory.csv").read_text().splitlines()[0].split(",")
    assert header == ["t", "x_1", "x_2", "x_3", "xdot_1", "xdot_2", "xdot_3", "p_1", "p_2", "p_3", "E",
                      "q_ref_1", "q_ref_2", "q_ref_3"]
    data = np.loadtxt(out / "trajectory.csv", delimiter=",", skiprows=1)
    # integrated x agrees with the closed form mapped from q_ref
    q = data[:, 11:14]
    s = np.linalg.norm(q, axis=1)[:, None]
    np.testing.assert_allclose(data[:, 1:4], q / np.sqrt(1 - s ** 2), atol=1e-8)


def test_run_uses_output_dir_key(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["run", _write(tmp_path, CONFIG + 'output_dir = "custom"\n')]) == EXIT_OK
    assert (tmp_path / "custom" / "trajectory.csv").exists()


@pytest.mark.parametrize("old,new,field", [
    ("", "colour = 3\n", "colour"),
    ("eta = 0.2\n", 'eta = "fast"\n', "eta"),
    ("", "b = 0.1\n", "b"),
    ("sample_count = 101\n", "sample_count = 1\n", "sample_count"),
    ("", 'branch = "sideways"\n', "branch"),
])
def test_config_errors_name_field_and_line(old, new, field):
    text = CONFIG.replace(old, new) if old else CONFIG + new
    with pytest.raises(ConfigError, match=rf"'{field}' \(line \d+\)"):
        load_config(tomllib.loads(text), text)


def test_config_missing_required():
    with pytest.raises(ConfigError, match="family"):
        load_config({"amplitudes": [1.0]})
    with pytest.raises(ConfigError, match="amplitudes"):
        load_config({"family": "uniform"})
    with pytest.raises(ConfigError, match="ndim_ml requires"):
        load_config({"family": "ndim_ml", "lambda": 2.0, "amplitudes": [0.6]})


def test_config_b_and_m0():
    cfg = load_config({"family": "uniform", "amplitudes": [1.0], "b": 0.2, "m0": 2.0, "omega0": 0.5})
    assert cfg.scenario.params.eta == pytest.approx(0.1)


def test_run_exit_codes(tmp_path, capsys):
    assert main(["run", _write(tmp_path, CONFIG + "bogus = 1\n")]) == EXIT_VALIDATION
    assert "bogus" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.toml")]) == EXIT_VALIDATION
    assert main(["run", _write(tmp_path, "family = [")]) == EXIT_VALIDATION
    morse = 'family = "morse_exp"\nlambda = 1.0\neta = 0.0\namplitudes = [1.5]\n'
    assert main(["run", _write(tmp_path, morse), "--out", str(tmp_path / "m")]) == EXIT_NUMERICS
    assert main(["run", _write(tmp_path, CONFIG), "--tol", "-1"]) == EXIT_VALIDATION
    assert main([]) == EXIT_VALIDATION


def test_figure_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["figure", "fig1a", "--out", str(a)]) == EXIT_OK
    assert main(["figure", "fig1a", "--out", str(b)]) == EXIT_OK
    names = sorted(p.relative_to(a) for p in a.rglob("*.csv"))
    assert len(names) == 8
    for rel in names:
        assert (a / rel).read_bytes() == (b / rel).read_bytes()


def test_figure_options(tmp_path):
    out = tmp_path / "f"
    assert main(["figure", "fig3b", "--out", str(out), "--plot"]) == EXIT_OK
    assert sorted(p.name for p in out.iterdir()) == ["fig3b_lam1", "fig3b_lam3", "fig3b_lam5"]
    assert (out / "fig3b_lam1" / "plot.svg").exists()
    assert main(["figure", "fig1a", "--eta", "0.05", "0.5", "--out", str(out)]) == EXIT_OK
    assert (out / "fig1a_eta0.5" / "trajectory.csv").exists()
    assert main(["figure", "nope", "--out", str(out)]) == EXIT_VALIDATION
    assert main(["figure", "fig1c", "--eta", "0.1", "--out", str(out)]) == EXIT_VALIDATION


def test_verify_writes_reports(tmp_path):
    assert main(["verify", "roundtrip", "--out", str(tmp_path)]) == EXIT_OK
    data = json.loads((tmp_path / "roundtrip_report.json").read_text())
    assert data["passed"] and len(data["checks"]) > 5
    assert (tmp_path / "roundtrip_report.txt").exists()


def test_verify_mutation_fails(tmp_path):
    assert main(["verify", "residual", "--perturb-omega", "1e-3", "--out", str(tmp_path)]) == EXIT_CHECK
    assert json.loads((tmp_path / "residual_report.json").read_text())["passed"] is False


def test_list_presets(capsys):
    assert main(["--list-presets"]) == EXIT_OK
    listing = capsys.readouterr().out
    assert "fig1a" in listing and "fig5f" in listing
    assert main(["list-presets"]) == EXIT_OK


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pdmdho", "list-presets"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.count("\n") == 20

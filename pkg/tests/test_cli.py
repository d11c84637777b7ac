import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from mop.cli import main

BASE_CFG = {
    "p": 2,
    "mode": "periodic",
    "coefficients": [3, 1, 5, 2, 2, 9, 6, 1],
    "seed": 1,
    "grid": 2048,
    "suite_cases": 4,
}


def write_cfg(tmp_path, **extra):
    cfg = dict(BASE_CFG)
    cfg.update(extra)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def test_figure_empty_sizes_header_only(tmp_path):
    cfg = write_cfg(tmp_path, n=[], out=str(tmp_path))
    assert main(["figure", "--config", cfg]) == 0
    lines = (tmp_path / "figure.csv").read_text().splitlines()
    assert lines == ["series,re,im"]


def test_figure_and_gamma_outputs(tmp_path):
    cfg = write_cfg(tmp_path, n=[23], out=str(tmp_path))
    assert main(["figure", "--config", cfg]) == 0
    lines = (tmp_path / "figure.csv").read_text().splitlines()
    assert lines[0] == "series,re,im"
    assert any(line.startswith("Q23,") for line in lines[1:])
    assert any(line.startswith("gamma1,") for line in lines[1:])
    assert main(["gamma", "--config", cfg]) == 0
    summary = json.loads((tmp_path / "gamma.json").read_text())
    assert summary[0]["count"] == 3 and summary[1]["count"] == 2


def test_byte_identical_reruns(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    cfg1 = write_cfg(tmp_path, n=[15], out=str(out1))
    main(["figure", "--config", cfg1])
    main(["gamma", "--config", cfg1, "--out", str(out2)])
    main(["figure", "--config", cfg1, "--out", str(out2)])
    assert (out1 / "figure.csv").read_bytes() == (out2 / "figure.csv").read_bytes()


def test_unknown_suite_exit_2(tmp_path):
    cfg = write_cfg(tmp_path, out=str(tmp_path))
    assert main(["verify", "--config", cfg, "--suite", "nonsense"]) == 2


def test_config_error_exit_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"p": 2, "mode": "periodic", "coefficients": [1.0], "bogus": 1}))
    assert main(["verify", "--config", str(path), "--suite", "gamma"]) == 2
    path2 = tmp_path / "bad2.json"
    path2.write_text(json.dumps({"p": 0, "mode": "periodic", "coefficients": [1.0]}))
    assert main(["gamma", "--config", str(path2)]) == 2


def test_verify_gamma_suite_json(tmp_path):
    cfg = write_cfg(tmp_path, out=str(tmp_path))
    assert main(["verify", "--config", cfg, "--suite", "gamma"]) == 0
    rep = json.loads((tmp_path / "verify_gamma.json").read_text())
    assert rep["suite"] == "gamma"
    assert rep["passes"] == rep["cases"] == 2
    assert "theorem" in rep


def test_verify_patterns_suite(tmp_path):
    cfg = write_cfg(tmp_path, out=str(tmp_path))
    assert main(["verify", "--config", cfg, "--suite", "patterns"]) == 0


def test_measure_command(tmp_path):
    cfg = write_cfg(tmp_path, out=str(tmp_path))
    assert main(["measure", "--config", cfg]) == 0
    masses = json.loads((tmp_path / "measure.json").read_text())
    assert abs(masses[0]["mass"] - 1.0) < 1e-6
    assert abs(masses[1]["mass"] - 0.5) < 1e-6


def test_ratio_command(tmp_path):
    cfg = write_cfg(tmp_path, out=str(tmp_path), n_list=[40, 80], points=[[1.0, 0.8]], k=1)
    assert main(["ratio", "--config", cfg]) == 0
    lines = (tmp_path / "ratio.csv").read_text().splitlines()
    assert lines[0] == "k,x_re,x_im,n,ratio_re,ratio_im,err"
    assert len(lines) == 3


def test_nikishin_command_requires_ordering(tmp_path):
    cfg = write_cfg(tmp_path, out=str(tmp_path), coefficients=[1.0, 2.0, 3.0], p=2)
    assert main(["nikishin", "--config", cfg]) == 2


def test_nikishin_command(tmp_path):
    cfg = write_cfg(
        tmp_path, out=str(tmp_path), coefficients=[3.0, 1.2, 2.0, 0.7], nikishin_n=36
    )
    assert main(["nikishin", "--config", cfg]) == 0
    rep = json.loads((tmp_path / "nikishin.json").read_text())
    assert all(entry["uniform_sign"] for entry in rep)


def test_console_entry_point(tmp_path):
    cfg = write_cfg(tmp_path, n=[], out=str(tmp_path))
    env = dict(os.environ, MOP_THREADS="1")
    proc = subprocess.run(
        [sys.executable, "-m", "mop.cli", "figure", "--config", cfg],
        capture_output=True,
        text=True,
        env=env,
    )
    assert proc.returncode == 0

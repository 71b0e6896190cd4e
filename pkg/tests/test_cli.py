import json
import math
import subprocess
import sys

import numpy as np
import pytest

from electroconv import pipeline as pl
from electroconv.cli import main

SMALL = {"grid": {"n": 32, "half_period": 4 * math.pi}, "integrator": {"t_end": 1.0}}


def test_run_and_fit(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(dict(SMALL, integrator={"t_end": 20.0}, init={"preset": "poisson_kernel"},
                                   model={"coupled": False})))
    assert main(["run", str(cfg), "--out", str(tmp_path / "out")]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "ok"
    csv = tmp_path / "out" / pl.SERIES_FILE
    assert main(["fit", str(csv), "--column", "l2q2", "--window", "1,20"]) == 0
    fit = json.loads(capsys.readouterr().out)
    assert fit["column"] == "l2q2" and fit["n_samples"] >= 20 and fit["slope"] < 0


def test_run_reports_config_errors(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"grid": {"n": 15}}))
    assert main(["run", str(cfg)]) == 2
    assert "grid.n" in capsys.readouterr().err


def test_fit_errors(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(SMALL))
    main(["run", str(cfg), "--out", str(tmp_path / "out")])
    csv = str(tmp_path / "out" / pl.SERIES_FILE)
    assert main(["fit", csv, "--column", "nope", "--window", "1,2"]) == 2
    assert main(["fit", csv, "--column", "l2q2", "--window", "0.5,1"]) == 1
    with pytest.raises(SystemExit):
        main(["fit", csv, "--column", "l2q2", "--window", "1"])


def test_check(capsys):
    code = main(["check", "cordoba", "--seed", "3", "--n", "64", "--half-period", str(8 * math.pi), "--trials", "3"])
    assert code == 0
    (rep,) = json.loads(capsys.readouterr().out)
    assert rep["name"] == "cordoba" and rep["seed"] == 3 and rep["n_trials"] == 3
    assert main(["check", "bogus"]) == 2


def test_unknown_scenario(tmp_path, capsys):
    assert main(["scenario", "S0", "--out", str(tmp_path)]) == 2
    assert "S1_sharp_decay" in capsys.readouterr().err


def test_accept_missing(tmp_path, capsys):
    assert main(["accept", str(tmp_path)]) == 2
    out = capsys.readouterr().out
    assert out.count("FAIL") == 10


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "electroconv", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for sub in ("run", "scenario", "fit", "check", "accept"):
        assert sub in proc.stdout

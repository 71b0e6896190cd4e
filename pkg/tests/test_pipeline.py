import math

import numpy as np
import pytest

from electroconv import files
from electroconv import pipeline as pl
from electroconv import spectral as sp
from electroconv.config import config_from_dict
from electroconv.semigroups import poisson_evolve

SMALL = {"grid": {"n": 64, "half_period": 8 * math.pi}, "integrator": {"t_end": 2.0}}


def test_sample_times():
    ts = pl.sample_times(10 * math.pi, 40)
    assert ts[0] == 0.0 and ts[-1] == 10 * math.pi
    assert all(b > a for a, b in zip(ts, ts[1:]))
    # at least 40 per decade of (1 + t)
    assert len(ts) - 1 >= 40 * math.log10(1 + 10 * math.pi)
    assert pl.sample_times(0.0, 40) == [0.0]


def test_scenarios_fully_specified():
    for name in pl.SCENARIOS:
        cfg = pl.scenario(name)
        assert cfg.output.dir == name
    s1 = pl.scenario("S1_sharp_decay")
    assert (s1.grid.n, s1.grid.half_period) == (512, pytest.approx(40 * math.pi))
    assert s1.t_end == pytest.approx(10 * math.pi)
    assert pl.scenario("S2_difference_decay").grid.companion_n == 256
    assert pl.scenario("S4_linear_oracle").model.coupled is False


def test_s1_initial_mean_is_one():
    state = pl.initial_state(pl.scenario("S1_sharp_decay"))
    assert state.q_hat[0, 0].real * state.grid.area == pytest.approx(1.0, rel=1e-12)


def test_unknown_scenario_lists_names():
    with pytest.raises(ValueError) as info:
        pl.scenario("S9")
    for name in pl.SCENARIOS:
        assert name in str(info.value)


def test_linear_run_matches_oracle(tmp_path):
    doc = dict(SMALL, init={"preset": "poisson_kernel"}, model={"coupled": False})
    cfg = config_from_dict(doc)
    summary = pl.run_experiment(cfg, tmp_path)
    assert summary["status"] == "ok"
    final = files.read_checkpoint(tmp_path / pl.CHECKPOINT_FILE)
    q0 = pl.initial_state(cfg).q_hat
    assert sp.norm(final.grid, final.q_hat - poisson_evolve(final.grid, q0, 2.0), "L2") <= 1e-10
    series = files.read_series(tmp_path / pl.SERIES_FILE)
    assert np.all(series["diffq2"] <= 1e-20)


def test_run_outputs_and_determinism(tmp_path):
    pl.clear_cache()
    cfg = config_from_dict(dict(SMALL, grid=dict(SMALL["grid"], companion_n=32)))
    summary = pl.run_experiment(cfg, tmp_path / "a")
    for name in (pl.SERIES_FILE, pl.COMPANION_FILE, pl.SUMMARY_FILE, pl.CONFIG_FILE, pl.CHECKPOINT_FILE):
        assert (tmp_path / "a" / name).is_file()
    assert summary["status"] == "ok"
    assert summary["mean_drift"] <= 1e-10
    assert summary["l2q_increase"] <= 1e-10 * summary["l2q_initial"]
    assert summary["energy_increase"] <= 1e-10 * summary["energy_initial"]
    pl.clear_cache()
    pl.run_experiment(cfg, tmp_path / "b")
    for name in (pl.SERIES_FILE, pl.COMPANION_FILE, pl.CHECKPOINT_FILE):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_convergence_study_second_order():
    cfg = config_from_dict(SMALL)
    out = pl.convergence_study(cfg, t_stop=2.0, dt=0.2)
    assert 3.0 <= out["error_ratio"] <= 5.0
    assert 3.0 <= out["residual_ratio"] <= 5.0


def test_property_suite_config(tmp_path):
    cfg = config_from_dict({
        "grid": {"n": 64, "half_period": 8 * math.pi},
        "init": {"preset": "property_suite", "params": {"trials": 3, "bump_trials": 2}},
    })
    summary = pl.run_experiment(cfg, tmp_path)
    assert summary["passed"]
    rep = files.read_json(tmp_path / pl.CHECKS_FILE)
    assert {r["name"] for r in rep["reports"]} >= {"cordoba", "weight_commutator", "parseval"}

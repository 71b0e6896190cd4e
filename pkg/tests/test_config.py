import json
import math

import pytest

from electroconv.config import ConfigError, config_from_dict, parse_config, serialize_config


def test_minimal_document_defaults():
    cfg = parse_config("{}")
    assert cfg.grid.n == 256
    assert cfg.grid.half_period == pytest.approx(40 * math.pi)
    assert cfg.splitting.r == 4.0
    assert cfg.integrator.cfl == 0.4
    assert cfg.t_end == pytest.approx(10 * math.pi)
    assert cfg.init.params["mass"] == 1.0


@pytest.mark.parametrize(
    "doc, key",
    [
        ({"grid": {"n": 15}}, "grid.n"),
        ({"grid": {"m": 3}}, "grid.m"),
        ({"grid": {"half_period": -1}}, "grid.half_period"),
        ({"init": {"preset": "vortex_sheet"}}, "init.preset"),
        ({"init": {"params": {"mass": "heavy"}}}, "init.params.mass"),
        ({"init": {"params": {"colour": 1}}}, "init.params.colour"),
        ({"integrator": {"cfl": 2.0}}, "integrator.cfl"),
        ({"sampling": {"per_decade": 5}}, "sampling.per_decade"),
        ({"probes": {"modes": [[0, 0]]}}, "probes.modes"),
        ({"probes": {"modes": [[500, 0]]}}, "probes.modes"),
        ({"seed": "x"}, "seed"),
    ],
)
def test_errors_name_the_key(doc, key):
    with pytest.raises(ConfigError) as info:
        config_from_dict(doc)
    assert info.value.key == key


def test_invalid_json_and_non_object():
    with pytest.raises(ConfigError):
        parse_config("{")
    with pytest.raises(ConfigError):
        parse_config("[1, 2]")


def test_round_trip_stable():
    text = json.dumps({
        "grid": {"n": 128, "half_period": 20.0, "companion_n": 64},
        "init": {"preset": "poisson_kernel", "params": {"height": 2}},
        "model": {"coupled": False},
        "probes": {"modes": [[1, 0], [0, 2]]},
        "seed": 7,
    })
    a = parse_config(text)
    b = parse_config(serialize_config(a))
    assert a == b
    assert serialize_config(b) == serialize_config(a)


def test_trajectory_key_ignores_output_and_companion():
    a = config_from_dict({"output": {"dir": "x"}, "grid": {"companion_n": 128}})
    b = config_from_dict({"output": {"dir": "y"}})
    assert a.trajectory_key() == b.trajectory_key()
    c = config_from_dict({"seed": 1})
    assert c.trajectory_key() != b.trajectory_key()

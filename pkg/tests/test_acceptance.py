"""Full-resolution acceptance suite.

Runs every scenario preset (n=512 flows, so this takes about ten minutes on one
core), grades the outputs and prints one PASS/FAIL line per criterion. Set
``ELECTROCONV_RUNS`` to a directory that already holds scenario outputs to
grade those instead of recomputing.
"""

import os
from pathlib import Path

import pytest

from electroconv import acceptance as acc
from electroconv import pipeline as pl

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def report(tmp_path_factory):
    given = os.environ.get("ELECTROCONV_RUNS")
    if given:
        root = Path(given)
    else:
        root = tmp_path_factory.mktemp("scenarios")
        for name in pl.SCENARIOS:
            pl.run_scenario(name, root)
    rep, code = acc.evaluate(root)
    acc.accept(root)
    return rep


@pytest.fixture(scope="module")
def by_name(report, pytestconfig):
    capture = pytestconfig.pluginmanager.getplugin("capturemanager")
    with capture.global_and_fixture_disabled():
        print()
        for entry in report["criteria"]:
            print(acc.format_line(entry))
    return {e["name"]: e for e in report["criteria"]}


CRITERIA = [
    "C1_operator_identities",
    "C2_linear_oracle",
    "C3_integrator_order",
    "C4_sharp_decay",
    "C5_derivative_decay",
    "C6_difference_decay",
    "C7_moment_growth",
    "C8_low_mode_probes",
    "C9_inequality_suite",
    "C10_conservation_monotonicity",
]


def test_no_missing_inputs_or_blowups(report):
    assert report["missing"] == []
    assert report["blowups"] == []


@pytest.mark.parametrize("name", CRITERIA)
def test_criterion(by_name, name):
    entry = by_name[name]
    assert entry["pass"], f"{name} failed on {entry['failures']}: measured {entry['measured']}"

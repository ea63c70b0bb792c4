import json
import os

import pytest

import coarsegeo

CONFIGS = os.path.join(os.path.dirname(__file__), "..", "..", "configs")


def test_free_group_arithmetic():
    f2 = coarsegeo.GroupModel.free_group(2)
    assert f2.num_generators == 2
    assert f2.normalize("a b B A a") == f2.normalize("a")
    assert f2.length(f2.multiply("a b", f2.inverse("a b"))) == 0
    assert f2.distance("a", "b") == 2


def test_free_product_classification():
    g = coarsegeo.GroupModel.free_product([2, 2])
    assert g.num_factors == 2
    c = g.classify("b1 a1 B1")
    assert c["parabolic"]
    assert g.normalize(f"{c['conjugator']} {c['core']} {g.inverse(c['conjugator'])}") == g.normalize("b1 a1 B1")
    assert not g.classify("a1 b1")["parabolic"]


def test_worked_constants():
    k = coarsegeo.compute_constants({"mu": 1, "epsilon": 1, "tau": 2, "nu": {"slope": 2, "intercept": 2}})
    assert (k["A"], k["C"], k["B"]) == (4, 6, 20)
    assert k["Lambda"] == 6 * k["R"] + 1


def test_run_experiment_round_trip():
    with open(os.path.join(CONFIGS, "constants_worked.json")) as f:
        cfg = json.load(f)
    r = coarsegeo.run_experiment(cfg, CONFIGS)
    assert r["schema_version"] == coarsegeo.REPORT_SCHEMA_VERSION
    assert all(c["ok"] for c in r["conditions"])


def test_bad_config_raises():
    with pytest.raises(coarsegeo.ConfigError):
        coarsegeo.run_experiment({"kind": "nonsense", "params": {}})

import json
import math
import os
from pathlib import Path

import jsonschema
import pytest

import advdiff

SCHEMA = Path(
    os.environ.get(
        "ADVDIFF_SCHEMA",
        Path(__file__).resolve().parents[2] / "schema" / "report.schema.json",
    )
)


@pytest.fixture(scope="module")
def schema():
    return json.loads(SCHEMA.read_text())


def test_exact_1d_boundary_values():
    eps = 0.01
    u0, u1 = advdiff.exact_1d(eps, [0.0, 1.0])
    assert u1 == 0.0
    # -eps u'(0) + u(0) = 1 with u'(0) = -exp(-1/eps) / eps.
    assert abs(u0 + math.exp(-1.0 / eps) - 1.0) < 1e-15


def test_exact_ej_inflow_and_walls():
    vals = advdiff.exact_ej(0.1, [0.0, 0.3, 1.0], [0.5, 0.0, 0.4])
    assert abs(vals[0] - 1.0) < 1e-12
    assert abs(vals[1]) < 1e-12
    assert abs(vals[2]) < 1e-12


def test_meshes():
    assert advdiff.uniform_mesh(5) == [0.0, 0.25, 0.5, 0.75, 1.0]
    m = advdiff.adaptive_mesh(100, 0.001)
    assert len(m) == 100
    assert m[:3] == [0.0, 0.5, 0.75]
    assert all(b > a for a, b in zip(m, m[1:]))


def test_normalize_fills_network_widths():
    c = advdiff.normalize_config({"method": "pinn", "dimension": 2, "eps": 0.1})
    assert c["widths"] == [2, 20, 20, 20, 20, 1]


def test_bad_config_raises():
    with pytest.raises(advdiff.ConfigError):
        advdiff.normalize_config({"method": "nope"})
    with pytest.raises(ValueError):
        advdiff.normalize_config({"method": "pinn", "unknown_key": 1})


def test_fem_report_validates(tmp_path, schema):
    report = advdiff.run(
        {"method": "galerkin", "eps": 0.001, "mesh": {"kind": "uniform", "n_points": 11}},
        tmp_path,
    )
    jsonschema.validate(report, schema)
    assert report["status"] == "ok"
    assert report["fem"]["oscillation"] is True
    assert (tmp_path / "report.json").exists()
    assert (tmp_path / "solution.csv").exists()


def test_short_training_report_validates(tmp_path, schema):
    config = {
        "method": "vpinn_weak",
        "eps": 0.1,
        "mesh": {"kind": "uniform", "n_points": 11},
        "epochs": 20,
        "log_every": 10,
        "widths": [1, 8, 8, 1],
    }
    a = advdiff.run(config, tmp_path / "a")
    b = advdiff.run(config, tmp_path / "b")
    jsonschema.validate(a, schema)
    assert a["training"]["epochs"] == 20
    assert a["training"]["final_loss"] == b["training"]["final_loss"]


def test_failed_run_report_validates(tmp_path, schema):
    report = advdiff.run(
        {"method": "pinn", "eps": 0.1, "mesh": {"kind": "uniform", "n_points": 11},
         "epochs": 50, "lr": 1e300},
        tmp_path,
    )
    jsonschema.validate(report, schema)
    assert report["status"] == "failed"
    assert report["exit_code"] == 3
    assert report["failure"]["type"] == "non_finite"

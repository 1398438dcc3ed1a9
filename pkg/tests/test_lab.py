import json
import math
from pathlib import Path

import numpy as np
import pytest

import config
from errors import ConfigError
from lab import SpectralLab


@pytest.fixture
def lab(client):
    return SpectralLab({"seed": 7}, client)


def test_invalid_config_is_refused(client):
    with pytest.raises(ConfigError):
        SpectralLab({"regoin": {}}, client)


def test_unknown_task_comes_back_as_a_config_error(lab):
    result = lab.process_task("trade")
    assert result["kind"] == "config"
    assert "region" in result["error"]


def test_region_task_writes_files_and_answers_queries(lab):
    result = lab.process_task("region", {"region": {"case": 3, "n": 3, "alpha": "0", "p": "6/5",
                                                    "query": "1/2,1/2"}})
    assert result["case"] == "case3"
    assert "D(p)" in result["landmarks"]
    assert not result["query"]["inside"]
    assert result["query"]["violated"]
    body = json.loads(Path(result["files"]["json"]).read_text())
    assert body["query"]["inside"] is False
    assert Path(result["files"]["csv"]).exists()


def test_region_task_named_cases(lab):
    result = lab.process_task("region", {"region": {"case": "sobolev", "n": 3}})
    assert result["case"] == "sobolev_line"
    bad = lab.process_task("region", {"region": {"case": "hexagon"}})
    assert bad["kind"] == "config"


def test_region_case_mismatch_is_a_domain_error(lab):
    result = lab.process_task("region", {"region": {"case": 1, "n": 3, "alpha": "0", "p": "6/5"}})
    assert result["kind"] == "domain"


def test_weyl_task(lab):
    result = lab.process_task("weyl", {"weyl": {"alpha_list": [0.25], "nu_list": [1.0]}})
    (jump,) = result["jump_identity"]
    assert jump["convention"] == "e^{+i pi a}(x+i0)^-a - e^{-i pi a}(x-i0)^-a"
    assert result["reproduction"][0]["error"] < 1e-2
    assert len(result["convolution"]) == 3
    assert Path(result["files"]["json"]).exists()


def test_perturb_task_defaults(lab):
    result = lab.process_task("perturb")
    assert result["potential"] == "ball(0.2,1)"
    assert result["neumann"]["error"] < 1e-8
    assert result["stone"]["relative_error"] < 1e-8
    assert result["resolvent_identity"] < 1e-10


def test_perturb_gate_refusal_is_reported(lab):
    result = lab.process_task("perturb", {"potential": "ball:50,1.0"})
    assert "refused" in result["neumann"]
    assert "stone" in result


def _sweep(client, run_config):
    return SpectralLab({"seed": 7, **run_config}, client).process_task("sweep")


def test_threads_stay_local_to_the_lab(client):
    before = config.THREADS
    lab = SpectralLab({"threads": 1}, client)
    assert lab.threads == 1
    assert config.THREADS == before
    assert not hasattr(lab, "process_task_json")


def test_tolerances_block_decides_the_verdict(client):
    base = {"symbol": {"n": 1, "m": 2}, "sweep": {"kind": "resolvent-power", "p": 1, "q": 2}}
    loose = _sweep(client, base)
    assert loose["verdict"] == "PASS"
    strict = _sweep(client, {**base, "tolerances": {"slope": 1e-9}})
    assert strict["verdict"] == "FAIL"
    assert strict["report"]["tolerance"] == 1e-9
    assert strict["report"]["slope"] == pytest.approx(loose["report"]["slope"])


def test_resolvent_power_sweep(client):
    result = _sweep(client, {"symbol": {"n": 1, "m": 2}, "sweep": {"kind": "resolvent-power", "p": 1, "q": 2}})
    assert result["report"]["predicted"] == pytest.approx(-0.25)
    assert abs(result["report"]["slope"] + 0.25) <= 0.15
    assert Path(result["files"]["csv"]).exists()


@pytest.mark.slow
def test_sobolev_sweep(client):
    result = _sweep(client, {
        "symbol": {"n": 3, "m": 2},
        "grid": {"n": 3, "N": 16, "L": 2 * math.pi},
        "sweep": {"kind": "sobolev", "p": "6/5", "q": 6, "points": 3, "arguments": [math.pi / 2, math.pi]},
    })
    assert result["report"]["predicted"] == 0
    assert result["report"]["on_sobolev_line"]
    assert result["verdict"] in ("PASS", "FAIL")
    assert Path(result["files"]["json"]).exists()


@pytest.mark.slow
def test_free_restriction_sweep_with_default_windows(client):
    result = _sweep(client, {"symbol": {"n": 2, "m": 2}, "sweep": {"kind": "restriction", "p": 1}})
    assert "error" not in result
    assert abs(result["report"]["slope"]) <= 0.15
    assert result["verdict"] == "PASS"
    assert min(result["report"]["occupancy"]) >= 30


@pytest.mark.slow
def test_restriction_stability_under_a_small_ball(client):
    result = _sweep(client, {
        "symbol": {"n": 3, "m": 2},
        "potential": "ball:0.05,1.0",
        "threads": 2,
        "sweep": {"kind": "restriction", "p": 1},
    })
    assert "error" not in result
    assert result["report"]["slope_shift"] < 0.1
    assert result["verdict"] == "PASS"
    assert Path(result["files"]["json"]).exists()


@pytest.mark.slow
def test_bochner_riesz_sweep(client):
    result = _sweep(client, {
        "symbol": {"n": 2, "m": 2},
        "grid": {"n": 2, "N": 64, "L": 4 * math.pi},
        "sweep": {"kind": "bochner-riesz", "alpha": 0.5, "p": 1, "q": "inf",
                  "lambda_list": list(np.geomspace(14.4, 144.0, 6))},
    })
    assert result["report"]["predicted"] == pytest.approx(0.5)
    assert abs(result["report"]["slope"] - 0.5) <= 0.15


@pytest.mark.slow
def test_gaussian_sweep(client):
    result = _sweep(client, {"symbol": {"n": 1, "m": 2}, "sweep": {"kind": "gaussian"}})
    assert result["report"]["predicted"] == pytest.approx(-0.5)
    assert abs(result["report"]["slope"] + 0.5) <= 0.15


@pytest.mark.slow
def test_davies_gaffney_rate_for_the_laplacian(client):
    result = _sweep(client, {"symbol": {"n": 1, "m": 2}, "sweep": {"kind": "davies-gaffney"}})
    assert "error" not in result
    assert 0.125 <= result["report"]["c"] <= 0.5
    assert result["verdict"] == "PASS"


@pytest.mark.slow
def test_davies_gaffney_fit_for_a_fourth_order_symbol(client):
    result = _sweep(client, {"symbol": {"n": 1, "m": 4}, "sweep": {"kind": "davies-gaffney"}})
    assert result["report"]["c"] > 0
    assert result["report"]["r2"] > 0.9


@pytest.mark.slow
def test_davies_gaffney_with_a_potential(client):
    result = _sweep(client, {"symbol": {"n": 1, "m": 2}, "potential": "ball:0.05,1.0",
                             "sweep": {"kind": "davies-gaffney"}})
    assert result["verdict"] == "PASS"
    assert json.loads(Path(result["files"]["json"]).read_text())["potential"] == "ball(0.05,1)"


@pytest.mark.slow
def test_multiplier_sweep_ratio_stays_bounded(client):
    result = _sweep(client, {"symbol": {"n": 1, "m": 2}, "sweep": {"kind": "multiplier"}})
    assert "error" not in result
    assert result["report"]["ratio_bounded"]


@pytest.mark.slow
def test_perturbed_resolvent_sweep(client):
    result = _sweep(client, {"symbol": {"n": 1, "m": 2}, "potential": "ball:0.05,1.0",
                             "sweep": {"kind": "perturbed-resolvent", "p": 1}})
    assert result["report"]["predicted"] == pytest.approx(-0.5)
    assert not result["report"]["on_sobolev_line"]
    assert abs(result["report"]["slope"] + 0.5) <= 0.15


def test_sparse_windows_come_back_as_numerical_errors(client):
    result = _sweep(client, {"symbol": {"n": 2, "m": 2}, "grid": {"n": 2, "N": 8, "L": 2 * math.pi},
                             "sweep": {"kind": "restriction", "p": 1}})
    assert result["kind"] == "sparse_window"

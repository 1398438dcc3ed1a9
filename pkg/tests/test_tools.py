import json
import math
from fractions import Fraction

import pytest

from errors import ConfigError
from tools import (
    LAB_TASKS,
    TASK_NAMES,
    apply_overrides,
    load_run_config,
    parse_complex,
    parse_exponent,
    parse_point,
    parse_rational,
    task_schema,
    validate_run_config,
)


def test_parse_rational():
    assert parse_rational("6/5") == Fraction(6, 5)
    assert parse_rational(" -1/4 ") == Fraction(-1, 4)
    assert parse_rational(3) == 3
    for bad in ("6/0", "abc", 0.5, True):
        with pytest.raises(ConfigError):
            parse_rational(bad)


def test_parse_exponent_and_complex():
    assert parse_exponent("inf") == math.inf
    assert parse_exponent("6/5") == pytest.approx(1.2)
    assert parse_exponent(6) == 6.0
    with pytest.raises(ConfigError):
        parse_exponent("1/2")
    assert parse_complex("1 + 0.5j") == 1 + 0.5j
    assert parse_complex([-1, 2]) == -1 + 2j
    assert parse_complex(-1) == -1
    with pytest.raises(ConfigError):
        parse_complex("one")
    with pytest.raises(ConfigError):
        parse_complex([1, 2, 3])


def test_parse_point():
    assert parse_point("1/2,1/3") == (Fraction(1, 2), Fraction(1, 3))
    with pytest.raises(ConfigError):
        parse_point("1/2")


def test_schema_rejects_unknown_and_malformed_keys():
    validate_run_config({"region": {"case": 3, "n": 3, "alpha": "0", "p": "6/5"}})
    with pytest.raises(ConfigError):
        validate_run_config({"regoin": {}})
    with pytest.raises(ConfigError):
        validate_run_config({"grid": {"n": 2, "N": 16}})
    with pytest.raises(ConfigError):
        validate_run_config({"sweep": {"kind": "heat"}})
    with pytest.raises(ConfigError):
        validate_run_config({"threads": 0})


def test_load_run_config(tmp_path):
    assert load_run_config(None) == {}
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"seed": 11, "verify": {"filter": ["region"]}}))
    assert load_run_config(path)["seed"] == 11
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_run_config(path)
    with pytest.raises(ConfigError):
        load_run_config(tmp_path / "missing.json")


def test_overrides_merge_blocks_and_skip_unset_flags():
    base = {"seed": 1, "region": {"case": 3, "n": 3, "p": "6/5"}}
    merged = apply_overrides(base, {"seed": None, "region": {"p": "5/4", "n": None}, "output_dir": "out"})
    assert merged == {"seed": 1, "region": {"case": 3, "n": 3, "p": "5/4"}, "output_dir": "out"}
    assert base["region"]["p"] == "6/5"
    with pytest.raises(ConfigError):
        apply_overrides(base, {"region": {"n": 1}})


def test_task_registry():
    assert TASK_NAMES == ["region", "verify", "sweep", "perturb", "weyl"]
    assert all(entry["type"] == "task" for entry in LAB_TASKS)
    assert task_schema("sweep")["name"] == "sweep"
    with pytest.raises(ConfigError):
        task_schema("trade")

#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for configuration loading and validation."""

import json

import numpy as np
import pytest

from waveguide_metamaterial.config import (
    array_config, array_qubit, ats_qubit, background_model,
    coherence_qubits, config_hash, drive_kappa, grid, grid_problems,
    load_config, parse_override, sweep_spec, validate_config)
from waveguide_metamaterial.errors import ConfigError, ParameterError
from waveguide_metamaterial.qubit import (calibrate_kappa,
                                          extinction_coefficient)
from waveguide_metamaterial.units import dbm_to_power, ghz, mhz


@pytest.fixture
def preset():
    return load_config()


def test_preset_loads_and_validates(preset):
    assert preset["array"]["n_qubits"] == 8
    assert validate_config(preset) is preset


def test_overrides_are_parsed_as_json():
    config = load_config(overrides=["array.n_qubits=4",
                                    "model.phase_mode=markov",
                                    "drive.kappa=null",
                                    "scenarios.fano.detuning_over_gamma=[0.5]",
                                    ])
    assert config["array"]["n_qubits"] == 4
    assert config["model"]["phase_mode"] == "markov"
    assert config["drive"]["kappa"] is None
    assert config["scenarios"]["fano"]["detuning_over_gamma"] == [0.5]


@pytest.mark.parametrize("text", [
    "array.n_qubits", "=3", "array.n_qubits.x=1"])
def test_bad_overrides(text):
    with pytest.raises(ConfigError):
        load_config(overrides=[text])


def test_parse_override():
    assert parse_override("a.b = 0.5") == (["a", "b"], 0.5)
    assert parse_override("a=not json") == (["a"], "not json")


def test_user_file_is_merged_over_the_preset(tmp_path):
    path = tmp_path / "user.json"
    path.write_text(json.dumps({"array": {"spacing_um": 200.0}}))
    config = load_config(str(path))
    assert config["array"]["spacing_um"] == 200.0
    assert config["array"]["n_qubits"] == 8


@pytest.mark.parametrize("content", ["{not json", "[1, 2]"])
def test_unreadable_user_files(tmp_path, content):
    path = tmp_path / "user.json"
    path.write_text(content)
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_missing_user_file(tmp_path):
    with pytest.raises(ConfigError) as info:
        load_config(str(tmp_path / "absent.json"))
    assert "cannot read" in str(info.value)


def test_every_problem_is_reported():
    config = load_config(overrides=["array.gamma_rad_MHz=-1",
                                    "model.phase_mode=bogus",
                                    "scenarios.saturation.points=1"])
    with pytest.raises(ConfigError) as info:
        validate_config(config)
    problems = "\n".join(info.value.problems)
    assert "array.gamma_rad_MHz" in problems
    assert "model.phase_mode" in problems
    assert "scenarios.saturation.points" in problems
    assert len(info.value.problems) >= 3


def test_inter_qubit_phase_must_stay_below_pi():
    config = load_config(overrides=["array.spacing_um=1e5"])
    with pytest.raises(ConfigError) as info:
        validate_config(config, "resonant_stack")
    assert "inter-qubit phase" in str(info.value)


def test_unknown_scenario(preset):
    with pytest.raises(ConfigError) as info:
        validate_config(preset, "nope")
    assert "unknown scenario" in str(info.value)


def test_missing_scenario_section():
    config = load_config()
    del config["scenarios"]["crosstalk"]
    with pytest.raises(ConfigError):
        validate_config(config, "crosstalk")
    validate_config(config, "fano")


def test_config_hash_is_canonical(preset):
    reordered = json.loads(json.dumps(preset, sort_keys=True))
    assert config_hash(reordered) == config_hash(preset)
    changed = load_config(overrides=["scenarios.crosstalk.tuned=2"])
    assert config_hash(changed) != config_hash(preset)
    assert len(config_hash(preset)) == 64


def test_grids():
    np.testing.assert_allclose(grid({"start": 0, "stop": 1, "points": 3}),
                               [0.0, 0.5, 1.0])
    np.testing.assert_allclose(grid([1, 2]), [1.0, 2.0])
    assert grid_problems("g", [1, 2, 3]) == []
    assert grid_problems("g", {"start": 0, "stop": 1, "points": 3}) == []
    assert grid_problems("g", [2, 1])
    assert grid_problems("g", [])
    assert grid_problems("g", {"start": 0, "stop": 1})
    assert grid_problems("g", {"start": 1, "stop": 0, "points": 3})
    assert grid_problems("g", {"start": 0, "stop": 1, "points": 1})
    assert grid_problems("g", {"start": 0, "stop": 1, "points": True})


def test_sweep_spec(preset):
    spec = sweep_spec(preset, "fano", seed=3)
    assert spec.hash == config_hash(preset)
    assert spec.section["phi"] == 0.15
    assert spec.phase_mode == "dispersive"
    assert spec.kappa == pytest.approx(drive_kappa(preset))
    preset["scenarios"]["fano"]["phi"] = 0.3
    assert spec.section["phi"] == 0.15
    with pytest.raises(ParameterError):
        sweep_spec(preset, "fano", seed=-1)


def test_model_objects(preset):
    cfg = array_config(preset)
    assert cfg.n == 8
    assert cfg.phi == pytest.approx(ghz(7.898) * 400e-6 / 1.2e8)
    assert array_config(preset, n=3).n == 3
    bg = background_model(preset)
    assert bg.l1 == 0.0 and bg.z0 == 50.0


def test_ats_qubit(preset):
    q = ats_qubit(preset)
    assert q.gamma10 == pytest.approx(mhz(3.4))
    assert q.omega21 == pytest.approx(ghz(7.623))
    assert q.gamma20 == pytest.approx(mhz(11.1))


def test_extinction_from_the_coherence_table(preset):
    quoted = preset["coherence_table"]["extinction_percent"]
    computed = [100 * extinction_coefficient(q)
                for q in coherence_qubits(preset)]
    for index, (c, q) in enumerate(zip(computed, quoted)):
        if index == 3:
            assert c == pytest.approx(98.84, abs=0.05)
        else:
            assert c == pytest.approx(q, abs=0.1)


def test_kappa_from_the_p50_power(preset):
    assert preset["drive"]["kappa"] is None
    assert drive_kappa(preset) == pytest.approx(
        calibrate_kappa(array_qubit(preset), dbm_to_power(-125.0)))
    explicit = load_config(overrides=["drive.kappa=1e27"])
    assert drive_kappa(explicit) == 1e27
    neither = load_config(overrides=["drive.p50_dBm=null"])
    assert drive_kappa(neither) is None
    assert sweep_spec(neither, "saturation").kappa is None


@pytest.mark.parametrize("override, key", [
    ("array.n_qubits=8.7", "array.n_qubits"),
    ("drive.p50_dBm=\"loud\"", "drive.p50_dBm"),
    ("drive.kappa=-1", "drive.kappa"),
])
def test_drive_and_size_problems(override, key):
    with pytest.raises(ConfigError) as info:
        validate_config(load_config(overrides=[override]))
    assert key in "\n".join(info.value.problems)


def test_integral_float_qubit_count_is_accepted():
    config = validate_config(load_config(overrides=["array.n_qubits=4.0"]))
    assert array_config(config).n == 4

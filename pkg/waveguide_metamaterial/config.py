# -*- coding: utf-8 -*-

"""Configuration loading, validation and conversion to model objects.

A configuration is one JSON document. The shipped preset
`data/device_parameters.json` is always loaded first; a user file is
deep-merged over it and `--set key=value` overrides are applied last.
Frequencies in the file are linear (GHz / MHz) and are converted to
rad/s here.
"""

import copy
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ParameterError
from .hamiltonian import ArrayConfig
from .qubit import QubitParams, calibrate_kappa
from .transfer import PHASE_MODES, RESPONSE_MODELS, BackgroundModel
from .units import dbm_to_power, ghz, mhz

logger = logging.getLogger(__name__)

PRESET_NAME = "device_parameters.json"

ARRAY_POSITIVE = ("n_qubits", "omega_ref_GHz", "spacing_um",
                  "phase_velocity_m_s", "gamma_rad_MHz")
ARRAY_NONNEGATIVE = ("gamma_nr_MHz", "gamma20_MHz")
BACKGROUND_NONNEGATIVE = ("L1_nH", "L2_nH", "lead1_mm", "lead2_mm")
COHERENCE_COLUMNS = ("T1_ns", "T2_ns", "Tphi_ns", "extinction_percent",
                     "chi_MHz", "f_max_GHz", "f_min_GHz")


def preset_path():
    from . import getPackageDataPath
    return os.path.join(getPackageDataPath(), PRESET_NAME)


def _read_json(path):
    try:
        with open(path) as handle:
            return json.load(handle)
    except OSError as exc:
        raise ConfigError("cannot read {}: {}".format(path, exc.strerror))
    except json.JSONDecodeError as exc:
        raise ConfigError("{} is not valid JSON: {}".format(path, exc))


def deep_merge(base, update):
    """Return a copy of `base` with `update` merged in; nested dicts are
    merged key by key, anything else is replaced."""
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def parse_override(text):
    """Split "a.b.c=value" into (["a", "b", "c"], value).

    The value is parsed as JSON when possible ("0.1", "[1, 2]", "null")
    and kept as a string otherwise.
    """
    key, sep, raw = text.partition("=")
    if not sep or not key.strip():
        raise ConfigError("override {!r} is not of the form "
                          "key=value".format(text))
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip().split("."), value


def apply_override(config, keys, value):
    node = config
    for depth, key in enumerate(keys[:-1]):
        child = node.setdefault(key, {})
        if not isinstance(child, dict):
            raise ConfigError("cannot set {}: {} is not a section".format(
                ".".join(keys), ".".join(keys[:depth + 1])))
        node = child
    node[keys[-1]] = value


def load_config(path=None, overrides=()):
    """Preset, merged with the file at `path`, with `overrides` applied.

    Parameters
    ----------
    path: str, optional
        User configuration; only the keys it sets replace the preset.
    overrides: iterable of str
        "dotted.key=value" strings, applied in order.
    """
    config = _read_json(preset_path())
    if path is not None:
        user = _read_json(path)
        if not isinstance(user, dict):
            raise ConfigError("{}: top level must be an object".format(path))
        config = deep_merge(config, user)
    for text in overrides:
        keys, value = parse_override(text)
        apply_override(config, keys, value)
        logger.debug("override %s = %r", ".".join(keys), value)
    return config


def config_hash(config):
    """SHA-256 of the canonical JSON form of `config`."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"),
                           allow_nan=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool) \
        and np.isfinite(value)


def grid(value):
    """Grid from an explicit list or from {"start", "stop", "points"}."""
    if isinstance(value, dict):
        return np.linspace(float(value["start"]), float(value["stop"]),
                           int(value["points"]))
    return np.asarray(value, dtype=float)


def grid_problems(name, value):
    """Everything wrong with a grid specification, as strings."""
    if isinstance(value, dict):
        missing = [k for k in ("start", "stop", "points") if k not in value]
        if missing:
            return ["{}: missing {}".format(name, ", ".join(missing))]
        if not all(_is_number(value[k]) for k in ("start", "stop")):
            return ["{}: start and stop must be numbers".format(name)]
        points = value["points"]
        if not isinstance(points, int) or isinstance(points, bool) \
                or points < 2:
            return ["{}: points must be an integer >= 2".format(name)]
        if not value["stop"] > value["start"]:
            return ["{}: stop must be greater than start".format(name)]
        return []
    if not isinstance(value, list) or len(value) == 0:
        return ["{}: must be a non-empty list or a start/stop/points "
                "object".format(name)]
    if not all(_is_number(v) for v in value):
        return ["{}: entries must be finite numbers".format(name)]
    if np.any(np.diff(value) <= 0):
        return ["{}: values must be strictly increasing".format(name)]
    return []


def _section(config, name, problems):
    section = config.get(name)
    if not isinstance(section, dict):
        problems.append("missing section {!r}".format(name))
        return {}
    return section


def _check_keys(section, prefix, keys, problems, positive):
    for key in keys:
        value = section.get(key)
        if not _is_number(value):
            problems.append("{}.{}: expected a number, got {!r}".format(
                prefix, key, value))
        elif positive and not value > 0:
            problems.append("{}.{}: must be > 0".format(prefix, key))
        elif not positive and value < 0:
            problems.append("{}.{}: must be >= 0".format(prefix, key))


def _model_problems(config):
    problems = []
    array = _section(config, "array", problems)
    _check_keys(array, "array", ARRAY_POSITIVE, problems, positive=True)
    _check_keys(array, "array", ARRAY_NONNEGATIVE, problems, positive=False)
    n_qubits = array.get("n_qubits")
    if _is_number(n_qubits) and not float(n_qubits).is_integer():
        problems.append("array.n_qubits: must be an integer, got {!r}".format(
            n_qubits))
    if not _is_number(array.get("anharmonicity_MHz")):
        problems.append("array.anharmonicity_MHz: expected a number")
    if not problems:
        phi = ghz(array["omega_ref_GHz"]) * array["spacing_um"] * 1e-6 \
            / array["phase_velocity_m_s"]
        if not 0 < phi < np.pi:
            problems.append("array: inter-qubit phase {:.4g} outside "
                            "(0, pi)".format(phi))

    background = _section(config, "background", problems)
    _check_keys(background, "background", BACKGROUND_NONNEGATIVE, problems,
                positive=False)
    _check_keys(background, "background", ("Z0_ohm",), problems,
                positive=True)

    table = _section(config, "coherence_table", problems)
    lengths = {len(table.get(c) or ()) for c in COHERENCE_COLUMNS}
    if len(lengths) != 1 or 0 in lengths:
        problems.append("coherence_table: every column must be a "
                        "non-empty list of the same length")

    drive = _section(config, "drive", problems)
    kappa = drive.get("kappa")
    if kappa is not None and not (_is_number(kappa) and kappa > 0):
        problems.append("drive.kappa: must be null or a number > 0")
    p50_dbm = drive.get("p50_dBm")
    if p50_dbm is not None and not _is_number(p50_dbm):
        problems.append("drive.p50_dBm: must be null or a number")

    model = _section(config, "model", problems)
    if model.get("phase_mode") not in PHASE_MODES:
        problems.append("model.phase_mode: expected one of {}".format(
            ", ".join(PHASE_MODES)))
    if model.get("response_model") not in RESPONSE_MODELS:
        problems.append("model.response_model: expected one of {}".format(
            ", ".join(RESPONSE_MODELS)))

    ats = _section(config, "ats", problems)
    _check_keys(ats, "ats", ("gamma10_MHz", "omega21_GHz"), problems,
                positive=True)
    _check_keys(ats, "ats", ("gamma20_MHz",), problems, positive=False)
    if not problems and mhz(ats["gamma10_MHz"]) < 0.5 * mhz(
            array["gamma_rad_MHz"]):
        problems.append("ats.gamma10_MHz: must be at least "
                        "array.gamma_rad_MHz / 2")
    if not problems:
        try:
            drive_kappa(config)
        except ParameterError as exc:
            problems.append("drive.p50_dBm: {}".format(exc))
    return problems


def validate_config(config, scenario=None):
    """Collect every problem of `config` and raise one ConfigError.

    Only the section of `scenario` is checked when it is given, every
    registered scenario otherwise. Returns `config` unchanged.
    """
    from .scenarios import registered, scenario_class

    if not isinstance(config, dict):
        raise ConfigError("configuration must be a JSON object")
    problems = _model_problems(config)
    names = registered() if scenario is None else [scenario]
    sections = config.get("scenarios")
    if not isinstance(sections, dict):
        problems.append("missing section 'scenarios'")
        sections = {}
    for name in names:
        if name not in registered():
            problems.append("unknown scenario {!r}; known: {}".format(
                name, ", ".join(registered())))
            continue
        section = sections.get(name)
        if not isinstance(section, dict):
            problems.append("missing section 'scenarios.{}'".format(name))
            continue
        problems.extend(scenario_class(name).check(section, config))
    if problems:
        raise ConfigError(problems)
    return config


def array_qubit(config, **changes):
    """The uniform qubit of the `array` section."""
    array = config["array"]
    values = dict(
        omega10=ghz(array["omega_ref_GHz"]),
        gamma_rad=mhz(array["gamma_rad_MHz"]),
        gamma_nr=mhz(array["gamma_nr_MHz"]),
        chi=mhz(array["anharmonicity_MHz"]),
        gamma20=mhz(array["gamma20_MHz"]),
    )
    values.update(changes)
    return QubitParams(**values)


def array_config(config, n=None, qubit=None):
    """ArrayConfig of `n` identical qubits with the preset geometry."""
    array = config["array"]
    if n is None:
        n = int(array["n_qubits"])
    if qubit is None:
        qubit = array_qubit(config)
    return ArrayConfig.uniform(n, qubit,
                               spacing=array["spacing_um"] * 1e-6,
                               phase_velocity=array["phase_velocity_m_s"],
                               omega_ref=ghz(array["omega_ref_GHz"]))


def background_model(config):
    bg = config["background"]
    return BackgroundModel(l1=bg["L1_nH"] * 1e-9, l2=bg["L2_nH"] * 1e-9,
                           z0=bg["Z0_ohm"], lead1=bg["lead1_mm"] * 1e-3,
                           lead2=bg["lead2_mm"] * 1e-3)


def drive_kappa(config):
    """Drive calibration constant kappa (Omega_p^2 = kappa P).

    An explicit `drive.kappa` wins. Otherwise kappa is calibrated so a
    lone array qubit transmits 50 % at `drive.p50_dBm`. None when
    neither is set.
    """
    drive = config["drive"]
    if drive.get("kappa") is not None:
        return float(drive["kappa"])
    p50_dbm = drive.get("p50_dBm")
    if p50_dbm is None:
        return None
    return calibrate_kappa(array_qubit(config), float(dbm_to_power(p50_dbm)))


def ats_qubit(config):
    """Array qubit with the decoherence and 1-2 frequency used for the
    Autler-Townes runs."""
    ats = config["ats"]
    gamma_rad = mhz(config["array"]["gamma_rad_MHz"])
    omega10 = ghz(config["array"]["omega_ref_GHz"])
    return array_qubit(config,
                       gamma_nr=mhz(ats["gamma10_MHz"]) - 0.5 * gamma_rad,
                       gamma20=mhz(ats["gamma20_MHz"]),
                       chi=ghz(ats["omega21_GHz"]) - omega10)


def coherence_qubits(config):
    """One QubitParams per row of the coherence table, at the array's
    reference frequency."""
    table = config["coherence_table"]
    omega_ref = ghz(config["array"]["omega_ref_GHz"])
    qubits = []
    for t1, t2, chi in zip(table["T1_ns"], table["T2_ns"],
                           table["chi_MHz"]):
        qubits.append(QubitParams.from_coherence_times(
            omega_ref, t1 * 1e-9, t2 * 1e-9, chi=-mhz(chi)))
    return qubits


@dataclass(frozen=True, eq=False)
class SweepSpec:
    """Everything a scenario run depends on.

    `config` is the fully resolved configuration; two specs with the same
    config and seed produce identical results.
    """
    scenario: str
    config: dict
    seed: int = 0
    hash: str = field(init=False)

    def __post_init__(self):
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ParameterError("seed must be a non-negative integer")
        object.__setattr__(self, "hash", config_hash(self.config))

    @property
    def section(self):
        return self.config["scenarios"][self.scenario]

    @property
    def phase_mode(self):
        return self.config["model"]["phase_mode"]

    @property
    def response_model(self):
        return self.config["model"]["response_model"]

    @property
    def kappa(self):
        return drive_kappa(self.config)


def sweep_spec(config, scenario, seed=0):
    """Validate `config` for `scenario` and freeze it into a SweepSpec."""
    validate_config(config, scenario)
    return SweepSpec(scenario=scenario, config=copy.deepcopy(config),
                     seed=seed)

# -*- coding: utf-8 -*-

"""Registry of the named experiments the command line can run.

Entry points are "module:Class" strings and are imported only when a
scenario is first used.
"""

import importlib

from ..errors import ConfigError

_registry = {}


def register(id, entry_point, description=""):
    if id in _registry:
        raise ValueError("scenario {!r} is already registered".format(id))
    _registry[id] = {"entry_point": entry_point,
                     "description": description,
                     "class": None}


def registered():
    return sorted(_registry)


def describe(id):
    return _registry[id]["description"]


def scenario_class(id):
    try:
        entry = _registry[id]
    except KeyError:
        raise ConfigError("unknown scenario {!r}; known: {}".format(
            id, ", ".join(registered())))
    if entry["class"] is None:
        module_name, _, class_name = entry["entry_point"].partition(":")
        module = importlib.import_module(module_name)
        entry["class"] = getattr(module, class_name)
    return entry["class"]


def make(id, *args, **kwargs):
    return scenario_class(id)(*args, **kwargs)


register(
    id="resonant_stack",
    entry_point="waveguide_metamaterial.scenarios.experiments:ResonantStack",
    description="|S21| for N = 1..8 resonant qubits, eigenfrequencies "
                "and bandgap width",
)

register(
    id="detuned_qubit",
    entry_point="waveguide_metamaterial.scenarios.experiments:DetunedQubit",
    description="|S22|(omega, delta) with the last qubit swept through "
                "the collective resonance",
)

register(
    id="saturation",
    entry_point="waveguide_metamaterial.scenarios.experiments:Saturation",
    description="transmission versus drive strength and P50 versus N",
)

register(
    id="ats",
    entry_point="waveguide_metamaterial.scenarios.experiments:AutlerTownes",
    description="|S21|(omega, Omega_c) of the three-level array",
)

register(
    id="fano",
    entry_point="waveguide_metamaterial.scenarios.experiments:Fano",
    description="three emitters with one detuned: exact, two-mode and "
                "reduced reflection",
)

register(
    id="linewidth_scaling",
    entry_point="waveguide_metamaterial.scenarios.experiments:"
                "LinewidthScaling",
    description="brightest subradiant decay rate versus N",
)

register(
    id="crosstalk",
    entry_point="waveguide_metamaterial.scenarios.experiments:Crosstalk",
    description="flux-crosstalk calibration round trip and compensation",
)

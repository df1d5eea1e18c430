# -*- coding: utf-8 -*-

"""Scenario execution."""

import logging
from dataclasses import dataclass, field

import numpy as np
from tqdm.auto import tqdm

from . import __version__
from .config import load_config, sweep_spec
from .scenarios import make

logger = logging.getLogger(__name__)

BANNER = "######################################################"


@dataclass
class RunResult:
    """Tables of one scenario run plus everything needed to reproduce
    it. `figures` is filled in by `emit_outputs`."""
    scenario: str
    tables: dict
    provenance: dict
    metadata: dict = field(default_factory=dict)
    figures: list = field(default_factory=list)


class ScenarioRunner:
    """
    Runs one scenario and tracks where it is.

    Parameters
    ----------
    spec: SweepSpec
        Validated scenario, configuration and seed.
    progress: bool
        Show progress bars and phase banners.

    State transitions:
        PENDING -> SETUP_IN_PROGRESS -> RUN_IN_PROGRESS -> RUN_COMPLETE
        any state -> ERROR
    """
    def __init__(self, spec, progress=True):
        self.spec = spec
        self.progress = progress
        self.setup_run_state()

    def setup_run_state(self):
        self.run_state = {
            "state": "PENDING",
            "scenario": self.spec.scenario,
            "config_hash": self.spec.hash,
            "seed": self.spec.seed,
            "num_tables": 0,
        }

    def banner(self, message):
        if not self.progress:
            return
        tqdm.write(BANNER)
        tqdm.write("# " + message)
        tqdm.write(BANNER)

    def run(self):
        try:
            return self._run()
        except Exception:
            self.run_state["state"] = "ERROR"
            logger.exception("scenario %s failed", self.spec.scenario)
            raise

    def _run(self):
        rng = np.random.default_rng(self.spec.seed)
        scenario = make(self.spec.scenario, self.spec, rng,
                        progress=self.progress)

        self.run_state["state"] = "SETUP_IN_PROGRESS"
        scenario.setup()

        self.banner("Scenario {} Initiated".format(self.spec.scenario))
        self.run_state["state"] = "RUN_IN_PROGRESS"
        tables = scenario.run()

        names = [table.name for table in tables]
        if len(set(names)) != len(names):
            raise ValueError("scenario {} produced duplicate table names"
                             .format(self.spec.scenario))
        self.run_state["num_tables"] = len(tables)
        self.run_state["state"] = "RUN_COMPLETE"
        self.banner("Scenario {} Complete ({} tables)".format(
            self.spec.scenario, len(tables)))

        metadata = {"phase_mode": self.spec.phase_mode,
                    "response_model": self.spec.response_model}
        metadata.update(scenario.metadata)
        return RunResult(
            scenario=self.spec.scenario,
            tables={table.name: table for table in tables},
            provenance=self.provenance(),
            metadata=metadata,
        )

    def provenance(self):
        return {
            "package": "waveguide_metamaterial",
            "version": __version__,
            "scenario": self.spec.scenario,
            "config_hash": self.spec.hash,
            "seed": self.spec.seed,
            "config": self.spec.config,
        }


def run_scenario(spec, progress=False):
    """Run `spec` and return its RunResult.

    Parameters
    ----------
    spec: SweepSpec or str
        A validated spec, or a scenario name to run on the shipped
        preset with seed 0.
    """
    if isinstance(spec, str):
        spec = sweep_spec(load_config(), spec)
    return ScenarioRunner(spec, progress=progress).run()

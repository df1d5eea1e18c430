# -*- coding: utf-8 -*-

"""Building blocks shared by every scenario."""

from dataclasses import dataclass, field

import numpy as np

from ..config import grid_problems
from ..errors import ParameterError
from ..units import to_db, to_hz

PLOT_KINDS = ("line", "heatmap")


@dataclass(frozen=True, eq=False)
class Table:
    """Named numeric columns of equal length.

    Parameters
    ----------
    name: str
        Used as the output file stem.
    columns: dict
        Column name -> 1-D array, in output order.
    plot: tuple, optional
        ("line", x, y) or ("heatmap", x, y, value) column names. Tables
        without a plot are written as CSV/JSON only.
    description: str
    """
    name: str
    columns: dict
    plot: tuple = None
    description: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        columns = {}
        for key, values in self.columns.items():
            values = np.atleast_1d(np.asarray(values, dtype=float))
            if values.ndim != 1:
                raise ParameterError("column {!r} of table {!r} is not "
                                     "1-D".format(key, self.name))
            columns[key] = values
        lengths = {len(v) for v in columns.values()}
        if len(lengths) > 1:
            raise ParameterError("columns of table {!r} differ in "
                                 "length".format(self.name))
        if self.plot is not None:
            if self.plot[0] not in PLOT_KINDS:
                raise ParameterError("unknown plot kind {!r}".format(
                    self.plot[0]))
            unknown = [c for c in self.plot[1:] if c not in columns]
            if unknown:
                raise ParameterError("plot of table {!r} refers to unknown "
                                     "columns {}".format(self.name, unknown))
        object.__setattr__(self, "columns", columns)

    def __len__(self):
        return len(next(iter(self.columns.values()), ()))

    def __getitem__(self, name):
        return self.columns[name]


def spectrum_columns(omegas, values, axes=None):
    """The fixed S-parameter column set.

    frequency_Hz, any grid axes, then re, im, abs and abs2_dB of the
    complex values. `omegas`, `values` and the axes share one length
    (2-D maps are passed flattened).
    """
    values = np.asarray(values, dtype=complex).ravel()
    columns = {"frequency_Hz": to_hz(np.asarray(omegas, dtype=float).ravel())}
    for key, axis in (axes or {}).items():
        columns[key] = np.asarray(axis, dtype=float).ravel()
    columns["re"] = values.real
    columns["im"] = values.imag
    columns["abs"] = np.abs(values)
    columns["abs2_dB"] = to_db(np.abs(values) ** 2)
    return columns


def spectrum_table(name, omegas, values, description="", extra=None):
    """1-D S-parameter table with a line plot of abs2_dB."""
    columns = spectrum_columns(omegas, values)
    columns.update(extra or {})
    return Table(name, columns, plot=("line", "frequency_Hz", "abs2_dB"),
                 description=description)


def map_table(name, omegas, axis_name, axis_values, values, description=""):
    """2-D S-parameter map, rows ordered axis-major.

    `values` has shape (len(axis_values), len(omegas)).
    """
    values = np.asarray(values)
    axis_grid, omega_grid = np.meshgrid(axis_values, omegas, indexing="ij")
    columns = spectrum_columns(omega_grid, values,
                               axes={axis_name: axis_grid})
    return Table(name, columns,
                 plot=("heatmap", "frequency_Hz", axis_name, "abs2_dB"),
                 description=description)


class Scenario:
    """Base class of a runnable experiment.

    Subclasses set `required` (keys the scenario section must hold) and
    `grids` (keys holding grid specifications), and implement `run`.
    """
    id = None
    required = ()
    grids = ()

    def __init__(self, spec, rng, progress=False):
        self.spec = spec
        self.config = spec.config
        self.section = spec.section
        self.rng = rng
        self.progress = progress
        self.metadata = {}

    @classmethod
    def check(cls, section, config):
        """Problems with `section`, as a list of strings."""
        prefix = "scenarios.{}".format(cls.id)
        problems = ["{}: missing key {!r}".format(prefix, key)
                    for key in cls.required if key not in section]
        for key in cls.grids:
            if key in section:
                problems.extend(grid_problems(
                    "{}.{}".format(prefix, key), section[key]))
        return problems

    def setup(self):
        """Called by the runner before `run`."""
        pass

    def run(self):
        """Compute the scenario and return a list of Tables.

        Scalar results and fit reports go into `self.metadata`.
        """
        raise NotImplementedError(
            "the run function has not been implemented. "
            "Derive the scenario from this class and implement "
            "at least the run function."
        )

# -*- coding: utf-8 -*-

"""Writing run results as CSV, JSON and SVG.

Every file carries the package version, the scenario and the SHA-256 of
the resolved configuration. Nothing time dependent is written, so the
same configuration and seed give byte-identical files.
"""

import csv
import io
import json
import logging
import os
import tempfile

import matplotlib
import numpy as np

from .errors import ConfigError, OutputError

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json", "svg")
HEATMAP_CMAP = "viridis"
HEATMAP_RANGE_DB = (-40.0, 0.0)


def provenance_comment(result):
    p = result.provenance
    return "# {} {} scenario={} config_sha256={}".format(
        p["package"], p["version"], p["scenario"], p["config_hash"])


def _atomic_write(path, text):
    """Write `text` to a temporary file next to `path`, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    tmp = None
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".",
                                   suffix=".tmp")
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if tmp is not None and os.path.exists(tmp):
            os.remove(tmp)
        raise OutputError(exc.strerror or str(exc), path=path)
    return path


def table_to_csv(table, comment):
    buffer = io.StringIO()
    buffer.write(comment + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(table.columns))
    for row in zip(*table.columns.values()):
        writer.writerow(["%.17g" % value for value in row])
    return buffer.getvalue()


def read_table_csv(path):
    """Return (comment lines, {column: float array}) of a table CSV."""
    comments = []
    try:
        with open(path, newline="") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise OutputError(exc.strerror or str(exc), path=path)
    while lines and lines[0].startswith("#"):
        comments.append(lines.pop(0))
    reader = csv.reader(lines)
    header = next(reader)
    rows = [[float(value) for value in row] for row in reader]
    values = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return comments, {name: values[:, i] for i, name in enumerate(header)}


def _jsonable(value):
    """numpy scalars and arrays to plain Python; NaN and inf to None."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if np.isfinite(value) else None
    return value


def result_to_json(result):
    document = {
        "provenance": result.provenance,
        "metadata": result.metadata,
        "tables": {
            name: {"description": table.description,
                   "plot": table.plot,
                   "columns": table.columns}
            for name, table in result.tables.items()
        },
    }
    return json.dumps(_jsonable(document), sort_keys=True, indent=2,
                      allow_nan=False) + "\n"


def _axis(table, name):
    values = table[name]
    if name == "frequency_Hz":
        return values / 1e9, "frequency (GHz)"
    return values, name


def _line_plot(ax, table):
    _, x_name, y_name = table.plot
    x, x_label = _axis(table, x_name)
    ax.plot(x, table[y_name], lw=1.0)
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_name)


def _heatmap(fig, ax, table):
    """Rows are stored y-major, so the z column reshapes to (ny, nx)."""
    _, x_name, y_name, z_name = table.plot
    x, x_label = _axis(table, x_name)
    y = table[y_name]
    ny = len(np.unique(y))
    z = table[z_name].reshape(ny, -1)
    x_row, y_col = x[:z.shape[1]], y[::z.shape[1]]
    y_lo, y_hi = y_col[0], y_col[-1]
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    image = ax.imshow(np.clip(z, *HEATMAP_RANGE_DB), aspect="auto",
                      origin="lower", interpolation="nearest",
                      extent=[x_row[0], x_row[-1], y_lo, y_hi],
                      cmap=HEATMAP_CMAP, vmin=HEATMAP_RANGE_DB[0],
                      vmax=HEATMAP_RANGE_DB[1])
    fig.colorbar(image, ax=ax, label=z_name)
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_name)


def table_to_svg(table, salt, description=None):
    """SVG text of the table's plot. `salt` fixes the ids matplotlib
    generates; `description` lands in the SVG metadata block."""
    with matplotlib.rc_context({"svg.hashsalt": salt,
                                "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        try:
            if table.plot[0] == "line":
                _line_plot(ax, table)
            else:
                _heatmap(fig, ax, table)
            ax.set_title(table.name)
            buffer = io.StringIO()
            fig.savefig(buffer, format="svg",
                        metadata={"Date": None, "Description": description})
        finally:
            plt.close(fig)
    return buffer.getvalue()


def emit_outputs(result, formats=FORMATS, out_dir="."):
    """Write `result` to `out_dir` and return the written paths.

    CSV: one file per table. JSON: one file per run holding every table
    with provenance and metadata. SVG: one plot per table that declares
    one. An empty result writes nothing.
    """
    formats = tuple(formats)
    unknown = sorted(set(formats) - set(FORMATS))
    if unknown:
        raise ConfigError("unknown output formats {}; expected a subset "
                          "of {}".format(unknown, ", ".join(FORMATS)))
    if not result.tables:
        logger.info("nothing to emit for scenario %s", result.scenario)
        return []
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OutputError(exc.strerror or str(exc), path=out_dir)

    comment = provenance_comment(result)
    salt = result.provenance["config_hash"]
    written = []
    for name, table in result.tables.items():
        if "csv" in formats:
            written.append(_atomic_write(
                os.path.join(out_dir, name + ".csv"),
                table_to_csv(table, comment)))
        if "svg" in formats and table.plot is not None:
            path = _atomic_write(os.path.join(out_dir, name + ".svg"),
                                 table_to_svg(table, salt, comment))
            result.figures.append(path)
            written.append(path)
    if "json" in formats:
        written.append(_atomic_write(
            os.path.join(out_dir, result.scenario + ".json"),
            result_to_json(result)))
    logger.info("wrote %d files to %s", len(written), out_dir)
    return written

# -*- coding: utf-8 -*-

"""Console script for waveguide_metamaterial."""
import logging
import os
import sys

import click

from waveguide_metamaterial import __version__
from waveguide_metamaterial.config import (load_config, sweep_spec,
                                           validate_config)
from waveguide_metamaterial.errors import ConfigError, WaveguideError
from waveguide_metamaterial.outputs import FORMATS, emit_outputs
from waveguide_metamaterial.runner import ScenarioRunner
from waveguide_metamaterial.scenarios import describe, registered

LOGLEVEL_ENV = "WAVEGUIDE_METAMATERIAL_LOGLEVEL"


def configure_logging():
    level = os.environ.get(LOGLEVEL_ENV, "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _fail(exc):
    """Print `exc` and exit: 2 for configuration problems, 1 otherwise."""
    click.echo("Error: {}".format(exc), err=True)
    sys.exit(2 if isinstance(exc, ConfigError) else 1)


def _parse_formats(ctx, param, value):
    formats = [f.strip() for f in value.split(",") if f.strip()]
    unknown = [f for f in formats if f not in FORMATS]
    if unknown or not formats:
        raise click.BadParameter("expected a comma separated subset of "
                                 "{}".format(",".join(FORMATS)))
    return formats


@click.group()
@click.version_option(version=__version__)
def main():
    "Waveguide QED simulations of tunable qubit arrays."
    configure_logging()


@main.command()
@click.argument("scenario")
@click.option("--config", "config_path", type=click.Path(dir_okay=False),
              help="JSON file merged over the shipped parameter preset")
@click.option("--out", "out_dir", default="results", show_default=True,
              type=click.Path(file_okay=False),
              help="Directory the result files are written to")
@click.option("--formats", default=",".join(FORMATS), show_default=True,
              callback=_parse_formats,
              help="Comma separated output formats")
@click.option("--seed", type=click.IntRange(min=0), default=0,
              show_default=True,
              help="Seed for every random draw of the run")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
              help="Override one configuration value, e.g. "
                   "--set array.n_qubits=4 (repeatable)")
@click.option("--progress/--no-progress", default=True,
              help="Show progress bars")
def run(scenario, config_path, out_dir, formats, seed, overrides,
        progress):
    "Run one scenario and write its tables and plots"
    try:
        config = load_config(config_path, overrides)
        spec = sweep_spec(config, scenario, seed=seed)
        result = ScenarioRunner(spec, progress=progress).run()
        written = emit_outputs(result, formats, out_dir)
    except (WaveguideError, OSError) as exc:
        _fail(exc)
    if not written:
        click.echo("nothing to emit")
        return
    for path in written:
        click.echo(path)


@main.command("list-scenarios")
def list_scenarios():
    "List the scenarios that can be run"
    for name in registered():
        click.echo("{:<20}{}".format(name, describe(name)))


@main.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False),
              help="JSON file merged over the shipped parameter preset")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
              help="Override one configuration value (repeatable)")
def validate(config_path, overrides):
    "Check a configuration without running anything"
    try:
        validate_config(load_config(config_path, overrides))
    except (WaveguideError, OSError) as exc:
        _fail(exc)
    click.echo("configuration OK")


if __name__ == "__main__":
    sys.exit(main())  # pragma: no cover

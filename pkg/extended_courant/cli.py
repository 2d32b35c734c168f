# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Command line entry point."""

import functools
import sys

import click

from extended_courant.core.extended_courant_config import FORMATS, RunConfig
from extended_courant.core.wrappers.verification_runner import COMMANDS, VerificationRunner
from extended_courant.utils.log import Log


def _common_options(func):
    """Options shared by every verification command."""
    options = [
        click.option(
            "--config",
            "config_path",
            type=click.Path(exists=True, dir_okay=False),
            help="JSON file of settings; options given here win.",
        ),
        click.option("--grid", type=int, help="Points along the longest side of the nodal grid."),
        click.option("--sl-grid", type=int, help="Cells of the 1D discretization."),
        click.option("--mesh-level", type=int, help="Finest finite element mesh level."),
        click.option("--tol", type=float, help="Eigenvalue clustering tolerance."),
        click.option("--seed", type=int, help="Seed of every randomized check."),
        click.option("--out", type=click.Path(file_okay=False), help="Report directory."),
        click.option(
            "--format",
            "formats",
            multiple=True,
            type=click.Choice(FORMATS),
            help="Artifact format, repeatable.",
        ),
        click.option("--epsilon", type=float, help="Fiber scale of the collapsing product."),
        click.option("--d", "d", type=int, help="Sphere dimension."),
        click.option("--k", "k", type=int, help="Spherical harmonic degree."),
        click.option("--verbose", is_flag=True, help="Log progress to stdout."),
    ]
    return functools.reduce(lambda wrapped, option: option(wrapped), reversed(options), func)


def _run(command: str, config_path, verbose: bool, **overrides):
    Log.VERBOSE = verbose
    if not overrides.get("formats"):
        overrides["formats"] = None
    try:
        config = RunConfig.from_json_file(config_path, **overrides)
        envelope = VerificationRunner(config).run(command)
    except ValueError as error:
        raise click.UsageError(str(error)) from error
    failed = [v for v in envelope.verdicts if not v.ok]
    for verdict in envelope.verdicts:
        click.echo(f"{verdict.status:20s} {verdict.check}")
    click.echo(
        f"{command}: {len(envelope.verdicts) - len(failed)}/{len(envelope.verdicts)} checks ok"
    )
    sys.exit(envelope.exit_code)


@click.group()
@click.version_option(package_name="extended_courant")
def main():
    """Numerical verification of Courant type nodal domain bounds."""


def _register(command: str):
    @main.command(name=command, help=VerificationRunner.__dict__[_method(command)].__doc__)
    @_common_options
    def command_function(**kwargs):
        _run(command, **kwargs)

    command_function.__name__ = _method(command)
    return command_function


def _method(command: str) -> str:
    return command.replace("-", "_")


for _command in COMMANDS:
    _register(_command)


if __name__ == "__main__":
    main()  # pylint: disable=no-value-for-parameter

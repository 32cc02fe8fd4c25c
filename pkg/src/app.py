"""Command group factory for the drug-target graph lab."""

from __future__ import annotations

import logging
import os

import click
import numpy as np
from dotenv import load_dotenv

from .config import RunConfig, get_config
from .errors import DataFormatError, DivergenceError, FoldFailure

EXIT_INPUT_ERROR = 3
EXIT_NUMERICAL_ERROR = 4

NUMERICAL_ERRORS = (DivergenceError, np.linalg.LinAlgError, FloatingPointError)
INPUT_ERRORS = (DataFormatError, FileNotFoundError, ValueError)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


def configure_logging(level: str | None = None) -> None:
    """Route log records to stderr so run outputs stay byte-identical."""

    level_name = (level or os.getenv("DTI_LAB_LOG_LEVEL", "WARNING")).upper()
    logging.basicConfig(level=level_name, format=LOG_FORMAT, force=True)


def exit_code_for(error: BaseException) -> int | None:
    """Map an exception to an exit status; None means it is not ours to handle."""

    if isinstance(error, FoldFailure):
        cause = error.__cause__
        if isinstance(cause, NUMERICAL_ERRORS):
            return EXIT_NUMERICAL_ERROR
        if isinstance(cause, INPUT_ERRORS):
            return EXIT_INPUT_ERROR
        return 1
    if isinstance(error, NUMERICAL_ERRORS):
        return EXIT_NUMERICAL_ERROR
    if isinstance(error, INPUT_ERRORS):
        return EXIT_INPUT_ERROR
    return None


class LabGroup(click.Group):
    """click Group that turns domain errors into distinct exit statuses."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except (click.exceptions.ClickException, click.exceptions.Exit, click.exceptions.Abort):
            raise
        except Exception as exc:
            code = exit_code_for(exc)
            if code is None:
                raise
            kind = "numerical failure" if code == EXIT_NUMERICAL_ERROR else "input error"
            click.echo(f"{kind}: {exc}", err=True)
            logging.getLogger(__name__).debug("command failed", exc_info=exc)
            ctx.exit(code)


def create_app(config: RunConfig | None = None) -> click.Group:
    """Create the command group; ``config`` replaces the environment profile."""

    load_dotenv()

    @click.group(cls=LabGroup)
    @click.option("--log-level", default=None, help="Overrides DTI_LAB_LOG_LEVEL.")
    @click.pass_context
    def cli(ctx: click.Context, log_level: str | None) -> None:
        """Multi-view affinity, dual graph encoders and evaluation for drug-target pairs."""

        configure_logging(log_level)
        ctx.ensure_object(dict)
        ctx.obj["base_config"] = config or get_config()

    register_commands(cli)
    return cli


def register_commands(cli: click.Group) -> None:
    """Import and register the command modules."""

    from .controllers import (  # pylint: disable=import-outside-toplevel
        affinity,
        evaluation,
        predict,
        seed,
        sweep,
        training,
    )

    cli.add_command(affinity.affinity_command)
    cli.add_command(training.train_command)
    cli.add_command(evaluation.evaluate_command)
    cli.add_command(predict.predict_command)
    cli.add_command(sweep.sweep_command)
    cli.add_command(seed.seed_command)

"""Command line interface.

Usage: biomarker <subcommand> [flags]. Every `RunConfig` field is a flag
(`--top-k`, `--fdr-cutoff`, ...). On failure exactly one line `error=<code> exit=<n>`
goes to stdout and the detail goes to the log on stderr.
"""

import asyncio
import os
import sys
from argparse import ArgumentParser, BooleanOptionalAction, Namespace
from typing import Any, NoReturn, Sequence

from dotenv import load_dotenv
from loguru import logger

from app.config import ENV_PREFIX, RunConfig
from app.exception import BiomarkerError, DataValidationError, InvalidParameterError
from app.pipeline import SUBCOMMANDS, BiomarkerPipeline

LOG_FORMAT = "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | {extra} | {message}"

PIPELINE_HELP = "Run preprocess, rank, select and evaluate in order (simulating when --input is absent)."

# flags that do not map onto RunConfig
RESERVED = {"config", "subcommand"}


class CliArgumentParser(ArgumentParser):
    """Argument parser that raises instead of exiting with status 2."""

    def error(self, message: str) -> NoReturn:
        raise InvalidParameterError(message)


def _add_config_flags(parser: ArgumentParser):
    parser.add_argument("--config", help="A key=value file; command-line flags override it.")
    for name, field in RunConfig.model_fields.items():
        flag = "--" + name.replace("_", "-")
        if field.annotation is bool:
            parser.add_argument(flag, dest=name, action=BooleanOptionalAction, default=None, help=field.description)
        else:
            parser.add_argument(flag, dest=name, default=None, help=field.description)


def subcommand_help() -> dict[str, str]:
    """Get the help text of every subcommand; a step subcommand shows its step description."""
    help_text = {step.name: step.description for step in BiomarkerPipeline().steps}
    help_text["pipeline"] = PIPELINE_HELP
    return help_text


def build_parser() -> ArgumentParser:
    """Build the parser: one subcommand per entry of `SUBCOMMANDS`, each taking every `RunConfig` flag."""
    help_text = subcommand_help()
    parser = CliArgumentParser(prog="biomarker", description="Microarray biomarker discovery toolkit.")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for subcommand in SUBCOMMANDS:
        text = help_text[subcommand]
        _add_config_flags(subparsers.add_parser(subcommand, help=text, description=text))
    return parser


def configure_logging(level: str):
    """Install one stderr sink at the given level."""
    logger.remove()
    try:
        logger.add(sys.stderr, level=level.upper(), format=LOG_FORMAT)
    except ValueError as e:
        logger.add(sys.stderr, level="INFO", format=LOG_FORMAT)
        raise InvalidParameterError(f"unknown log level: {level}") from e


def _overrides(args: Namespace) -> dict[str, Any]:
    return {key: value for key, value in vars(args).items() if key not in RESERVED and value is not None}


def _fail(error: BiomarkerError) -> int:
    logger.error(str(error))
    print(f"error={error.code} exit={error.exit_code}")
    return error.exit_code


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line.

    Args:
        argv (Sequence[str] | None): The arguments. Defaults to `sys.argv[1:]`.

    Returns:
        int: The exit status: 0 success, 1 usage, 2 data, 3 algorithm failure.
    """
    load_dotenv()
    try:
        configure_logging(os.getenv(f"{ENV_PREFIX}LOG_LEVEL", "INFO"))
        args = build_parser().parse_args(argv)
        config = RunConfig.resolve(_overrides(args), args.config)
        configure_logging(config.log_level)
        outcome = asyncio.run(BiomarkerPipeline().run(args.subcommand, config))
    except BiomarkerError as e:
        return _fail(e)
    except OSError as e:
        return _fail(DataValidationError(str(e)))

    if outcome.exit_code:
        print(f"error={outcome.error_code} exit={outcome.exit_code}")
        return outcome.exit_code
    for message in outcome.messages:
        print(message)
    return 0


if __name__ == "__main__":
    sys.exit(main())

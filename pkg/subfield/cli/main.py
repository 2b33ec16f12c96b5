"""Command-line entry point: ``subfield <experiment> --config FILE [options] [key=value ...]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from subfield.cli.artifacts import ArtifactWriter
from subfield.cli.config_file import ExperimentName, load_experiment_config
from subfield.cli.experiments import EXPERIMENTS
from subfield.core.config import get_settings
from subfield.core.exceptions import ConfigError, NumericalError
from subfield.core.logging_config import configure_logging
from subfield.stochastics.rng import RngStream

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subfield",
        description="Run subordinated Gaussian random field experiments and write CSV artifacts.",
    )
    parser.add_argument("experiment", choices=[e.value for e in ExperimentName], help="Experiment to run.")
    parser.add_argument("--config", type=Path, help="TOML experiment configuration.")
    parser.add_argument("--seed", type=int, help="Root seed (overrides the config file).")
    parser.add_argument("--out", help="Output directory (overrides the config file).")
    parser.add_argument("--threads", type=int, help="Worker thread cap for Monte Carlo loops.")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level.")
    parser.add_argument("overrides", nargs="*", metavar="key=value", help="Dotted config overrides, e.g. params.n_samples=1000.")
    return parser


def _format_validation_error(exc: ValidationError) -> str:
    return "; ".join(f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in exc.errors())


def main(argv: Optional[List[str]] = None) -> int:
    """Parses arguments, runs one experiment and returns the exit status."""
    args = build_parser().parse_args(argv)
    settings = get_settings()
    configure_logging("DEBUG" if args.verbose else settings.log_level)

    try:
        config = load_experiment_config(
            args.experiment,
            path=args.config,
            overrides=args.overrides,
            seed=args.seed,
            output_dir=args.out,
            threads=args.threads,
        )
    except ValidationError as exc:
        logger.error(f"Invalid configuration: {_format_validation_error(exc)}")
        return EXIT_CONFIG
    except ConfigError as exc:
        logger.error(f"Invalid configuration: {exc}")
        return EXIT_CONFIG

    out_dir = Path(config.output_dir or settings.output_dir)
    threads = config.threads or settings.threads
    logger.info(f"Running {config.experiment.value} with seed {config.seed} into {out_dir}")
    runner = EXPERIMENTS[config.experiment]

    try:
        with ArtifactWriter(out_dir, config.experiment.value) as writer:
            summary = runner(config, writer, RngStream(config.seed), threads)
            resolved = config.model_dump(mode="json")
            resolved["params"] = config.typed_params.model_dump(mode="json")
            writer.write_manifest(resolved, seed=config.seed, threads=threads, summary=summary)
    except NumericalError as exc:
        logger.error(f"Numerical failure: {exc}")
        return EXIT_NUMERICAL
    except (ConfigError, ValueError) as exc:
        # UnsupportedOperationError is a ValueError: the model cannot run this experiment
        logger.error(f"Experiment cannot run with this configuration: {exc}")
        return EXIT_CONFIG
    except Exception as exc:
        logger.error(f"Unexpected failure in {config.experiment.value}: {exc}", exc_info=True)
        return EXIT_NUMERICAL

    logger.info(f"Finished {config.experiment.value}: {summary}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

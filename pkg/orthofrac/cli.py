# -*- Mode:Python; indent-tabs-mode:nil; tab-width:4 -*-
#
# Copyright 2026 The orthofrac developers
#
# This program is free software; you can redistribute it and/or
# modify it under the terms of the GNU Lesser General Public
# License version 3 as published by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
# Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.


"""Command line interface."""

import argparse
import logging
import os
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

import orthofrac
from orthofrac import errors, io
from orthofrac.bench import format_report, run_bench
from orthofrac.models.config_model import SimulationConfig
from orthofrac.solver import Simulation, run_simulation
from orthofrac.state import SolutionState

logger = logging.getLogger(__name__)

ENV_PREFIX = "ORTHOFRAC_"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
DEFAULT_LOG_LEVEL = "WARNING"
DEFAULT_THREADS = 1


def _get_env_int(name: str, default_value: int | None, minimum: int = 0) -> int | None:
    """Return an integer override from ``ORTHOFRAC_<name>``."""
    environment_var = ENV_PREFIX + name
    environment_value = os.getenv(environment_var)
    if environment_value is None:
        return default_value

    try:
        value = int(environment_value)
    except ValueError:
        logger.debug(
            "%r set to invalid value %r, setting to %r.",
            environment_var,
            environment_value,
            default_value,
        )
        return default_value

    if value < minimum:
        logger.debug(
            "%r set to out of range value %r, setting to %r.",
            environment_var,
            value,
            default_value,
        )
        return default_value

    return value


def _get_log_level(flag: str | None) -> str:
    if flag is not None:
        return flag
    environment_var = ENV_PREFIX + "LOG_LEVEL"
    environment_value = os.getenv(environment_var)
    if environment_value is None:
        return DEFAULT_LOG_LEVEL
    if environment_value.upper() not in LOG_LEVELS:
        logger.debug(
            "%r set to invalid value %r, setting to %r.",
            environment_var,
            environment_value,
            DEFAULT_LOG_LEVEL,
        )
        return DEFAULT_LOG_LEVEL
    return environment_value.upper()


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser of the ``orthofrac`` command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", type=Path, help="YAML simulation configuration")
    common.add_argument(
        "--output-dir", type=Path, help="directory for results (overrides output.directory)"
    )
    common.add_argument("--max-steps", type=int, help="stop after this many load steps")
    common.add_argument("--threads", type=int, help="worker threads of the error indicator")
    common.add_argument("--seed", type=int, help="reserved; recorded in the log only")
    common.add_argument("--log-level", choices=LOG_LEVELS, help="logging threshold")

    parser = argparse.ArgumentParser(
        prog="orthofrac",
        description="Adaptive phase-field fracture of graded orthotropic plates.",
    )
    parser.add_argument("--version", action="version", version=orthofrac.__version__)
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    commands.add_parser("run", parents=[common], help="run the full load schedule")
    commands.add_parser("check", parents=[common], help="validate a configuration")
    commands.add_parser("mesh", parents=[common], help="write the initial mesh")
    commands.add_parser("bench", parents=[common], help="compare adaptive and uniform meshes")
    return parser


def _load(args: argparse.Namespace) -> SimulationConfig:
    config = io.parse_config(args.config)
    output_dir = args.output_dir
    if output_dir is None and os.getenv(ENV_PREFIX + "OUTPUT_DIR"):
        output_dir = Path(os.environ[ENV_PREFIX + "OUTPUT_DIR"])
    if output_dir is not None:
        output = config.output.model_copy(update={"directory": output_dir})
        config = config.model_copy(update={"output": output})
    return config


def _threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise errors.OrthofracError(f"Invalid thread count {args.threads}.")
        return int(args.threads)
    return _get_env_int("THREADS", DEFAULT_THREADS, minimum=1) or DEFAULT_THREADS


def _max_steps(args: argparse.Namespace) -> int | None:
    if args.max_steps is not None:
        return int(args.max_steps)
    return _get_env_int("MAX_STEPS", None)


def _check(args: argparse.Namespace) -> int:
    config = _load(args)
    mesh = Simulation(config).initial_mesh()
    print(f"{args.config}: valid")
    print(f"  config hash: {io.config_hash(config)}")
    print(f"  domain: {config.geometry.width:g} x {config.geometry.height:g} mm")
    print(f"  initial mesh: {mesh.n_elements} elements, {mesh.n_dofs} dofs")
    print(f"  ell0: {config.phasefield.ell0:.6g} mm")
    print(f"  increment: {config.schedule.displacement_increment:.6g} mm")
    print(f"  steps: {config.schedule.steps}")
    return 0


def _mesh(args: argparse.Namespace) -> int:
    config = _load(args)
    simulation = Simulation(config)
    mesh = simulation.initial_mesh()
    writer = io.RunWriter(simulation.config)
    state = SolutionState.zeros(mesh.n_nodes, 0)
    path = writer.write_snapshot(0, mesh, state, None)
    print(f"Wrote {path}: {mesh.n_elements} elements, {mesh.n_nodes} nodes.")
    return 0


def _run(args: argparse.Namespace) -> int:
    config = _load(args)
    result = run_simulation(config, max_steps=_max_steps(args), threads=_threads(args))
    print(f"Completed {len(result.records)} load steps in {config.output.directory}.")
    if result.records:
        last = result.records[-1]
        print(
            f"  final: u = {last.displacement:.6g} mm, F = {last.reaction:.6g} N, "
            f"{last.dofs} dofs"
        )
    unconverged = [record.step for record in result.records if not record.converged]
    if unconverged:
        print(f"  accepted without convergence: steps {unconverged}")
    return 0


def _bench(args: argparse.Namespace) -> int:
    config = _load(args)
    report = run_bench(config, threads=_threads(args))
    print(format_report(report))
    return 0


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "run": _run,
    "check": _check,
    "mesh": _mesh,
    "bench": _bench,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Run the ``orthofrac`` command and return its exit code.

    Usage errors exit with status 2 through argparse; orthofrac errors
    return 1 after printing the message, details and resolution.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=_get_log_level(args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    seed = args.seed if args.seed is not None else _get_env_int("SEED", None)
    if seed is not None:
        logger.debug("Seed %d recorded; the solver is deterministic.", seed)

    try:
        return COMMANDS[args.command](args)
    except errors.OrthofracError as err:
        print(f"Error: {err}", file=sys.stderr)
        if err.details:
            print(err.details, file=sys.stderr)
        if err.resolution:
            print(f"Resolution: {err.resolution}", file=sys.stderr)
        return 1

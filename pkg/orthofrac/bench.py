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


"""Adaptive versus uniform comparison of the first load step."""

import logging

from orthofrac.models.config_model import SimulationConfig
from orthofrac.models.record_model import BenchCase, BenchReport
from orthofrac.solver import PhaseTimer, Simulation, StepOutcome
from orthofrac.state import SolutionState

logger = logging.getLogger(__name__)


def _first_step(
    simulation: Simulation, base_level: int, *, adaptive: bool
) -> tuple[StepOutcome, PhaseTimer]:
    timer = PhaseTimer()
    disc = simulation.discretize(simulation.initial_mesh(base_level))
    state = SolutionState.zeros(disc.mesh.n_nodes, disc.quadrature.n_points)
    outcome = simulation.advance(disc, state, 0.0, 1, timer, adaptive=adaptive)
    return outcome, timer


def _case(label: str, outcome: StepOutcome, timer: PhaseTimer) -> BenchCase:
    mesh = outcome.disc.mesh
    return BenchCase(
        label=label,
        dofs=mesh.n_dofs,
        elements=mesh.n_elements,
        finest_level=mesh.max_level,
        timings=timer.snapshot(),
    )


def run_bench(config: SimulationConfig, *, threads: int = 1) -> BenchReport:
    """Solve the first load step adaptively, then on a uniform mesh.

    The uniform mesh uses the finest level reached by the adaptive run, so
    both resolve the crack region equally.
    """
    simulation = Simulation(config, threads=threads)
    base_level = simulation.config.mesh.base_level

    adaptive, adaptive_timer = _first_step(simulation, base_level, adaptive=True)
    finest = adaptive.disc.mesh.max_level
    logger.info(
        "Adaptive first step: %d dofs, finest level %d.", adaptive.disc.mesh.n_dofs, finest
    )

    uniform, uniform_timer = _first_step(simulation, finest, adaptive=False)
    logger.info("Uniform first step: %d dofs.", uniform.disc.mesh.n_dofs)

    return BenchReport(
        adaptive=_case("adaptive", adaptive, adaptive_timer),
        uniform=_case("uniform", uniform, uniform_timer),
    )


def format_report(report: BenchReport) -> str:
    """Render a bench report as a fixed-width table."""
    phases = list(type(report.adaptive.timings).model_fields)
    header = ["case", "dofs", "elements", "level", *phases, "total"]
    rows = [header]
    for case in (report.adaptive, report.uniform):
        timings = case.timings
        rows.append(
            [
                case.label,
                str(case.dofs),
                str(case.elements),
                str(case.finest_level),
                *(f"{getattr(timings, phase):.3f}" for phase in phases),
                f"{timings.total:.3f}",
            ]
        )
    widths = [max(len(row[column]) for row in rows) for column in range(len(header))]
    lines = ["  ".join(cell.rjust(width) for cell, width in zip(row, widths)) for row in rows]
    lines.append(f"adaptive/uniform dofs: {report.dof_ratio:.4f}")
    return "\n".join(lines)

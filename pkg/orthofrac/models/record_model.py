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


"""Per-step and benchmark records."""

from typing import Annotated

import annotated_types

from orthofrac.models._base_model import MarshableModel

Seconds = Annotated[float, annotated_types.Ge(0)]


class PhaseTimings(MarshableModel):
    """Wall time spent per solver phase (s)."""

    error_indicator: Seconds = 0.0
    remeshing: Seconds = 0.0
    assemble_phi: Seconds = 0.0
    solve_phi: Seconds = 0.0
    assemble_u: Seconds = 0.0
    solve_u: Seconds = 0.0

    @property
    def total(self) -> float:
        return (
            self.error_indicator
            + self.remeshing
            + self.assemble_phi
            + self.solve_phi
            + self.assemble_u
            + self.solve_u
        )


class StepRecord(MarshableModel):
    """Outcome of one accepted load step.

    :param step: load step number, from 1.
    :param displacement: applied displacement after the step (mm).
    :param reaction: reaction force on the loaded boundary (N).
    :param dofs: displacement unknowns of the final mesh of the step.
    :param iterations: staggered iterations of the accepted solve.
    :param wall_time: measured wall time of the step (s).
    :param elements: element count of the final mesh of the step.
    :param converged: False if the step was accepted without convergence.
    :param cutbacks: number of increment halvings.
    :param refinements: refinement passes performed during the step.
    :param global_error: global error indicator of the final mesh, if computed.
    :param timings: wall time per phase.
    """

    step: Annotated[int, annotated_types.Ge(1)]
    displacement: float
    reaction: float
    dofs: int
    iterations: int
    wall_time: Seconds
    elements: int
    converged: bool = True
    cutbacks: int = 0
    refinements: int = 0
    global_error: float | None = None
    timings: PhaseTimings = PhaseTimings()


class BenchCase(MarshableModel):
    """One side of the adaptive-versus-uniform comparison."""

    label: str
    dofs: int
    elements: int
    finest_level: int
    timings: PhaseTimings


class BenchReport(MarshableModel):
    """Adaptive and uniform first load step on the same specimen."""

    adaptive: BenchCase
    uniform: BenchCase

    @property
    def dof_ratio(self) -> float:
        """Adaptive DOFs as a fraction of uniform DOFs."""
        return self.adaptive.dofs / self.uniform.dofs

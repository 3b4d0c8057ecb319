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

"""Simulation configuration models."""

import enum
import math
from pathlib import Path
from typing import Annotated, Literal

import annotated_types
import pydantic
from typing_extensions import Self

from orthofrac.models._base_model import MarshableModel
from orthofrac.models.material_model import (
    EffectiveLame,
    GradationSpec,
    GradingDirection,
    OrthotropicBase,
)

PositiveFloat = Annotated[float, annotated_types.Gt(0)]
NonNegativeInt = Annotated[int, annotated_types.Ge(0)]
Point = tuple[float, float]

_ASPECT_TOLERANCE = 1e-9


class Edge(str, enum.Enum):
    """A side of the rectangular domain."""

    BOTTOM = "bottom"
    RIGHT = "right"
    TOP = "top"
    LEFT = "left"


class GeometryConfig(MarshableModel):
    """Rectangular domain with an optional notch.

    The domain is tiled by square root cells of side ``min(width, height)``,
    so the aspect ratio must be an integer.

    :param width: domain extent along x (mm).
    :param height: domain extent along y (mm).
    :param origin: lower-left corner (mm).
    :param notch: polyline from the crack mouth to the notch tip (mm).
    """

    width: PositiveFloat
    height: PositiveFloat
    origin: Point = (0.0, 0.0)
    notch: list[Point] | None = None

    @pydantic.model_validator(mode="after")
    def _check_geometry(self) -> Self:
        ratio = max(self.width, self.height) / min(self.width, self.height)
        if abs(ratio - round(ratio)) > _ASPECT_TOLERANCE * ratio:
            raise ValueError(
                f"aspect ratio {ratio:.6g} is not an integer; "
                "the domain must be tiled by square cells"
            )
        if self.notch is not None:
            if len(self.notch) < 2:
                raise ValueError("notch needs at least 2 vertices")
            for start, end in zip(self.notch[:-1], self.notch[1:]):
                if math.dist(start, end) <= _ASPECT_TOLERANCE * self.root_size:
                    raise ValueError(f"notch segment {start} -> {end} is degenerate")
        return self

    @property
    def root_size(self) -> float:
        """Side of the square root cells (mm)."""
        return min(self.width, self.height)


class PhaseFieldParams(MarshableModel):
    """Phase-field regularization parameters.

    :param ell0: length scale (mm); defaults to twice the finest cell size.
    :param beta_penalty: anisotropy penalty of the structural tensor.
    :param k_p: residual stiffness.
    :param effective_lame: isotropic pair feeding the energy split.
    """

    ell0: PositiveFloat | None = None
    beta_penalty: Annotated[float, annotated_types.Ge(0)] = 20.0
    k_p: Annotated[float, annotated_types.Gt(0), annotated_types.Lt(1)] = 1e-6
    effective_lame: EffectiveLame = EffectiveLame.LONGITUDINAL


class LoadSchedule(MarshableModel):
    """Monotonic displacement loading.

    :param displacement_increment: applied displacement per step (mm);
        defaults to ``1e-4`` times the domain height.
    :param steps: number of load steps.
    :param staggered_tolerance: convergence tolerance on the phase-field
        increment in the max norm.
    :param max_staggered_iterations: iteration cap of the staggered scheme.
    :param max_cutbacks: number of times a step may halve its increment.
    :param on_nonconvergence: ``warn`` accepts the step with a flag,
        ``fail`` aborts the run.
    """

    displacement_increment: PositiveFloat | None = None
    steps: NonNegativeInt
    staggered_tolerance: PositiveFloat = 1e-4
    max_staggered_iterations: Annotated[int, annotated_types.Ge(1)] = 200
    max_cutbacks: NonNegativeInt = 4
    on_nonconvergence: Literal["warn", "fail"] = "warn"


class MeshConfig(MarshableModel):
    """Quadtree and adaptivity settings.

    :param base_level: uniform refinement level of the initial mesh.
    :param max_depth: finest admissible refinement level.
    :param error_tolerance: element error above which a cell is split.
    :param max_refinement_passes: refinement passes allowed per load step.
    :param quad_order: Gauss points per direction on quadrilaterals.
    :param triangle_order: rule order on polygon fan triangles.
    :param adaptive: disable to keep the initial mesh throughout.
    """

    base_level: NonNegativeInt = 3
    max_depth: NonNegativeInt = 8
    error_tolerance: PositiveFloat = 1e-5
    max_refinement_passes: NonNegativeInt = 5
    quad_order: Annotated[int, annotated_types.Ge(1)] = 2
    triangle_order: Annotated[int, annotated_types.Ge(1)] = 2
    adaptive: bool = True

    @pydantic.model_validator(mode="after")
    def _check_depth(self) -> Self:
        if self.max_depth < self.base_level:
            raise ValueError(
                f"max-depth ({self.max_depth}) is below base-level ({self.base_level})"
            )
        return self


class MlsConfig(MarshableModel):
    """Moving-least-squares recovery settings.

    :param support_factor: support radius as a multiple of the local element
        diameter.
    :param basis: reproducing polynomial basis; only ``linear`` is offered.
    :param min_neighbors: minimum number of covering nodes.
    :param growth_factor: support enlargement on an ill-conditioned fit.
    :param max_growth_attempts: number of enlargements before giving up.
    :param damage_threshold: phase-field value marking a broken point.
    """

    support_factor: PositiveFloat = 2.5
    basis: Literal["linear"] = "linear"
    min_neighbors: int = 4
    growth_factor: Annotated[float, annotated_types.Gt(1)] = 1.5
    max_growth_attempts: NonNegativeInt = 3
    damage_threshold: Annotated[float, annotated_types.Gt(0), annotated_types.Lt(1)] = (
        0.95
    )

    @pydantic.field_validator("min_neighbors")
    @classmethod
    def _check_neighbors(cls, value: int) -> int:
        # A linear basis has 3 monomials.
        if value <= 3:
            raise ValueError("min-neighbors must exceed the basis size 3")
        return value


class DirichletBC(MarshableModel):
    """Prescribed displacement component on an edge or at a point.

    :param edge: domain side carrying the constraint.
    :param point: single node location (mm), used instead of ``edge``.
    :param component: displacement component, ``x`` or ``y``.
    :param value: prescribed value (mm) for fixed constraints.
    :param loaded: if true, the value follows the applied displacement.
    """

    edge: Edge | None = None
    point: Point | None = None
    component: Literal["x", "y"]
    value: float = 0.0
    loaded: bool = False

    @pydantic.model_validator(mode="after")
    def _check_selector(self) -> Self:
        if (self.edge is None) == (self.point is None):
            raise ValueError("give exactly one of edge or point")
        return self


class NeumannBC(MarshableModel):
    """Constant traction (N/mm) on a domain side."""

    edge: Edge
    traction: Point


class BoundaryConditions(MarshableModel):
    """Dirichlet and Neumann data of the specimen."""

    dirichlet: Annotated[list[DirichletBC], annotated_types.MinLen(1)]
    neumann: list[NeumannBC] = []

    @pydantic.model_validator(mode="after")
    def _check_disjoint(self) -> Self:
        for traction in self.neumann:
            for axis, component in enumerate(("x", "y")):
                if traction.traction[axis] == 0.0:
                    continue
                if any(
                    bc.edge == traction.edge and bc.component == component
                    for bc in self.dirichlet
                ):
                    raise ValueError(
                        f"{traction.edge.value} edge has both a Dirichlet and a "
                        f"Neumann condition on component {component}"
                    )
        return self

    @property
    def loaded(self) -> list[DirichletBC]:
        """Constraints following the applied displacement."""
        return [bc for bc in self.dirichlet if bc.loaded]


class SolverConfig(MarshableModel):
    """Linear solver backend.

    :param backend: ``direct`` sparse factorization or ``iterative``
        conjugate gradients.
    :param iterative_rtol: relative residual of the iterative backend.
    """

    backend: Literal["direct", "iterative"] = "direct"
    iterative_rtol: PositiveFloat = 1e-10


class OutputConfig(MarshableModel):
    """Output settings.

    :param directory: folder receiving all run artifacts.
    :param stride: write a VTK snapshot every ``stride`` steps.
    :param wall_time: record measured wall time; ``false`` writes zeros so
        reruns are byte-identical.
    """

    directory: Path = Path("results")
    stride: Annotated[int, annotated_types.Ge(1)] = 1
    wall_time: bool = True


class SimulationConfig(MarshableModel):
    """A complete simulation description."""

    geometry: GeometryConfig
    material: OrthotropicBase
    gradation: GradationSpec = GradationSpec()
    phasefield: PhaseFieldParams = PhaseFieldParams()
    schedule: LoadSchedule
    mesh: MeshConfig = MeshConfig()
    recovery: MlsConfig = MlsConfig()
    boundary: BoundaryConditions
    solver: SolverConfig = SolverConfig()
    output: OutputConfig = OutputConfig()

    @property
    def finest_size(self) -> float:
        """Side of a cell at the maximum refinement depth (mm)."""
        return self.geometry.root_size / 2**self.mesh.max_depth

    def resolved(self) -> "SimulationConfig":
        """Return a copy with every derived default filled in."""
        phasefield = self.phasefield
        if phasefield.ell0 is None:
            phasefield = phasefield.model_copy(update={"ell0": 2.0 * self.finest_size})

        schedule = self.schedule
        if schedule.displacement_increment is None:
            schedule = schedule.model_copy(
                update={"displacement_increment": 1e-4 * self.geometry.height}
            )

        gradation = self.gradation
        if gradation.direction is not GradingDirection.NONE:
            axis = 0 if gradation.direction is GradingDirection.X else 1
            update: dict[str, float] = {}
            if gradation.reference_length is None:
                update["reference_length"] = (self.geometry.width, self.geometry.height)[
                    axis
                ]
            if gradation.origin is None:
                update["origin"] = self.geometry.origin[axis]
            gradation = gradation.model_copy(update=update)

        return self.model_copy(
            update={
                "phasefield": phasefield,
                "schedule": schedule,
                "gradation": gradation,
            }
        )

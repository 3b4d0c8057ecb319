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


"""Configuration and record models."""

from . import config_model, material_model, record_model
from ._base_model import MarshableModel
from .config_model import (
    BoundaryConditions,
    DirichletBC,
    Edge,
    GeometryConfig,
    LoadSchedule,
    MeshConfig,
    MlsConfig,
    NeumannBC,
    OutputConfig,
    PhaseFieldParams,
    SimulationConfig,
    SolverConfig,
)
from .material_model import EffectiveLame, GradationSpec, GradingDirection, OrthotropicBase
from .record_model import BenchCase, BenchReport, PhaseTimings, StepRecord

__all__ = [
    "BenchCase",
    "BenchReport",
    "BoundaryConditions",
    "DirichletBC",
    "Edge",
    "EffectiveLame",
    "GeometryConfig",
    "GradationSpec",
    "GradingDirection",
    "LoadSchedule",
    "MarshableModel",
    "MeshConfig",
    "MlsConfig",
    "NeumannBC",
    "OrthotropicBase",
    "OutputConfig",
    "PhaseFieldParams",
    "PhaseTimings",
    "SimulationConfig",
    "SolverConfig",
    "StepRecord",
    "config_model",
    "material_model",
    "record_model",
]

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


"""Adaptive phase-field fracture of functionally graded orthotropic plates."""

from . import errors, models
from .io import parse_config
from .material import GradedMaterial
from .mesh import QuadtreeMesh, build_initial
from .solver import Simulation, SimulationResult, SolutionState, run_simulation
from .bench import run_bench


try:
    from ._version import __version__
except ImportError:  # pragma: no cover
    from importlib.metadata import version, PackageNotFoundError

    try:
        __version__ = version("orthofrac")
    except PackageNotFoundError:
        __version__ = "dev"


__all__ = [
    "__version__",
    "errors",
    "models",
    "parse_config",
    "GradedMaterial",
    "QuadtreeMesh",
    "Simulation",
    "SimulationResult",
    "SolutionState",
    "build_initial",
    "run_bench",
    "run_simulation",
]

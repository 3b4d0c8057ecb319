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


from pathlib import Path

import numpy as np
import pytest
import yaml
from orthofrac.material import GradedMaterial
from orthofrac.mesh import balance_2to1, build_initial, refine
from orthofrac.mesh.quadtree import QuadtreeCell
from orthofrac.models import (
    GradationSpec,
    MeshConfig,
    OrthotropicBase,
    SimulationConfig,
)
from orthofrac.solver import Discretization

ISOTROPIC_E = 1000.0
ISOTROPIC_NU = 0.25


def isotropic_base(e=ISOTROPIC_E, nu=ISOTROPIC_NU, gc=1.0, theta=0.0):
    return OrthotropicBase(
        e1=e, e2=e, g12=e / (2.0 * (1.0 + nu)), nu12=nu, gc=gc, theta=theta
    )


@pytest.fixture
def orthotropic_data():
    """Orthotropic constants of the edge-crack validation specimen."""
    return {
        "e1": 114800.0,
        "e2": 11700.0,
        "g12": 9660.0,
        "nu12": 0.21,
        "gc": 2.7,
    }


@pytest.fixture
def config_data(tmp_path):
    """A small, fast tension specimen without a notch."""
    return {
        "geometry": {"width": 1.0, "height": 1.0},
        "material": {
            "e1": ISOTROPIC_E,
            "e2": ISOTROPIC_E,
            "g12": ISOTROPIC_E / (2.0 * (1.0 + ISOTROPIC_NU)),
            "nu12": ISOTROPIC_NU,
            "gc": 1.0,
        },
        "schedule": {"displacement-increment": 1e-6, "steps": 2},
        "mesh": {"base-level": 1, "max-depth": 2, "adaptive": False},
        "boundary": {
            "dirichlet": [
                {"edge": "bottom", "component": "y"},
                {"point": [0.0, 0.0], "component": "x"},
                {"edge": "top", "component": "y", "loaded": True},
            ]
        },
        "output": {"directory": str(tmp_path / "results"), "wall-time": False},
    }


@pytest.fixture
def config(config_data):
    return SimulationConfig.unmarshal(config_data).resolved()


@pytest.fixture
def config_file(tmp_path, config_data) -> Path:
    path = tmp_path / "specimen.yaml"
    path.write_text(yaml.safe_dump(config_data, sort_keys=False))
    return path


@pytest.fixture
def unit_mesh():
    """Uniform mesh factory on the unit square."""

    def _mesh(level, notch=None):
        return build_initial(1.0, 1.0, level, notch=notch)

    return _mesh


@pytest.fixture
def hanging_mesh(unit_mesh):
    """Level 1 mesh with its lower-left cell split, giving two 5-node polygons."""
    return balance_2to1(refine(unit_mesh(1), {QuadtreeCell(1, 0, 0)}))


@pytest.fixture
def discretize():
    """Discretize a mesh with an isotropic material."""

    def _discretize(mesh, base=None, theta=0.0):
        material = GradedMaterial(base or isotropic_base(theta=theta), GradationSpec())
        return Discretization.build(mesh, material, MeshConfig())

    return _discretize


@pytest.fixture
def rng():
    return np.random.default_rng(20260)

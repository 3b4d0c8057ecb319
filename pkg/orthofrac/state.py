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

"""Primary unknowns of the staggered scheme."""

import dataclasses

import numpy as np
import numpy.typing as npt


@dataclasses.dataclass(frozen=True)
class SolutionState:
    """Displacement, phase field and history on one mesh.

    :ivar u: nodal displacements ``(ux0, uy0, ux1, ...)`` (mm).
    :ivar phi: nodal phase field in [0, 1].
    :ivar history: tensile energy history per quadrature point (MPa).
    """

    u: npt.NDArray[np.float64]
    phi: npt.NDArray[np.float64]
    history: npt.NDArray[np.float64]

    @classmethod
    def zeros(cls, n_nodes: int, n_points: int) -> "SolutionState":
        """Return the undeformed, undamaged state."""
        return cls(u=np.zeros(2 * n_nodes), phi=np.zeros(n_nodes), history=np.zeros(n_points))

    @property
    def displacement(self) -> npt.NDArray[np.float64]:
        """Displacements as an ``(n_nodes, 2)`` view."""
        return self.u.reshape(-1, 2)

    def replace(self, **changes: npt.NDArray[np.float64]) -> "SolutionState":
        return dataclasses.replace(self, **changes)

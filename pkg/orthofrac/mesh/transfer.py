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

"""Carry a solution state from a mesh to one of its refinements."""

import logging
from collections import defaultdict

import numpy as np
import numpy.typing as npt

from orthofrac import errors
from orthofrac.elements import MeshQuadrature, make_element
from orthofrac.mesh.quadtree import QuadtreeMesh
from orthofrac.state import SolutionState

logger = logging.getLogger(__name__)


def _parent_elements(old_mesh: QuadtreeMesh, new_mesh: QuadtreeMesh) -> list[int]:
    """Return, for every new element, the old element containing it."""
    parents = []
    for cell in new_mesh.cells:
        leaf = old_mesh.leaf_covering(cell)
        if leaf is None:
            raise errors.MeshTransferError((cell.level, cell.i, cell.j))
        parents.append(old_mesh.element_index[leaf])
    return parents


def _interpolate(
    old_mesh: QuadtreeMesh,
    groups: dict[int, list[int]],
    points: npt.NDArray[np.float64],
    nodal: npt.NDArray[np.float64],
) -> npt.NDArray[np.float64]:
    """Evaluate old nodal fields at ``points``, grouped by containing old element.

    :param nodal: old nodal values, shape ``(n_old_nodes, k)``.
    """
    values = np.zeros((len(points), nodal.shape[1]))
    for old_index, members in groups.items():
        element = make_element(old_mesh.element_coordinates(old_index))
        shape = element.shape(points[members]).n
        values[members] = shape @ nodal[list(old_mesh.elements[old_index].nodes)]
    return values


def project_to_nodes(
    quadrature: MeshQuadrature, values: npt.ArrayLike
) -> npt.NDArray[np.float64]:
    """Lumped L2 projection of quadrature point values onto the nodes.

    ``v_i = sum(w N_i v) / sum(w N_i)``, which reproduces constants.
    """
    values = np.asarray(values, dtype=np.float64)
    numerator = np.zeros(quadrature.n_nodes)
    denominator = np.zeros(quadrature.n_nodes)
    for block in quadrature.blocks:
        weighted = block.n * block.weights[..., None]
        np.add.at(numerator, block.conn, np.einsum("eqm,eq->em", weighted, values[block.qp_index]))
        np.add.at(denominator, block.conn, weighted.sum(axis=1))
    projected = np.zeros(quadrature.n_nodes)
    used = denominator > 0.0
    projected[used] = numerator[used] / denominator[used]
    return projected


def transfer_state(
    old_mesh: QuadtreeMesh,
    old_state: SolutionState,
    new_mesh: QuadtreeMesh,
    *,
    old_quadrature: MeshQuadrature,
    new_quadrature: MeshQuadrature,
) -> SolutionState:
    """Interpolate ``u`` and ``phi`` and carry the history to a refined mesh.

    Nodal fields are evaluated at the new nodes with the old shape functions.
    History values of elements whose cell and node count are unchanged are
    copied; elsewhere the history is projected to the old nodes and
    interpolated at the new quadrature points, never below zero.

    :raises errors.MeshTransferError: if ``new_mesh`` does not refine ``old_mesh``.
    """
    parents = _parent_elements(old_mesh, new_mesh)

    # Each new node is located through the first new element using it, so
    # notch slit copies are evaluated on their own crack face.
    owner = np.full(new_mesh.n_nodes, -1, dtype=np.intp)
    for index, element in enumerate(new_mesh.elements):
        for node in element.nodes:
            if owner[node] < 0:
                owner[node] = index
    node_groups: dict[int, list[int]] = defaultdict(list)
    for node, element_index in enumerate(owner):
        node_groups[parents[element_index]].append(node)

    old_nodal = np.column_stack([old_state.displacement, old_state.phi])
    new_nodal = _interpolate(old_mesh, node_groups, new_mesh.nodes, old_nodal)

    history = np.zeros(new_quadrature.n_points)
    point_groups: dict[int, list[int]] = defaultdict(list)
    copied = 0
    for index, element in enumerate(new_mesh.elements):
        old_index = parents[index]
        old_element = old_mesh.elements[old_index]
        new_points = new_quadrature.element_points(index)
        if old_element.cell == element.cell and old_element.n_nodes == element.n_nodes:
            history[new_points] = old_state.history[old_quadrature.element_points(old_index)]
            copied += 1
        else:
            point_groups[old_index].extend(range(new_points.start, new_points.stop))

    if point_groups:
        old_history_nodes = project_to_nodes(old_quadrature, old_state.history)
        projected = _interpolate(
            old_mesh, point_groups, new_quadrature.points, old_history_nodes[:, None]
        )[:, 0]
        moved = np.concatenate([np.asarray(m, dtype=np.intp) for m in point_groups.values()])
        history[moved] = np.maximum(projected[moved], 0.0)

    logger.debug(
        "Transferred state to %d nodes; history copied on %d of %d elements.",
        new_mesh.n_nodes,
        copied,
        new_mesh.n_elements,
    )
    return SolutionState(
        u=new_nodal[:, :2].reshape(-1).copy(),
        phi=np.clip(new_nodal[:, 2], 0.0, 1.0),
        history=history,
    )

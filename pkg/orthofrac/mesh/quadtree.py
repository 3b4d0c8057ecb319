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

"""Linear quadtree over a rectangle of square root cells.

A mesh is the set of its leaf cells; interior cells are implied by their
descendants. Nodes and elements are derived from the leaves on first use
and never change afterwards, so every refinement returns a new mesh.
"""

import dataclasses
import enum
import functools
import logging
import math
from collections.abc import Iterable, Iterator, Sequence

import numpy as np
import numpy.typing as npt

from orthofrac import errors
from orthofrac.models.config_model import Edge

logger = logging.getLogger(__name__)

Point = tuple[float, float]

_EDGE_OFFSETS = {
    Edge.BOTTOM: (0, -1),
    Edge.RIGHT: (1, 0),
    Edge.TOP: (0, 1),
    Edge.LEFT: (-1, 0),
}

_OPPOSITE = {
    Edge.BOTTOM: Edge.TOP,
    Edge.RIGHT: Edge.LEFT,
    Edge.TOP: Edge.BOTTOM,
    Edge.LEFT: Edge.RIGHT,
}

# Child positions (di, dj) touching each edge of the parent.
_EDGE_CHILDREN = {
    Edge.BOTTOM: ((0, 0), (1, 0)),
    Edge.RIGHT: ((1, 0), (1, 1)),
    Edge.TOP: ((1, 1), (0, 1)),
    Edge.LEFT: ((0, 1), (0, 0)),
}

# Counter-clockwise edge order used for element node lists.
_CCW_EDGES = (Edge.BOTTOM, Edge.RIGHT, Edge.TOP, Edge.LEFT)

_GEOMETRY_TOLERANCE = 1e-9


@dataclasses.dataclass(frozen=True, order=True)
class QuadtreeCell:
    """A square cell addressed by its level and integer position.

    At level ``l`` the cell ``(i, j)`` spans ``[i, i+1] x [j, j+1]`` in units
    of ``root_size / 2**l`` from the domain origin.
    """

    level: int
    i: int
    j: int

    @property
    def parent(self) -> "QuadtreeCell | None":
        """The enclosing cell one level up, or None for a root cell."""
        if self.level == 0:
            return None
        return QuadtreeCell(self.level - 1, self.i // 2, self.j // 2)

    @property
    def children(self) -> tuple["QuadtreeCell", ...]:
        """The four children in counter-clockwise order from lower-left."""
        level, i, j = self.level + 1, 2 * self.i, 2 * self.j
        return (
            QuadtreeCell(level, i, j),
            QuadtreeCell(level, i + 1, j),
            QuadtreeCell(level, i + 1, j + 1),
            QuadtreeCell(level, i, j + 1),
        )

    def ancestors(self) -> Iterator["QuadtreeCell"]:
        """Yield the parent chain up to the root."""
        cell = self.parent
        while cell is not None:
            yield cell
            cell = cell.parent

    def neighbor(self, edge: Edge) -> "QuadtreeCell":
        """Return the same-level cell across ``edge``; it may lie outside the domain."""
        di, dj = _EDGE_OFFSETS[edge]
        return QuadtreeCell(self.level, self.i + di, self.j + dj)

    def edge_children(self, edge: Edge) -> tuple["QuadtreeCell", "QuadtreeCell"]:
        """Return the two children touching ``edge``."""
        level, i, j = self.level + 1, 2 * self.i, 2 * self.j
        first, second = _EDGE_CHILDREN[edge]
        return (
            QuadtreeCell(level, i + first[0], j + first[1]),
            QuadtreeCell(level, i + second[0], j + second[1]),
        )

    def contains(self, other: "QuadtreeCell") -> bool:
        """Return True if ``other`` is this cell or one of its descendants."""
        if other.level < self.level:
            return False
        shift = other.level - self.level
        return other.i >> shift == self.i and other.j >> shift == self.j


class ElementKind(str, enum.Enum):
    """Finite element type of a leaf."""

    QUAD = "quad"
    POLYGON = "polygon"


@dataclasses.dataclass(frozen=True)
class MeshElement:
    """One leaf cell seen as a finite element.

    :ivar nodes: node ids, counter-clockwise from the lower-left corner, with
        the mid-edge node of every hanging edge between its corners.
    :ivar cell: the leaf cell.
    :ivar kind: quad for 4 nodes, polygon otherwise.
    :ivar hanging: whether the bottom, right, top and left edges carry a
        mid-edge node.
    """

    nodes: tuple[int, ...]
    cell: QuadtreeCell
    kind: ElementKind
    hanging: tuple[bool, bool, bool, bool]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)


@dataclasses.dataclass(frozen=True)
class ErrorMap:
    """Element error indicator of one mesh.

    :ivar cells: leaf cell of every element, in element order.
    :ivar element_errors: error norm per element.
    :ivar global_error: root of the summed squared element errors.
    """

    cells: tuple[QuadtreeCell, ...]
    element_errors: npt.NDArray[np.float64]
    global_error: float


@dataclasses.dataclass(frozen=True)
class _Topology:
    nodes: npt.NDArray[np.float64]
    elements: tuple[MeshElement, ...]
    node_side: npt.NDArray[np.int8]


class QuadtreeMesh:
    """A 2:1-balanceable quadtree mesh of a rectangular domain.

    :param origin: lower-left corner of the domain (mm).
    :param root_size: side of the square root cells (mm).
    :param roots: number of root cells along x and y.
    :param leaves: the leaf cells.
    :param notch: optional notch polyline; mesh nodes on it are split into
        one copy per crack face.
    """

    def __init__(
        self,
        *,
        origin: Point,
        root_size: float,
        roots: tuple[int, int],
        leaves: Iterable[QuadtreeCell],
        notch: Sequence[Point] | None = None,
    ) -> None:
        self.origin = (float(origin[0]), float(origin[1]))
        self.root_size = float(root_size)
        self.roots = roots
        self.leaves = frozenset(leaves)
        self.notch: tuple[Point, ...] | None = (
            tuple((float(x), float(y)) for x, y in notch) if notch else None
        )

    def __repr__(self) -> str:
        return (
            f"QuadtreeMesh(leaves={len(self.leaves)}, "
            f"levels={self.min_level}..{self.max_level})"
        )

    def with_leaves(self, leaves: Iterable[QuadtreeCell]) -> "QuadtreeMesh":
        """Return a mesh of the same domain with a different leaf set."""
        return QuadtreeMesh(
            origin=self.origin,
            root_size=self.root_size,
            roots=self.roots,
            leaves=leaves,
            notch=self.notch,
        )

    @property
    def width(self) -> float:
        return self.roots[0] * self.root_size

    @property
    def height(self) -> float:
        return self.roots[1] * self.root_size

    @functools.cached_property
    def cells(self) -> tuple[QuadtreeCell, ...]:
        """Leaves in element order (by level, then row, then column)."""
        return tuple(sorted(self.leaves, key=lambda c: (c.level, c.j, c.i)))

    @functools.cached_property
    def internal(self) -> frozenset[QuadtreeCell]:
        """Cells that have children."""
        internal: set[QuadtreeCell] = set()
        for leaf in self.leaves:
            for ancestor in leaf.ancestors():
                if ancestor in internal:
                    break
                internal.add(ancestor)
        return frozenset(internal)

    @property
    def min_level(self) -> int:
        return min(cell.level for cell in self.leaves)

    @property
    def max_level(self) -> int:
        return max(cell.level for cell in self.leaves)

    def in_domain(self, cell: QuadtreeCell) -> bool:
        """Return True if ``cell`` lies inside the domain."""
        scale = 1 << cell.level
        return 0 <= cell.i < self.roots[0] * scale and 0 <= cell.j < self.roots[1] * scale

    def cell_size(self, level: int) -> float:
        """Side of a cell at ``level`` (mm)."""
        return self.root_size / 2**level

    def cell_bounds(self, cell: QuadtreeCell) -> tuple[float, float, float, float]:
        """Return ``(xmin, ymin, xmax, ymax)`` of ``cell``."""
        size = self.cell_size(cell.level)
        x0 = self.origin[0] + cell.i * size
        y0 = self.origin[1] + cell.j * size
        return x0, y0, x0 + size, y0 + size

    def leaf_covering(self, cell: QuadtreeCell) -> QuadtreeCell | None:
        """Return the leaf equal to or enclosing ``cell``, if any."""
        candidate: QuadtreeCell | None = cell
        while candidate is not None:
            if candidate in self.leaves:
                return candidate
            candidate = candidate.parent
        return None

    @functools.cached_property
    def _topology(self) -> _Topology:
        return _build_topology(self)

    @property
    def nodes(self) -> npt.NDArray[np.float64]:
        """Node coordinates, shape ``(n_nodes, 2)``."""
        return self._topology.nodes

    @property
    def elements(self) -> tuple[MeshElement, ...]:
        """Elements in the order of :attr:`cells`."""
        return self._topology.elements

    @property
    def node_side(self) -> npt.NDArray[np.int8]:
        """Crack face of every node: +1 or -1 on the notch slit, else 0."""
        return self._topology.node_side

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.leaves)

    @property
    def n_dofs(self) -> int:
        """Number of displacement unknowns."""
        return 2 * self.n_nodes

    @functools.cached_property
    def element_index(self) -> dict[QuadtreeCell, int]:
        """Map from leaf cell to element index."""
        return {cell: index for index, cell in enumerate(self.cells)}

    def element_coordinates(self, index: int) -> npt.NDArray[np.float64]:
        """Node coordinates of element ``index``, shape ``(m, 2)``."""
        return self.nodes[list(self.elements[index].nodes)]

    @functools.cached_property
    def element_centroids(self) -> npt.NDArray[np.float64]:
        """Cell centres, shape ``(n_elements, 2)``."""
        return np.array(
            [
                (0.5 * (x0 + x1), 0.5 * (y0 + y1))
                for x0, y0, x1, y1 in map(self.cell_bounds, self.cells)
            ]
        ).reshape(-1, 2)

    @functools.cached_property
    def element_diameters(self) -> npt.NDArray[np.float64]:
        """Cell diagonals (mm)."""
        return np.array(
            [math.sqrt(2.0) * self.cell_size(cell.level) for cell in self.cells]
        )

    def element_areas(self) -> npt.NDArray[np.float64]:
        """Cell areas (mm^2)."""
        return np.array([self.cell_size(cell.level) ** 2 for cell in self.cells])

    def boundary_nodes(self, edge: Edge) -> npt.NDArray[np.intp]:
        """Return the ids of nodes on one side of the domain."""
        axis, value = self._edge_line(edge)
        tolerance = _GEOMETRY_TOLERANCE * self.root_size
        return np.flatnonzero(np.abs(self.nodes[:, axis] - value) <= tolerance)

    def boundary_segments(self, edge: Edge) -> npt.NDArray[np.intp]:
        """Return element edges on one side of the domain, shape ``(k, 2)``."""
        on_edge = np.zeros(self.n_nodes, dtype=bool)
        on_edge[self.boundary_nodes(edge)] = True
        segments = [
            (a, b)
            for element in self.elements
            for a, b in zip(element.nodes, element.nodes[1:] + element.nodes[:1])
            if on_edge[a] and on_edge[b]
        ]
        return np.array(segments, dtype=np.intp).reshape(-1, 2)

    def _edge_line(self, edge: Edge) -> tuple[int, float]:
        if edge is Edge.BOTTOM:
            return 1, self.origin[1]
        if edge is Edge.TOP:
            return 1, self.origin[1] + self.height
        if edge is Edge.LEFT:
            return 0, self.origin[0]
        return 0, self.origin[0] + self.width

    def side_of(self, points: npt.ArrayLike) -> npt.NDArray[np.int8]:
        """Return the side (+1 or -1) of the nearest notch segment for each point.

        Points on the notch line, and all points of a mesh without a notch,
        get 0.
        """
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if self.notch is None:
            return np.zeros(len(points), dtype=np.int8)
        vertices = np.asarray(self.notch)
        starts, ends = vertices[:-1], vertices[1:]
        directions = ends - starts
        offsets = points[:, None, :] - starts[None, :, :]
        lengths2 = np.einsum("sk,sk->s", directions, directions)
        t = np.clip(np.einsum("psk,sk->ps", offsets, directions) / lengths2, 0.0, 1.0)
        gaps = offsets - t[..., None] * directions[None, :, :]
        nearest = np.argmin(np.einsum("psk,psk->ps", gaps, gaps), axis=1)
        rows = np.arange(len(points))
        cross = (
            directions[nearest, 0] * offsets[rows, nearest, 1]
            - directions[nearest, 1] * offsets[rows, nearest, 0]
        )
        tolerance = _GEOMETRY_TOLERANCE * self.root_size**2
        cross[np.abs(cross) <= tolerance] = 0.0
        return np.sign(cross).astype(np.int8)


def build_initial(
    width: float,
    height: float,
    base_level: int,
    *,
    origin: Point = (0.0, 0.0),
    notch: Sequence[Point] | None = None,
) -> QuadtreeMesh:
    """Return a uniform mesh at ``base_level`` covering the domain.

    :raises errors.MeshError: for a degenerate domain or a negative level.
    """
    if width <= 0.0 or height <= 0.0:
        raise errors.MeshError(f"Domain must have positive size, got {width} x {height}.")
    if base_level < 0:
        raise errors.MeshError(f"Base level must be non-negative, got {base_level}.")
    root_size = min(width, height)
    nx, ny = round(width / root_size), round(height / root_size)
    if not math.isclose(nx * root_size, width) or not math.isclose(ny * root_size, height):
        raise errors.MeshError(
            f"Domain {width} x {height} cannot be tiled by square root cells.",
            resolution="Use an integer aspect ratio.",
        )

    scale = 1 << base_level
    leaves = (
        QuadtreeCell(base_level, i, j) for i in range(nx * scale) for j in range(ny * scale)
    )
    mesh = QuadtreeMesh(
        origin=origin, root_size=root_size, roots=(nx, ny), leaves=leaves, notch=notch
    )
    logger.debug("Built initial mesh with %d cells at level %d.", mesh.n_elements, base_level)
    return mesh


def refine(mesh: QuadtreeMesh, cells_to_split: Iterable[QuadtreeCell]) -> QuadtreeMesh:
    """Split every given leaf into four children.

    :raises errors.RefinementError: if a cell is not a leaf of ``mesh``.
    """
    cells = set(cells_to_split)
    if not cells:
        return mesh
    for cell in sorted(cells):
        if cell not in mesh.leaves:
            raise errors.RefinementError((cell.level, cell.i, cell.j))

    leaves = set(mesh.leaves - cells)
    for cell in cells:
        leaves.update(cell.children)
    return mesh.with_leaves(leaves)


def _unbalanced_leaves(mesh: QuadtreeMesh) -> list[QuadtreeCell]:
    """Return leaves with a neighbour more than one level finer."""
    internal = mesh.internal
    violating = []
    for leaf in mesh.leaves:
        for edge in _CCW_EDGES:
            neighbor = leaf.neighbor(edge)
            if neighbor not in internal:
                continue
            if any(child in internal for child in neighbor.edge_children(_OPPOSITE[edge])):
                violating.append(leaf)
                break
    return sorted(violating)


def balance_2to1(mesh: QuadtreeMesh) -> QuadtreeMesh:
    """Split coarse leaves until edge neighbours differ by at most one level.

    A mesh that is already balanced is returned as is.
    """
    passes = 0
    while violating := _unbalanced_leaves(mesh):
        mesh = refine(mesh, violating)
        passes += 1
        logger.debug("Balance pass %d split %d cells.", passes, len(violating))
    return mesh


def audit_balance(mesh: QuadtreeMesh) -> list[tuple[QuadtreeCell, QuadtreeCell]]:
    """Return every edge-adjacent leaf pair whose levels differ by more than one.

    This is a brute-force geometric check independent of the neighbour
    arithmetic used by :func:`balance_2to1`.
    """
    cells = mesh.cells
    top = mesh.max_level
    levels = np.array([cell.level for cell in cells])
    span = np.left_shift(1, top - levels)
    x0 = np.array([cell.i for cell in cells]) * span
    y0 = np.array([cell.j for cell in cells]) * span
    x1, y1 = x0 + span, y0 + span

    overlap_x = np.minimum(x1[:, None], x1[None, :]) - np.maximum(x0[:, None], x0[None, :])
    overlap_y = np.minimum(y1[:, None], y1[None, :]) - np.maximum(y0[:, None], y0[None, :])
    touch_x = (x1[:, None] == x0[None, :]) | (x0[:, None] == x1[None, :])
    touch_y = (y1[:, None] == y0[None, :]) | (y0[:, None] == y1[None, :])
    adjacent = (touch_x & (overlap_y > 0)) | (touch_y & (overlap_x > 0))
    jump = np.abs(levels[:, None] - levels[None, :]) > 1
    first, second = np.nonzero(np.triu(adjacent & jump))
    return [(cells[a], cells[b]) for a, b in zip(first, second)]


def extract_elements(mesh: QuadtreeMesh) -> tuple[MeshElement, ...]:
    """Return one element per leaf, counter-clockwise, hanging nodes included.

    :raises errors.UnbalancedMeshError: if the mesh violates the 2:1 rule.
    """
    return mesh.elements


def flag_by_error(error_map: ErrorMap, tol: float) -> set[QuadtreeCell]:
    """Return the leaves whose element error exceeds ``tol``."""
    over = np.flatnonzero(error_map.element_errors > tol)
    return {error_map.cells[index] for index in over}


def _build_topology(mesh: QuadtreeMesh) -> _Topology:
    violating = _unbalanced_leaves(mesh)
    if violating:
        cell = violating[0]
        raise errors.UnbalancedMeshError((cell.level, cell.i, cell.j))

    # Node positions are integers on the lattice one level below the finest leaf.
    lattice = mesh.max_level + 1
    internal = mesh.internal
    element_keys: list[list[tuple[int, int]]] = []
    hanging_flags: list[tuple[bool, bool, bool, bool]] = []
    for cell in mesh.cells:
        span = 1 << (lattice - cell.level)
        half = span // 2
        x0, y0 = cell.i * span, cell.j * span
        corners = [(x0, y0), (x0 + span, y0), (x0 + span, y0 + span), (x0, y0 + span)]
        mids = [
            (x0 + half, y0),
            (x0 + span, y0 + half),
            (x0 + half, y0 + span),
            (x0, y0 + half),
        ]
        hanging = tuple(cell.neighbor(edge) in internal for edge in _CCW_EDGES)
        keys = []
        for corner, mid, split in zip(corners, mids, hanging):
            keys.append(corner)
            if split:
                keys.append(mid)
        element_keys.append(keys)
        hanging_flags.append(hanging)  # type: ignore[arg-type]

    unique = sorted({key for keys in element_keys for key in keys}, key=lambda k: (k[1], k[0]))
    node_ids = {key: index for index, key in enumerate(unique)}
    spacing = mesh.root_size / 2**lattice
    nodes = np.asarray(unique, dtype=np.float64).reshape(-1, 2) * spacing
    nodes += np.asarray(mesh.origin)
    connectivity = [[node_ids[key] for key in keys] for keys in element_keys]

    node_side = np.zeros(len(nodes), dtype=np.int8)
    if mesh.notch is not None:
        nodes, connectivity, node_side = _split_notch(mesh, nodes, connectivity)

    elements = tuple(
        MeshElement(
            nodes=tuple(conn),
            cell=cell,
            kind=ElementKind.QUAD if len(conn) == 4 else ElementKind.POLYGON,
            hanging=hanging,
        )
        for conn, cell, hanging in zip(connectivity, mesh.cells, hanging_flags)
    )
    return _Topology(nodes=nodes, elements=elements, node_side=node_side)


def _notch_cuts_cells(mesh: QuadtreeMesh) -> bool:
    """Return True if the notch passes through the interior of any leaf."""
    assert mesh.notch is not None
    bounds = np.array([mesh.cell_bounds(cell) for cell in mesh.cells])
    lower, upper = bounds[:, :2], bounds[:, 2:]
    tolerance = _GEOMETRY_TOLERANCE * mesh.root_size
    for start, end in zip(mesh.notch[:-1], mesh.notch[1:]):
        p = np.asarray(start)
        d = np.asarray(end) - p
        t_min = np.zeros(len(bounds))
        t_max = np.ones(len(bounds))
        inside = np.ones(len(bounds), dtype=bool)
        for axis in range(2):
            if abs(d[axis]) <= tolerance:
                inside &= (p[axis] > lower[:, axis] + tolerance) & (
                    p[axis] < upper[:, axis] - tolerance
                )
                continue
            t0 = (lower[:, axis] - p[axis]) / d[axis]
            t1 = (upper[:, axis] - p[axis]) / d[axis]
            t_min = np.maximum(t_min, np.minimum(t0, t1))
            t_max = np.minimum(t_max, np.maximum(t0, t1))
        length = (t_max - t_min) * np.linalg.norm(d)
        if np.any(inside & (length > tolerance)):
            return True
    return False


def _split_notch(
    mesh: QuadtreeMesh,
    nodes: npt.NDArray[np.float64],
    connectivity: list[list[int]],
) -> tuple[npt.NDArray[np.float64], list[list[int]], npt.NDArray[np.int8]]:
    """Duplicate nodes on the notch faces, excluding the tip."""
    assert mesh.notch is not None
    node_side = np.zeros(len(nodes), dtype=np.int8)
    if _notch_cuts_cells(mesh):
        logger.warning(
            "Notch %s is not aligned with cell edges; no slit is created.",
            list(mesh.notch),
        )
        return nodes, connectivity, node_side

    tolerance = _GEOMETRY_TOLERANCE * mesh.root_size
    vertices = np.asarray(mesh.notch)
    on_notch = np.zeros(len(nodes), dtype=bool)
    for start, end in zip(vertices[:-1], vertices[1:]):
        direction = end - start
        t = np.clip((nodes - start) @ direction / (direction @ direction), 0.0, 1.0)
        gap = nodes - (start + t[:, None] * direction)
        on_notch |= np.hypot(gap[:, 0], gap[:, 1]) <= tolerance
    tip = vertices[-1]
    on_notch &= np.hypot(*(nodes - tip).T) > tolerance

    element_side = mesh.side_of(mesh.element_centroids)
    copies: dict[int, int] = {}
    extra: list[npt.NDArray[np.float64]] = []
    for conn, side in zip(connectivity, element_side):
        if side >= 0:
            continue
        for position, node in enumerate(conn):
            if not on_notch[node]:
                continue
            if node not in copies:
                copies[node] = len(nodes) + len(extra)
                extra.append(nodes[node])
            conn[position] = copies[node]

    node_side[list(copies)] = 1
    node_side = np.concatenate([node_side, -np.ones(len(extra), dtype=np.int8)])
    if extra:
        nodes = np.vstack([nodes, np.asarray(extra)])
    logger.debug("Notch slit duplicated %d nodes.", len(extra))
    return nodes, connectivity, node_side

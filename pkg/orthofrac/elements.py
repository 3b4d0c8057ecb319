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

"""Bilinear quadrilaterals and mean-value polygons.

Leaves without hanging nodes are bilinear quads. Leaves with hanging nodes
are polygons whose shape functions are mean-value coordinates, integrated on
a fan of triangles around the polygon centroid.
"""

import dataclasses
import logging
from abc import ABCMeta, abstractmethod
from collections.abc import Hashable

import numpy as np
import numpy.typing as npt
from overrides import overrides

from orthofrac import errors
from orthofrac.mesh.quadtree import QuadtreeMesh

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

_REFERENCE_QUAD = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])

# Relative tolerances for vertex and edge detection.
_SNAP_TOLERANCE = 1e-12
_INVERSE_MAP_ITERATIONS = 25


@dataclasses.dataclass(frozen=True)
class ShapeEvaluation:
    """Shape functions evaluated at a set of points.

    :ivar n: values, shape ``(p, m)``.
    :ivar dn: physical gradients, shape ``(p, m, 2)`` (1/mm).
    :ivar weights: quadrature measure ``weight * detJ`` (mm^2), when the
        points form a quadrature rule.
    :ivar points: physical coordinates of the points, shape ``(p, 2)``.
    """

    n: FloatArray
    dn: FloatArray
    weights: FloatArray | None = None
    points: FloatArray | None = None


def _bilinear_reference(xi: FloatArray) -> tuple[FloatArray, FloatArray]:
    s, t = xi[..., 0:1], xi[..., 1:2]
    sa, ta = _REFERENCE_QUAD[:, 0], _REFERENCE_QUAD[:, 1]
    n = 0.25 * (1.0 + s * sa) * (1.0 + t * ta)
    dn = np.stack([0.25 * sa * (1.0 + t * ta), 0.25 * ta * (1.0 + s * sa)], axis=-1)
    return n, dn


def quad_shape(xi: npt.ArrayLike, coords: npt.ArrayLike | None = None) -> ShapeEvaluation:
    """Evaluate bilinear shape functions at reference points.

    :param xi: reference coordinates in ``[-1, 1]^2``, shape ``(2,)`` or ``(p, 2)``.
    :param coords: corner coordinates, counter-clockwise from lower-left; the
        reference square when omitted.
    :returns: values, physical gradients and ``detJ`` as ``weights``.
    :raises errors.DegenerateElementError: if the Jacobian is singular.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=np.float64))
    corners = _REFERENCE_QUAD if coords is None else np.asarray(coords, dtype=np.float64)
    n, dn_ref = _bilinear_reference(xi)
    jacobian = np.einsum("paj,ai->pij", dn_ref, corners)
    det = np.linalg.det(jacobian)
    scale = np.ptp(corners, axis=0).max() ** 2
    if np.any(det <= _SNAP_TOLERANCE * scale):
        raise errors.DegenerateElementError(
            f"Quadrilateral {corners.tolist()} has a non-positive Jacobian."
        )
    dn = np.einsum("paj,pji->pai", dn_ref, np.linalg.inv(jacobian))
    return ShapeEvaluation(n=n, dn=dn, weights=det, points=n @ corners)


def inverse_quad_map(coords: npt.ArrayLike, point: npt.ArrayLike) -> FloatArray:
    """Return the reference coordinates of physical points in a quadrilateral.

    Parallelograms are inverted exactly; general quadrilaterals by Newton
    iteration.

    :param point: one point, shape ``(2,)``, or several, shape ``(p, 2)``.
    :raises errors.PointOutsideElementError: if a point is not in the element.
    """
    corners = np.asarray(coords, dtype=np.float64)
    targets = np.atleast_2d(np.asarray(point, dtype=np.float64))
    size = np.ptp(corners, axis=0).max()
    centre = corners.mean(axis=0)
    affine = np.allclose(corners[0] + corners[2], corners[1] + corners[3], atol=1e-12 * size)
    if affine:
        jacobian = 0.5 * np.column_stack([corners[1] - corners[0], corners[3] - corners[0]])
        xi = np.linalg.solve(jacobian, (targets - centre).T).T
    else:
        xi = np.zeros_like(targets)
        for row, target in enumerate(targets):
            for _ in range(_INVERSE_MAP_ITERATIONS):
                n, dn_ref = _bilinear_reference(xi[row][None, :])
                residual = n[0] @ corners - target
                step = np.linalg.solve(corners.T @ dn_ref[0], -residual)
                xi[row] += step
                if np.max(np.abs(step)) < _SNAP_TOLERANCE:
                    break
    outside = np.any(np.abs(xi) > 1.0 + 1e-9, axis=1)
    if np.any(outside):
        raise errors.PointOutsideElementError(targets[np.argmax(outside)])
    xi = np.clip(xi, -1.0, 1.0)
    return xi[0] if np.ndim(point) == 1 else xi


def polygon_area(vertices: npt.ArrayLike) -> float:
    """Signed shoelace area, positive for counter-clockwise vertices."""
    v = np.asarray(vertices, dtype=np.float64)
    nxt = np.roll(v, -1, axis=0)
    return 0.5 * float(np.sum(v[:, 0] * nxt[:, 1] - nxt[:, 0] * v[:, 1]))


def polygon_centroid(vertices: npt.ArrayLike) -> FloatArray:
    """Area centroid of a simple polygon."""
    v = np.asarray(vertices, dtype=np.float64)
    nxt = np.roll(v, -1, axis=0)
    cross = v[:, 0] * nxt[:, 1] - nxt[:, 0] * v[:, 1]
    area = 0.5 * cross.sum()
    return ((v + nxt) * cross[:, None]).sum(axis=0) / (6.0 * area)


def mean_value_shape(x: npt.ArrayLike, vertices: npt.ArrayLike) -> ShapeEvaluation:
    """Evaluate mean-value coordinates and their gradients.

    ``w_i = (tan(a_{i-1}/2) + tan(a_i/2)) / |v_i - x|`` and ``N_i = w_i / sum w``.
    Half-angle tangents use ``tan(a/2) = 2A / (r r' + d.d')`` so that 180
    degree vertices stay finite. Points on a vertex get the Kronecker delta
    and points on an edge the linear interpolant; their gradients are
    returned as zero.

    :param x: evaluation points, shape ``(2,)`` or ``(p, 2)``.
    :param vertices: counter-clockwise polygon vertices, shape ``(m, 2)``.
    :raises errors.PointOutsideElementError: for a point outside the polygon.
    """
    points = np.atleast_2d(np.asarray(x, dtype=np.float64))
    v = np.asarray(vertices, dtype=np.float64)
    n_points, n_vertices = len(points), len(v)
    scale = np.ptp(v, axis=0).max()

    d = v[None, :, :] - points[:, None, :]
    r = np.hypot(d[..., 0], d[..., 1])
    d_next = np.roll(d, -1, axis=1)
    r_next = np.roll(r, -1, axis=1)
    two_area = d[..., 0] * d_next[..., 1] - d[..., 1] * d_next[..., 0]
    dot = np.einsum("pmk,pmk->pm", d, d_next)

    n = np.zeros((n_points, n_vertices))
    dn = np.zeros((n_points, n_vertices, 2))

    at_vertex = r.min(axis=1) <= _SNAP_TOLERANCE * scale
    on_edge_mask = (np.abs(two_area) <= _SNAP_TOLERANCE * scale**2) & (dot < 0.0)
    on_edge = on_edge_mask.any(axis=1) & ~at_vertex
    regular = ~(at_vertex | on_edge)

    for p in np.flatnonzero(at_vertex):
        n[p, np.argmin(r[p])] = 1.0
    for p in np.flatnonzero(on_edge):
        edge = int(np.argmax(on_edge_mask[p]))
        ratio = r[p, edge] / (r[p, edge] + r_next[p, edge])
        n[p, edge] = 1.0 - ratio
        n[p, (edge + 1) % n_vertices] = ratio

    if np.any(regular):
        d, d_next = d[regular], d_next[regular]
        r, r_next = r[regular], r_next[regular]
        two_area, dot = two_area[regular], dot[regular]

        winding = np.arctan2(two_area, dot).sum(axis=1)
        outside = winding < np.pi
        if np.any(outside):
            raise errors.PointOutsideElementError(points[regular][np.argmax(outside)])

        denominator = r * r_next + dot
        tangent = two_area / denominator
        tangent_sum = np.roll(tangent, 1, axis=1) + tangent
        w = tangent_sum / r

        grad_two_area = np.stack(
            [d[..., 1] - d_next[..., 1], d_next[..., 0] - d[..., 0]], axis=-1
        )
        grad_dot = -(d + d_next)
        grad_rr = -((r_next / r)[..., None] * d + (r / r_next)[..., None] * d_next)
        grad_tangent = (
            grad_two_area - tangent[..., None] * (grad_rr + grad_dot)
        ) / denominator[..., None]
        grad_w = (np.roll(grad_tangent, 1, axis=1) + grad_tangent) / r[..., None]
        grad_w += (tangent_sum / r**3)[..., None] * d

        total = w.sum(axis=1)
        shape = w / total[:, None]
        grad_total = grad_w.sum(axis=1)
        n[regular] = shape
        dn[regular] = (grad_w - shape[..., None] * grad_total[:, None, :]) / total[
            :, None, None
        ]

    return ShapeEvaluation(n=n, dn=dn, points=points)


def triangulate_polygon(vertices: npt.ArrayLike) -> FloatArray:
    """Split a star-shaped polygon into a fan of triangles around its centroid.

    :returns: triangle corners, shape ``(m, 3, 2)``; every triangle is
        counter-clockwise.
    :raises errors.DegenerateElementError: for a polygon without area.
    """
    v = np.asarray(vertices, dtype=np.float64)
    area = polygon_area(v)
    scale = np.ptp(v, axis=0).max() if len(v) else 0.0
    if len(v) < 3 or area <= _SNAP_TOLERANCE * max(scale, 1.0) ** 2:
        raise errors.DegenerateElementError(f"Polygon {v.tolist()} has no area.")
    centroid = polygon_centroid(v)
    nxt = np.roll(v, -1, axis=0)
    return np.stack([np.broadcast_to(centroid, v.shape), v, nxt], axis=1)


def triangle_rule(order: int) -> tuple[FloatArray, FloatArray]:
    """Return points ``(xi, eta)`` and weights on the unit reference triangle.

    Order 1 is the centroid rule, order 2 the three-point rule, and higher
    orders a collapsed Gauss rule with ``order**2`` points, exact for
    polynomials of degree ``2*order - 2``.

    :raises errors.QuadratureOrderError: for an order below 1.
    """
    if order < 1:
        raise errors.QuadratureOrderError(order)
    if order == 1:
        return np.array([[1.0 / 3.0, 1.0 / 3.0]]), np.array([0.5])
    if order == 2:
        points = np.array([[1.0 / 6.0, 1.0 / 6.0], [2.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 2.0 / 3.0]])
        return points, np.full(3, 1.0 / 6.0)
    gauss, weights = np.polynomial.legendre.leggauss(order)
    u, wu = 0.5 * (gauss + 1.0), 0.5 * weights
    uu, vv = np.meshgrid(u, u, indexing="ij")
    ww = np.outer(wu, wu) * (1.0 - vv)
    points = np.stack([uu * (1.0 - vv), vv], axis=-1).reshape(-1, 2)
    return points, ww.reshape(-1)


def square_rule(order: int) -> tuple[FloatArray, FloatArray]:
    """Return the ``order x order`` Gauss-Legendre rule on ``[-1, 1]^2``.

    :raises errors.QuadratureOrderError: for an order below 1.
    """
    if order < 1:
        raise errors.QuadratureOrderError(order)
    gauss, weights = np.polynomial.legendre.leggauss(order)
    xi, eta = np.meshgrid(gauss, gauss, indexing="ij")
    points = np.stack([xi, eta], axis=-1).reshape(-1, 2)
    return points, np.outer(weights, weights).reshape(-1)


class Element(metaclass=ABCMeta):
    """A finite element defined by its counter-clockwise node coordinates."""

    def __init__(self, coords: npt.ArrayLike) -> None:
        self.coords = np.asarray(coords, dtype=np.float64)

    @property
    def n_nodes(self) -> int:
        return len(self.coords)

    @property
    def area(self) -> float:
        return polygon_area(self.coords)

    @abstractmethod
    def shape(self, points: npt.ArrayLike) -> ShapeEvaluation:
        """Evaluate the shape functions at physical points."""

    @abstractmethod
    def quadrature(self, order: int) -> ShapeEvaluation:
        """Evaluate the shape functions at the points of a quadrature rule."""


class QuadElement(Element):
    """Bilinear isoparametric quadrilateral."""

    @overrides
    def shape(self, points: npt.ArrayLike) -> ShapeEvaluation:
        physical = np.atleast_2d(np.asarray(points, dtype=np.float64))
        xi = inverse_quad_map(self.coords, physical)
        return quad_shape(xi, self.coords)

    @overrides
    def quadrature(self, order: int) -> ShapeEvaluation:
        xi, weights = square_rule(order)
        evaluation = quad_shape(xi, self.coords)
        assert evaluation.weights is not None
        return dataclasses.replace(evaluation, weights=evaluation.weights * weights)


class PolygonElement(Element):
    """Mean-value polygon integrated on a centroid fan."""

    @overrides
    def shape(self, points: npt.ArrayLike) -> ShapeEvaluation:
        return mean_value_shape(points, self.coords)

    @overrides
    def quadrature(self, order: int) -> ShapeEvaluation:
        reference, reference_weights = triangle_rule(order)
        triangles = triangulate_polygon(self.coords)
        origin = triangles[:, 0, :]
        edge_a = triangles[:, 1, :] - origin
        edge_b = triangles[:, 2, :] - origin
        jacobian = edge_a[:, 0] * edge_b[:, 1] - edge_a[:, 1] * edge_b[:, 0]
        points = (
            origin[:, None, :]
            + reference[None, :, 0:1] * edge_a[:, None, :]
            + reference[None, :, 1:2] * edge_b[:, None, :]
        ).reshape(-1, 2)
        weights = (jacobian[:, None] * reference_weights[None, :]).reshape(-1)
        evaluation = mean_value_shape(points, self.coords)
        return dataclasses.replace(evaluation, weights=weights)


def make_element(coords: npt.ArrayLike) -> Element:
    """Return a quad for four nodes and a polygon otherwise."""
    coords = np.asarray(coords, dtype=np.float64)
    return QuadElement(coords) if len(coords) == 4 else PolygonElement(coords)


def quadrature_points(element: Element, order: int) -> tuple[FloatArray, FloatArray]:
    """Return the physical points and weights of an element's quadrature rule."""
    evaluation = element.quadrature(order)
    assert evaluation.points is not None and evaluation.weights is not None
    return evaluation.points, evaluation.weights


def shape_at(coords: npt.ArrayLike, point: npt.ArrayLike) -> FloatArray:
    """Return the shape function values at one point of the closed element.

    :raises errors.PointOutsideElementError: if the point is outside.
    """
    return make_element(coords).shape(point).n[0]


def b_matrices(shape: ShapeEvaluation) -> tuple[FloatArray, FloatArray]:
    """Return the strain-displacement and gradient operators.

    ``B`` has shape ``(p, 3, 2m)`` with rows ``exx, eyy, gxy`` acting on
    ``(ux0, uy0, ux1, ...)``; ``Bphi`` has shape ``(p, 2, m)``.
    """
    return strain_operator(shape.dn), np.swapaxes(shape.dn, -1, -2)


def strain_operator(dn: FloatArray) -> FloatArray:
    """Build ``B`` from gradients of shape ``(..., m, 2)``."""
    dnx, dny = dn[..., 0], dn[..., 1]
    b = np.zeros((*dn.shape[:-2], 3, 2 * dn.shape[-2]))
    b[..., 0, 0::2] = dnx
    b[..., 1, 1::2] = dny
    b[..., 2, 0::2] = dny
    b[..., 2, 1::2] = dnx
    return b


@dataclasses.dataclass(frozen=True)
class QuadratureBlock:
    """Elements sharing node and point counts, evaluated together.

    :ivar elements: element indices, shape ``(b,)``.
    :ivar conn: node ids, shape ``(b, m)``.
    :ivar points: quadrature points, shape ``(b, q, 2)``.
    :ivar weights: quadrature measure, shape ``(b, q)``.
    :ivar n: shape values, shape ``(b, q, m)``.
    :ivar dn: shape gradients, shape ``(b, q, m, 2)``.
    :ivar qp_index: flat quadrature point indices, shape ``(b, q)``.
    """

    elements: npt.NDArray[np.intp]
    conn: npt.NDArray[np.intp]
    points: FloatArray
    weights: FloatArray
    n: FloatArray
    dn: FloatArray
    qp_index: npt.NDArray[np.intp]

    @property
    def dofs(self) -> npt.NDArray[np.intp]:
        """Displacement dofs, shape ``(b, 2m)``."""
        dofs = np.empty((len(self.conn), 2 * self.conn.shape[1]), dtype=np.intp)
        dofs[:, 0::2] = 2 * self.conn
        dofs[:, 1::2] = 2 * self.conn + 1
        return dofs


class MeshQuadrature:
    """Shape data at every quadrature point of a mesh.

    Quadrature points are numbered element by element in mesh order;
    :attr:`offsets` gives the range of each element.
    """

    def __init__(
        self,
        blocks: list[QuadratureBlock],
        offsets: npt.NDArray[np.intp],
        n_nodes: int,
        quad_order: int,
        triangle_order: int,
    ) -> None:
        self.blocks = blocks
        self.offsets = offsets
        self.n_nodes = n_nodes
        self.quad_order = quad_order
        self.triangle_order = triangle_order
        n_points = int(offsets[-1])
        self.points = np.zeros((n_points, 2))
        self.weights = np.zeros(n_points)
        for block in blocks:
            self.points[block.qp_index] = block.points
            self.weights[block.qp_index] = block.weights

    @property
    def n_points(self) -> int:
        return int(self.offsets[-1])

    def element_points(self, element: int) -> slice:
        """Flat quadrature point range of ``element``."""
        return slice(int(self.offsets[element]), int(self.offsets[element + 1]))

    @classmethod
    def build(
        cls, mesh: QuadtreeMesh, quad_order: int = 2, triangle_order: int = 2
    ) -> "MeshQuadrature":
        """Evaluate every element of ``mesh`` once.

        Elements with the same level and hanging pattern share their shape
        data up to a translation, so each pattern is evaluated a single time.
        """
        templates: dict[Hashable, ShapeEvaluation] = {}
        per_element: list[tuple[ShapeEvaluation, FloatArray]] = []
        for index, element in enumerate(mesh.elements):
            lower_left = np.asarray(mesh.cell_bounds(element.cell)[:2])
            key = (element.cell.level, element.hanging)
            if key not in templates:
                local = make_element(mesh.element_coordinates(index) - lower_left)
                order = quad_order if isinstance(local, QuadElement) else triangle_order
                templates[key] = local.quadrature(order)
            per_element.append((templates[key], lower_left))

        counts = np.array([len(template.n) for template, _ in per_element], dtype=np.intp)
        offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.intp)

        groups: dict[tuple[int, int], list[int]] = {}
        for index, element in enumerate(mesh.elements):
            groups.setdefault((element.n_nodes, int(counts[index])), []).append(index)

        blocks = []
        for (_, n_points), members in groups.items():
            templates_in_block = [per_element[index][0] for index in members]
            shifts = np.array([per_element[index][1] for index in members])
            points = np.array([t.points for t in templates_in_block]) + shifts[:, None, :]
            blocks.append(
                QuadratureBlock(
                    elements=np.asarray(members, dtype=np.intp),
                    conn=np.array([mesh.elements[index].nodes for index in members]),
                    points=points,
                    weights=np.array([t.weights for t in templates_in_block]),
                    n=np.array([t.n for t in templates_in_block]),
                    dn=np.array([t.dn for t in templates_in_block]),
                    qp_index=offsets[members][:, None] + np.arange(n_points)[None, :],
                )
            )
        logger.debug(
            "Quadrature: %d points in %d blocks from %d patterns.",
            offsets[-1],
            len(blocks),
            len(templates),
        )
        return cls(blocks, offsets, mesh.n_nodes, quad_order, triangle_order)

    def interpolate(self, nodal: npt.ArrayLike) -> FloatArray:
        """Interpolate a nodal scalar to every quadrature point."""
        nodal = np.asarray(nodal, dtype=np.float64)
        values = np.zeros(self.n_points)
        for block in self.blocks:
            values[block.qp_index] = np.einsum("eqm,em->eq", block.n, nodal[block.conn])
        return values

    def strains(self, u: npt.ArrayLike) -> FloatArray:
        """Return compatible strain tensors at every point, shape ``(n, 2, 2)``."""
        displacement = np.asarray(u, dtype=np.float64).reshape(-1, 2)
        strains = np.zeros((self.n_points, 2, 2))
        for block in self.blocks:
            gradient = np.einsum("eqmj,emi->eqij", block.dn, displacement[block.conn])
            strains[block.qp_index] = 0.5 * (gradient + np.swapaxes(gradient, -1, -2))
        return strains

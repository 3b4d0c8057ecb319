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

"""Recovered-strain error indicator.

Nodal displacements are smoothed by moving least squares with a linear
basis and quartic spline weights. Supports cut by the crack measure their
distance around the crack tip. The element error is the L2 distance between
the compatible and the recovered strain.
"""

import concurrent.futures
import dataclasses
import logging
import math
from collections.abc import Sequence

import numpy as np
import numpy.typing as npt
import scipy.linalg
from scipy.spatial import cKDTree

from orthofrac import errors
from orthofrac.elements import MeshQuadrature
from orthofrac.mesh.quadtree import ErrorMap, QuadtreeMesh
from orthofrac.models.config_model import MlsConfig

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
Point = tuple[float, float]

MAX_CONDITION = 1e12


@dataclasses.dataclass(frozen=True)
class CrackGeometry:
    """A crack polyline ordered from the mouth to the tip."""

    vertices: tuple[Point, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 2:
            raise errors.CrackGeometryError("A crack needs at least 2 vertices.")
        for start, end in zip(self.vertices[:-1], self.vertices[1:]):
            if math.dist(start, end) == 0.0:
                raise errors.CrackGeometryError(f"Crack segment at {start} has no length.")

    @property
    def tip(self) -> Point:
        return self.vertices[-1]

    def extended(self, point: Sequence[float]) -> "CrackGeometry":
        """Return the crack with ``point`` appended as the new tip."""
        return CrackGeometry((*self.vertices, (float(point[0]), float(point[1]))))

    def segments(self) -> tuple[FloatArray, FloatArray]:
        vertices = np.asarray(self.vertices, dtype=np.float64)
        return vertices[:-1], vertices[1:]

    def crosses(self, starts: npt.ArrayLike, end: npt.ArrayLike) -> npt.NDArray[np.bool_]:
        """Return whether each segment ``start -> end`` properly crosses the crack.

        Touching the crack at an end point or at the tip does not count.
        """
        p = np.atleast_2d(np.asarray(starts, dtype=np.float64))
        q = np.asarray(end, dtype=np.float64)
        c, d = self.segments()
        pq = q - p
        cd = d - c

        def _cross(a: FloatArray, b: FloatArray) -> FloatArray:
            return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]

        o1 = _cross(pq[:, None, :], c[None, :, :] - p[:, None, :])
        o2 = _cross(pq[:, None, :], d[None, :, :] - p[:, None, :])
        o3 = _cross(cd[None, :, :], p[:, None, :] - c[None, :, :])
        o4 = _cross(cd, q - c)[None, :]
        return np.any((o1 * o2 < 0.0) & (o3 * o4 < 0.0), axis=1)

    def distance_to(self, points: npt.ArrayLike) -> FloatArray:
        """Distance from each point to the polyline."""
        x = np.atleast_2d(np.asarray(points, dtype=np.float64))
        c, d = self.segments()
        direction = d - c
        offset = x[:, None, :] - c[None, :, :]
        t = np.clip(
            np.einsum("psk,sk->ps", offset, direction)
            / np.einsum("sk,sk->s", direction, direction),
            0.0,
            1.0,
        )
        gap = offset - t[..., None] * direction[None, :, :]
        return np.sqrt(np.einsum("psk,psk->ps", gap, gap).min(axis=1))


def spline_weight(s: npt.ArrayLike) -> FloatArray:
    """Quartic spline ``1 - 6s^2 + 8s^3 - 3s^4`` on ``[0, 1]``, zero beyond."""
    s = np.asarray(s, dtype=np.float64)
    return np.where(s <= 1.0, 1.0 - 6.0 * s**2 + 8.0 * s**3 - 3.0 * s**4, 0.0)


def spline_weight_derivative(s: npt.ArrayLike) -> FloatArray:
    """Derivative ``-12s + 24s^2 - 12s^3`` of :func:`spline_weight`."""
    s = np.asarray(s, dtype=np.float64)
    return np.where(s <= 1.0, -12.0 * s + 24.0 * s**2 - 12.0 * s**3, 0.0)


def _diffracted(
    x: FloatArray, nodes: FloatArray, radii: FloatArray, crack: CrackGeometry | None
) -> tuple[FloatArray, FloatArray]:
    """Return normalized distances and their gradients with respect to ``x``."""
    offset = x[None, :] - nodes
    length = np.hypot(offset[:, 0], offset[:, 1])
    gradient = np.zeros_like(offset)
    moving = length > 0.0
    gradient[moving] = offset[moving] / length[moving, None]

    if crack is not None and len(nodes):
        blocked = crack.crosses(nodes, x)
        if np.any(blocked):
            tip = np.asarray(crack.tip)
            to_tip = x - tip
            tip_length = math.hypot(*to_tip)
            length[blocked] = tip_length + np.hypot(*(tip - nodes[blocked]).T)
            gradient[blocked] = to_tip / tip_length if tip_length > 0.0 else 0.0

    return length / radii, gradient / radii[:, None]


def diffraction_distance(
    x: npt.ArrayLike,
    x_k: npt.ArrayLike,
    d_k: npt.ArrayLike,
    crack: CrackGeometry | None,
) -> FloatArray:
    """Normalized support distance from node ``x_k`` to ``x``.

    When the segment between them crosses the crack the path is routed
    through the crack tip: ``s = (|x - x_c| + |x_c - x_k|) / d_k``.
    """
    nodes = np.atleast_2d(np.asarray(x_k, dtype=np.float64))
    radii = np.broadcast_to(np.asarray(d_k, dtype=np.float64), (len(nodes),))
    s, _ = _diffracted(np.asarray(x, dtype=np.float64), nodes, radii, crack)
    return s if np.ndim(x_k) > 1 else s[0]


def mls_shape(
    x: npt.ArrayLike,
    nodes: npt.ArrayLike,
    weights: npt.ArrayLike,
    weight_gradients: npt.ArrayLike | None = None,
    *,
    min_neighbors: int = 4,
) -> tuple[FloatArray, FloatArray]:
    """Linear-basis MLS shape functions and gradients at ``x``.

    The basis is centred at ``x`` and scaled by the support reach for
    conditioning. With ``c0 = A^-1 p(x)`` and
    ``c_k = A^-1 (dp/dx_k - dA/dx_k c0)`` the shape functions are
    ``Psi_I = c0 . p_I w_I`` and their derivatives
    ``c_k . p_I w_I + c0 . p_I dw_I/dx_k``.

    :param nodes: node coordinates, shape ``(k, 2)``.
    :param weights: weight of every node at ``x``.
    :param weight_gradients: weight gradients, shape ``(k, 2)``; zero if omitted.
    :raises errors.InsufficientCoverageError: with fewer than
        ``min_neighbors`` covering nodes or an ill-conditioned moment matrix.
    """
    x = np.asarray(x, dtype=np.float64)
    nodes = np.atleast_2d(np.asarray(nodes, dtype=np.float64))
    w = np.asarray(weights, dtype=np.float64)
    dw = (
        np.zeros((len(w), 2))
        if weight_gradients is None
        else np.asarray(weight_gradients, dtype=np.float64)
    )

    covering = int(np.count_nonzero(w > 0.0))
    if covering < min_neighbors:
        raise errors.InsufficientCoverageError(x, covering, math.inf)

    offsets = nodes - x
    reach = float(np.max(np.hypot(offsets[:, 0], offsets[:, 1]))) or 1.0
    p = np.column_stack([np.ones(len(nodes)), offsets / reach])
    moment = np.einsum("k,ki,kj->ij", w, p, p)
    condition = float(np.linalg.cond(moment))
    if not condition < MAX_CONDITION:
        raise errors.InsufficientCoverageError(x, covering, condition)

    lu_piv = scipy.linalg.lu_factor(moment, check_finite=False)
    c = np.empty((3, 3))
    c[0] = scipy.linalg.lu_solve(lu_piv, np.array([1.0, 0.0, 0.0]), check_finite=False)
    for k in range(2):
        d_moment = np.einsum("n,ni,nj->ij", dw[:, k], p, p)
        d_basis = np.zeros(3)
        d_basis[k + 1] = 1.0 / reach
        c[k + 1] = scipy.linalg.lu_solve(lu_piv, d_basis - d_moment @ c[0], check_finite=False)

    cp = p @ c[0]
    psi = cp * w
    dpsi = (p @ c[1:].T) * w[:, None] + cp[:, None] * dw
    return psi, dpsi


def element_error(
    strain: npt.ArrayLike, recovered: npt.ArrayLike, weights: npt.ArrayLike
) -> float:
    """Return ``sqrt(int |eps - eps_s|_F^2)`` with the element quadrature rule."""
    mismatch = np.asarray(strain) - np.asarray(recovered)
    return math.sqrt(
        float(np.einsum("q,qij,qij->", np.asarray(weights), mismatch, mismatch))
    )


def global_error(element_errors: npt.ArrayLike) -> float:
    """Return the root of the summed squared element errors."""
    values = np.asarray(element_errors, dtype=np.float64)
    return math.sqrt(float(values @ values))


class _SupportIndex:
    """Nearest-neighbour search over nodes grouped by support radius."""

    def __init__(self, nodes: FloatArray, radii: FloatArray) -> None:
        self._groups = []
        for radius in np.unique(radii):
            members = np.flatnonzero(radii == radius)
            self._groups.append((float(radius), members, cKDTree(nodes[members])))

    def covering(self, x: FloatArray, scale: float) -> npt.NDArray[np.intp]:
        """Return the nodes whose scaled support contains ``x``."""
        found = [
            members[tree.query_ball_point(x, radius * scale)]
            for radius, members, tree in self._groups
        ]
        return np.sort(np.concatenate(found)).astype(np.intp)


class MlsRecovery:
    """Recovered strains on one mesh.

    :param mesh: the mesh whose nodes carry the displacements.
    :param config: recovery settings.
    :param crack: current crack geometry, if any.
    """

    def __init__(
        self, mesh: QuadtreeMesh, config: MlsConfig, crack: CrackGeometry | None = None
    ) -> None:
        self.mesh = mesh
        self.config = config
        self.crack = crack
        diameters = np.zeros(mesh.n_nodes)
        for element, diameter in zip(mesh.elements, mesh.element_diameters):
            nodes = list(element.nodes)
            diameters[nodes] = np.maximum(diameters[nodes], diameter)
        self.support_radii = config.support_factor * diameters
        self._index = _SupportIndex(mesh.nodes, self.support_radii)

    def shape(
        self, x: npt.ArrayLike, side: int = 0
    ) -> tuple[npt.NDArray[np.intp], FloatArray, FloatArray]:
        """Return covering node ids, shape functions and gradients at ``x``.

        Notch slit nodes of the face opposite to ``side`` are ignored. The
        supports are enlarged when the fit is not well posed.

        :raises errors.InsufficientCoverageError: if every enlargement fails.
        """
        x = np.asarray(x, dtype=np.float64)
        node_side = self.mesh.node_side
        failure: errors.InsufficientCoverageError | None = None
        for attempt in range(self.config.max_growth_attempts + 1):
            scale = self.config.growth_factor**attempt
            ids = self._index.covering(x, scale)
            if side != 0:
                ids = ids[(node_side[ids] == 0) | (node_side[ids] == side)]
            s, ds = _diffracted(
                x, self.mesh.nodes[ids], self.support_radii[ids] * scale, self.crack
            )
            inside = s < 1.0
            ids, s, ds = ids[inside], s[inside], ds[inside]
            w = spline_weight(s)
            dw = spline_weight_derivative(s)[:, None] * ds
            try:
                psi, dpsi = mls_shape(
                    x,
                    self.mesh.nodes[ids],
                    w,
                    dw,
                    min_neighbors=self.config.min_neighbors,
                )
            except errors.InsufficientCoverageError as error:
                failure = error
                logger.debug("Enlarging MLS supports at %s (attempt %d).", x, attempt + 1)
                continue
            return ids, psi, dpsi
        assert failure is not None
        raise failure

    def strain(self, x: npt.ArrayLike, u: npt.ArrayLike, side: int = 0) -> FloatArray:
        """Return the recovered strain tensor at ``x``."""
        ids, _, dpsi = self.shape(x, side)
        displacement = np.asarray(u, dtype=np.float64).reshape(-1, 2)[ids]
        gradient = displacement.T @ dpsi
        return 0.5 * (gradient + gradient.T)

    def element_error(
        self,
        element: int,
        u: npt.ArrayLike,
        quadrature: MeshQuadrature,
        strains: FloatArray,
        sides: npt.NDArray[np.int8],
    ) -> float:
        """Error norm of one element given the compatible strains at all points."""
        points = quadrature.element_points(element)
        recovered = np.array(
            [
                self.strain(x, u, int(side))
                for x, side in zip(quadrature.points[points], sides[points])
            ]
        )
        return element_error(strains[points], recovered, quadrature.weights[points])

    def error_map(
        self, u: npt.ArrayLike, quadrature: MeshQuadrature, threads: int = 1
    ) -> ErrorMap:
        """Evaluate every element error, in a thread pool when ``threads > 1``."""
        strains = quadrature.strains(u)
        sides = self.mesh.side_of(quadrature.points)

        def _one(element: int) -> float:
            return self.element_error(element, u, quadrature, strains, sides)

        indices = range(self.mesh.n_elements)
        if threads > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
                values = list(pool.map(_one, indices))
        else:
            values = [_one(element) for element in indices]

        element_errors = np.asarray(values)
        result = ErrorMap(
            cells=self.mesh.cells,
            element_errors=element_errors,
            global_error=global_error(element_errors),
        )
        logger.debug(
            "Error indicator: global %.3e, max %.3e over %d elements.",
            result.global_error,
            element_errors.max(initial=0.0),
            len(element_errors),
        )
        return result


def recovered_strain(
    x: npt.ArrayLike, u: npt.ArrayLike, recovery: MlsRecovery, side: int = 0
) -> FloatArray:
    """Return the MLS strain ``sym(sum grad Psi_k (x) u_k)`` at ``x``."""
    return recovery.strain(x, u, side)


def damaged_points(
    quadrature: MeshQuadrature, phi: npt.ArrayLike, threshold: float = 0.95
) -> FloatArray:
    """Return the quadrature points where the phase field exceeds ``threshold``."""
    values = quadrature.interpolate(phi)
    return quadrature.points[values > threshold]


class CrackTracker:
    """Follows the phase-field crack as a polyline for the diffraction rule.

    :param notch: initial notch polyline, mouth first.
    :param spacing: minimum distance of new damage from the known crack.
    :param threshold: phase-field value marking broken material.
    """

    def __init__(
        self, notch: Sequence[Point] | None, spacing: float, threshold: float = 0.95
    ) -> None:
        self.notch = tuple(notch) if notch else ()
        self.spacing = spacing
        self.threshold = threshold
        self.points: list[Point] = []

    @property
    def crack(self) -> CrackGeometry | None:
        """The notch extended by every recorded point, if it has two vertices."""
        vertices = (*self.notch, *self.points)
        return CrackGeometry(vertices) if len(vertices) >= 2 else None

    def update(self, quadrature: MeshQuadrature, phi: npt.ArrayLike) -> Point | None:
        """Append the centroid of newly damaged points; return it if any."""
        points = damaged_points(quadrature, phi, self.threshold)
        if not len(points):
            return None
        known = np.asarray((*self.notch, *self.points), dtype=np.float64).reshape(-1, 2)
        crack = self.crack
        if crack is not None:
            far = crack.distance_to(points) > self.spacing
        elif len(known):
            far = np.min(np.linalg.norm(points[:, None] - known[None], axis=-1), axis=1) > (
                self.spacing
            )
        else:
            far = np.ones(len(points), dtype=bool)
        fresh = points[far]
        if not len(fresh):
            return None
        centroid = fresh.mean(axis=0)
        point = (float(centroid[0]), float(centroid[1]))
        self.points.append(point)
        logger.info("Crack tip advanced to (%.4g, %.4g).", *point)
        return point


def crack_band_angle(
    points: npt.ArrayLike, tip: Sequence[float], heading: Sequence[float] = (1.0, 0.0)
) -> float:
    """Direction of the damage band ahead of ``tip`` in degrees, in (-90, 90].

    The band is the principal axis of the second moment about the tip of the
    damaged points lying ahead of it along ``heading``.

    :raises errors.OrthofracError: if no damaged point lies ahead of the tip.
    """
    offsets = np.atleast_2d(np.asarray(points, dtype=np.float64)) - np.asarray(tip)
    ahead = offsets[offsets @ np.asarray(heading, dtype=np.float64) > 0.0]
    if len(ahead) < 2:
        raise errors.OrthofracError(
            "Too few damaged points ahead of the notch tip to fit a band.",
            resolution="Run more load steps or lower the damage threshold.",
        )
    moment = ahead.T @ ahead
    _, vectors = np.linalg.eigh(moment)
    direction = vectors[:, -1]
    angle = math.degrees(math.atan2(direction[1], direction[0]))
    if angle <= -90.0:
        angle += 180.0
    elif angle > 90.0:
        angle -= 180.0
    return angle

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


import math

import numpy as np
import pytest
from orthofrac import errors
from orthofrac.elements import MeshQuadrature
from orthofrac.models import MlsConfig
from orthofrac.recovery import (
    CrackGeometry,
    CrackTracker,
    MlsRecovery,
    crack_band_angle,
    damaged_points,
    diffraction_distance,
    element_error,
    global_error,
    mls_shape,
    recovered_strain,
    spline_weight,
    spline_weight_derivative,
)

NOTCH = [(0.0, 0.5), (0.5, 0.5)]
GRADIENT = np.array([[1e-3, 2e-3], [-5e-4, 3e-3]])


@pytest.fixture
def grid_nodes():
    xs, ys = np.meshgrid(np.linspace(0.0, 1.0, 5), np.linspace(0.0, 1.0, 5))
    return np.column_stack([xs.ravel(), ys.ravel()])


def weights_at(x, nodes, radius):
    offset = x - nodes
    length = np.hypot(offset[:, 0], offset[:, 1])
    s = length / radius
    gradient = np.zeros_like(offset)
    moving = length > 0.0
    gradient[moving] = offset[moving] / (length[moving, None] * radius)
    return spline_weight(s), spline_weight_derivative(s)[:, None] * gradient


@pytest.mark.parametrize(
    ("s", "weight", "derivative"),
    [
        pytest.param(0.0, 1.0, 0.0, id="centre"),
        pytest.param(0.5, 0.3125, -1.5, id="half"),
        pytest.param(1.0, 0.0, 0.0, id="edge"),
        pytest.param(1.5, 0.0, 0.0, id="outside"),
    ],
)
def test_spline_weight(s, weight, derivative):
    assert spline_weight(s) == pytest.approx(weight)
    assert spline_weight_derivative(s) == pytest.approx(derivative)


def test_crack_geometry_invalid():
    with pytest.raises(errors.CrackGeometryError):
        CrackGeometry(((0.0, 0.0),))
    with pytest.raises(errors.CrackGeometryError, match="no length"):
        CrackGeometry(((0.0, 0.0), (0.0, 0.0)))


def test_crack_geometry_extended():
    crack = CrackGeometry(tuple(NOTCH)).extended(np.array([0.7, 0.55]))

    assert crack.tip == (0.7, 0.55)
    assert len(crack.vertices) == 3
    assert crack.distance_to([[0.6, 0.525]])[0] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize(
    ("start", "end", "expected"),
    [
        pytest.param((0.25, 0.75), (0.25, 0.25), True, id="through-notch"),
        pytest.param((0.75, 0.75), (0.75, 0.25), False, id="ahead-of-tip"),
        pytest.param((0.5, 0.75), (0.5, 0.25), False, id="through-tip"),
        pytest.param((0.25, 0.75), (0.25, 0.5), False, id="ends-on-notch"),
    ],
)
def test_crack_crosses(start, end, expected):
    assert CrackGeometry(tuple(NOTCH)).crosses([start], end)[0] == expected


@pytest.mark.parametrize(
    ("x", "x_k", "crack", "expected"),
    [
        pytest.param(
            (0.0, -1.0),
            (0.0, 1.0),
            CrackGeometry(((-5.0, 0.0), (1.0, 0.0))),
            math.sqrt(2.0) / 2.0,
            id="diffracted",
        ),
        pytest.param(
            (1.0, -1.0),
            (1.0, 1.0),
            CrackGeometry(((-5.0, 0.0), (1.0, 0.0))),
            0.5,
            id="grazing-tip",
        ),
        pytest.param((0.0, -1.0), (0.0, 1.0), None, 0.5, id="no-crack"),
    ],
)
def test_diffraction_distance(x, x_k, crack, expected):
    assert diffraction_distance(x, x_k, 4.0, crack) == pytest.approx(expected)


def test_diffraction_distance_many_nodes():
    crack = CrackGeometry(((-5.0, 0.0), (1.0, 0.0)))

    s = diffraction_distance((0.0, -1.0), [[0.0, 1.0], [0.0, -2.0]], [4.0, 2.0], crack)

    np.testing.assert_allclose(s, [math.sqrt(2.0) / 2.0, 0.5])


def test_mls_reproduces_linear_basis(grid_nodes, rng):
    for x in rng.uniform(0.1, 0.9, size=(5, 2)):
        w, dw = weights_at(x, grid_nodes, 0.6)

        psi, dpsi = mls_shape(x, grid_nodes, w, dw)

        np.testing.assert_allclose(psi.sum(), 1.0, atol=1e-12)
        np.testing.assert_allclose(psi @ grid_nodes, x, atol=1e-12)
        np.testing.assert_allclose(dpsi.sum(axis=0), 0.0, atol=1e-10)
        np.testing.assert_allclose(grid_nodes.T @ dpsi, np.eye(2), atol=1e-10)


def test_mls_too_few_nodes(grid_nodes):
    x = np.array([0.1, 0.1])
    w, dw = weights_at(x, grid_nodes, 0.2)

    with pytest.raises(errors.InsufficientCoverageError) as raised:
        mls_shape(x, grid_nodes, w, dw, min_neighbors=4)

    assert "3 covering nodes" in raised.value.details


def test_mls_collinear_nodes():
    nodes = np.column_stack([np.linspace(0.0, 1.0, 6), np.zeros(6)])

    with pytest.raises(errors.InsufficientCoverageError, match="singular"):
        mls_shape([0.5, 0.0], nodes, np.ones(6))


def test_element_error():
    strain = np.zeros((2, 2, 2))
    recovered = np.broadcast_to(np.array([[1.0, 0.0], [0.0, 1.0]]), (2, 2, 2))

    assert element_error(strain, recovered, [0.5, 1.5]) == pytest.approx(2.0)


@pytest.mark.parametrize(
    ("values", "expected"),
    [
        pytest.param([3.0, 4.0], 5.0, id="pythagorean"),
        pytest.param([], 0.0, id="empty"),
        pytest.param([2.0], 2.0, id="single"),
    ],
)
def test_global_error(values, expected):
    assert global_error(values) == pytest.approx(expected)


def test_recovery_exact_for_linear_field(hanging_mesh):
    quadrature = MeshQuadrature.build(hanging_mesh)
    recovery = MlsRecovery(hanging_mesh, MlsConfig())
    u = (hanging_mesh.nodes @ GRADIENT.T).reshape(-1)

    error_map = recovery.error_map(u, quadrature)

    np.testing.assert_allclose(error_map.element_errors, 0.0, atol=1e-14)
    assert error_map.cells == hanging_mesh.cells
    np.testing.assert_allclose(
        recovered_strain((0.3, 0.7), u, recovery), 0.5 * (GRADIENT + GRADIENT.T), atol=1e-14
    )


def test_recovery_threads_agree(unit_mesh):
    mesh = unit_mesh(2)
    quadrature = MeshQuadrature.build(mesh)
    recovery = MlsRecovery(mesh, MlsConfig())
    nodes = mesh.nodes
    u = np.column_stack([1e-3 * nodes[:, 0] ** 2, 2e-3 * nodes[:, 0] * nodes[:, 1]]).reshape(-1)

    serial = recovery.error_map(u, quadrature)
    threaded = recovery.error_map(u, quadrature, threads=3)

    np.testing.assert_allclose(serial.element_errors, threaded.element_errors)
    assert serial.global_error > 0.0
    assert serial.global_error == pytest.approx(global_error(serial.element_errors))


def test_recovery_support_radii(unit_mesh):
    mesh = unit_mesh(2)

    recovery = MlsRecovery(mesh, MlsConfig(support_factor=2.0))

    np.testing.assert_allclose(recovery.support_radii, 2.0 * math.sqrt(2.0) / 4.0)


def test_recovery_ignores_opposite_face(unit_mesh):
    mesh = unit_mesh(2, notch=NOTCH)
    recovery = MlsRecovery(mesh, MlsConfig(), CrackGeometry(tuple(NOTCH)))

    ids, psi, _ = recovery.shape((0.2, 0.4), side=-1)

    assert not np.any(mesh.node_side[ids] == 1)
    assert psi.sum() == pytest.approx(1.0)


def test_recovery_enlarges_supports(unit_mesh, mocker):
    mesh = unit_mesh(1)
    config = MlsConfig(support_factor=0.5, max_growth_attempts=3, growth_factor=2.0)
    recovery = MlsRecovery(mesh, config)
    spy = mocker.spy(recovery._index, "covering")

    ids, psi, _ = recovery.shape((0.4, 0.4))

    assert spy.call_count > 1
    assert psi.sum() == pytest.approx(1.0)
    assert len(ids) >= 4


def test_recovery_gives_up(unit_mesh):
    mesh = unit_mesh(1)
    config = MlsConfig(support_factor=0.1, max_growth_attempts=1, growth_factor=1.1)
    recovery = MlsRecovery(mesh, config)

    with pytest.raises(errors.InsufficientCoverageError):
        recovery.shape((0.4, 0.4))


def test_damaged_points(unit_mesh):
    mesh = unit_mesh(2)
    quadrature = MeshQuadrature.build(mesh)
    phi = np.where(mesh.nodes[:, 0] >= 0.5, 1.0, 0.0)

    points = damaged_points(quadrature, phi)

    assert len(points) == 32
    assert np.all(points[:, 0] > 0.5)


def test_crack_tracker(unit_mesh):
    mesh = unit_mesh(2, notch=NOTCH)
    quadrature = MeshQuadrature.build(mesh)
    tracker = CrackTracker(NOTCH, spacing=0.1)

    assert tracker.update(quadrature, np.zeros(mesh.n_nodes)) is None

    phi = np.where(mesh.nodes[:, 0] >= 0.5, 1.0, 0.0)
    point = tracker.update(quadrature, phi)

    assert point is not None
    assert point[0] > 0.75
    assert point[1] == pytest.approx(0.5)
    assert tracker.crack.tip == point
    assert len(tracker.crack.vertices) == 3


def test_crack_tracker_without_notch(unit_mesh):
    mesh = unit_mesh(2)
    quadrature = MeshQuadrature.build(mesh)
    tracker = CrackTracker(None, spacing=0.1)
    phi = np.where(mesh.nodes[:, 0] >= 0.5, 1.0, 0.0)

    assert tracker.crack is None
    tracker.update(quadrature, phi)
    tracker.update(quadrature, phi)

    assert tracker.crack is not None
    assert len(tracker.points) == 2


@pytest.mark.parametrize("angle", [0.0, 30.0, -45.0, 60.0])
def test_crack_band_angle(angle):
    direction = np.array([math.cos(math.radians(angle)), math.sin(math.radians(angle))])
    band = [(0.5 + t * direction[0], 0.5 + t * direction[1]) for t in np.linspace(0.05, 0.3, 6)]
    behind = [(0.2, 0.5), (0.1, 0.52)]

    assert crack_band_angle(band + behind, (0.5, 0.5)) == pytest.approx(angle)


def test_crack_band_angle_too_few_points():
    with pytest.raises(errors.OrthofracError, match="Too few damaged points"):
        crack_band_angle([(0.6, 0.5), (0.2, 0.5)], (0.5, 0.5))

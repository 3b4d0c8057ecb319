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

"""Graded orthotropic plane-stress material law.

All functions accept scalars or arrays; array inputs broadcast over leading
axes so a whole set of quadrature points is evaluated in one call.
"""

import dataclasses
import logging
from typing import Union

import numpy as np
import numpy.typing as npt

from orthofrac import errors
from orthofrac.models.material_model import (
    EffectiveLame,
    GradationSpec,
    GradingDirection,
    OrthotropicBase,
)

logger = logging.getLogger(__name__)

FloatLike = Union[float, npt.NDArray[np.float64]]


@dataclasses.dataclass(frozen=True)
class PointProperties:
    """Elastic constants and toughness at one or many points.

    :ivar e1: longitudinal modulus (MPa).
    :ivar e2: transverse modulus (MPa).
    :ivar g12: shear modulus (MPa).
    :ivar nu12: major Poisson ratio.
    :ivar nu21: minor Poisson ratio, always ``e2 / e1 * nu12``.
    :ivar gc: critical energy release rate (N/mm).
    """

    e1: FloatLike
    e2: FloatLike
    g12: FloatLike
    nu12: FloatLike
    nu21: FloatLike
    gc: FloatLike

    @classmethod
    def from_moduli(
        cls, e1: FloatLike, e2: FloatLike, g12: FloatLike, nu12: FloatLike, gc: FloatLike
    ) -> "PointProperties":
        """Build properties, deriving the minor Poisson ratio."""
        return cls(e1=e1, e2=e2, g12=g12, nu12=nu12, nu21=e2 / e1 * nu12, gc=gc)


def grading_coordinate(grad: GradationSpec, x: npt.ArrayLike) -> FloatLike:
    """Return the normalized grading coordinate ``s`` in [0, 1].

    :param grad: the gradation description.
    :param x: point coordinates, shape ``(2,)`` or ``(..., 2)``.
    """
    points = np.asarray(x, dtype=np.float64)
    if grad.direction is GradingDirection.NONE:
        return np.zeros(points.shape[:-1]) if points.ndim > 1 else 0.0
    if grad.reference_length is None:
        raise errors.ConfigError(
            "Gradation reference length is unset.",
            resolution="Resolve the configuration before evaluating properties.",
        )
    axis = 0 if grad.direction is GradingDirection.X else 1
    origin = grad.origin or 0.0
    s = np.clip((points[..., axis] - origin) / grad.reference_length, 0.0, 1.0)
    return float(s) if np.ndim(s) == 0 else s


def evaluate_properties(
    base: OrthotropicBase, grad: GradationSpec, x: npt.ArrayLike
) -> PointProperties:
    """Evaluate the exponentially graded properties at ``x``.

    ``E(s) = E0 * exp(index * s)`` for E1 (``alpha``), E2 and G12
    (``beta_idx``), and the toughness (``gamma``) when it is graded.
    """
    s = grading_coordinate(grad, x)
    if grad.direction is GradingDirection.NONE:
        factor_1 = factor_2 = factor_c = np.ones_like(s) if np.ndim(s) else 1.0
    else:
        factor_1 = np.exp(grad.alpha * s)
        factor_2 = np.exp(grad.beta_idx * s)
        factor_c = np.exp(grad.gamma * s) if grad.grade_toughness else np.ones_like(s)

    return PointProperties.from_moduli(
        e1=base.e1 * factor_1,
        e2=base.e2 * factor_2,
        g12=base.g12 * factor_2,
        nu12=base.nu12 * np.ones_like(factor_1),
        gc=base.gc * factor_c,
    )


def reduced_stiffness(p: PointProperties) -> npt.NDArray[np.float64]:
    """Return the plane-stress reduced stiffness ``Q`` in material axes.

    :returns: array of shape ``(..., 3, 3)``.
    :raises errors.DegenerateMaterialError: if ``1 - nu12*nu21 <= 0``.
    """
    e1 = np.asarray(p.e1, dtype=np.float64)
    e2 = np.asarray(p.e2, dtype=np.float64)
    nu12 = np.asarray(p.nu12, dtype=np.float64)
    nu21 = np.asarray(p.nu21, dtype=np.float64)
    denominator = 1.0 - nu12 * nu21
    if np.any(denominator <= 0.0):
        flat_nu12, flat_nu21, flat_den = (
            np.ravel(a) for a in np.broadcast_arrays(nu12, nu21, denominator)
        )
        worst = int(np.argmin(flat_den))
        raise errors.DegenerateMaterialError(
            float(flat_nu12[worst]), float(flat_nu21[worst])
        )

    shape = np.broadcast(e1, e2, nu12, nu21).shape
    q = np.zeros((*shape, 3, 3))
    q[..., 0, 0] = e1 / denominator
    q[..., 1, 1] = e2 / denominator
    q[..., 0, 1] = q[..., 1, 0] = nu12 * e2 / denominator
    q[..., 2, 2] = p.g12
    return q


def rotation_matrix(theta: float) -> npt.NDArray[np.float64]:
    """Return the in-plane rotation ``T`` between material and global axes."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def constitutive_matrix(q: npt.ArrayLike, theta: float) -> npt.NDArray[np.float64]:
    """Rotate ``Q`` into the global frame: ``D = T^T Q T``.

    The product is symmetrized to remove round-off asymmetry.
    """
    t = rotation_matrix(theta)
    d = np.einsum("ki,...kl,lj->...ij", t, np.asarray(q, dtype=np.float64), t)
    return 0.5 * (d + np.swapaxes(d, -1, -2))


def effective_lame(
    p: PointProperties, choice: EffectiveLame = EffectiveLame.LONGITUDINAL
) -> tuple[FloatLike, FloatLike]:
    """Return plane-stress Lamé constants ``(lambda, mu)`` for the energy split.

    The orthotropic solid is represented by an isotropic pair chosen by
    ``choice``: (E1, nu12) or (E2, nu21).
    """
    if choice is EffectiveLame.TRANSVERSE:
        young, poisson = p.e2, p.nu21
    else:
        young, poisson = p.e1, p.nu12
    lam = young * poisson / (1.0 - poisson**2)
    mu = young / (2.0 * (1.0 + poisson))
    return lam, mu


@dataclasses.dataclass(frozen=True)
class MaterialPointData:
    """Material data sampled at a set of points, as used by assembly.

    :ivar d: rotated constitutive matrices, shape ``(..., 3, 3)``.
    :ivar gc: toughness, shape ``(...)``.
    :ivar lam: Lamé lambda of the energy split.
    :ivar mu: Lamé mu of the energy split.
    """

    d: npt.NDArray[np.float64]
    gc: npt.NDArray[np.float64]
    lam: npt.NDArray[np.float64]
    mu: npt.NDArray[np.float64]


class GradedMaterial:
    """A graded orthotropic material bound to its orientation and split choice.

    :param base: reference orthotropic constants.
    :param grad: exponential gradation.
    :param lame_choice: isotropic pair for the tensile/compressive split.
    """

    def __init__(
        self,
        base: OrthotropicBase,
        grad: GradationSpec,
        lame_choice: EffectiveLame = EffectiveLame.LONGITUDINAL,
    ) -> None:
        self.base = base
        self.grad = grad
        self.lame_choice = lame_choice

    @property
    def theta(self) -> float:
        """Material orientation angle (radians)."""
        return self.base.theta

    def sample(self, points: npt.ArrayLike) -> MaterialPointData:
        """Evaluate everything assembly needs at ``points`` (shape ``(..., 2)``)."""
        points = np.asarray(points, dtype=np.float64)
        props = evaluate_properties(self.base, self.grad, points)
        shape = points.shape[:-1]
        d = constitutive_matrix(reduced_stiffness(props), self.theta)
        d = np.broadcast_to(d, (*shape, 3, 3))
        lam, mu = effective_lame(props, self.lame_choice)
        return MaterialPointData(
            d=np.array(d),
            gc=np.broadcast_to(np.asarray(props.gc, dtype=np.float64), shape).copy(),
            lam=np.broadcast_to(np.asarray(lam, dtype=np.float64), shape).copy(),
            mu=np.broadcast_to(np.asarray(mu, dtype=np.float64), shape).copy(),
        )

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

"""Material models for graded orthotropic solids."""

import enum
import math
from typing import Annotated, Any

import annotated_types
import pydantic
from typing_extensions import Self

from orthofrac.models._base_model import MarshableModel

Modulus = Annotated[float, annotated_types.Gt(0)]
"""A strictly positive elastic modulus in MPa."""


class GradingDirection(str, enum.Enum):
    """Axis along which the material properties vary."""

    X = "x"
    Y = "y"
    NONE = "none"


class EffectiveLame(str, enum.Enum):
    """Isotropic pair used to build the Lamé constants of the energy split."""

    LONGITUDINAL = "longitudinal"
    """Use (E1, nu12)."""
    TRANSVERSE = "transverse"
    """Use (E2, nu21)."""


class OrthotropicBase(MarshableModel):
    """Reference orthotropic constants of the graded solid.

    Units are N, mm and MPa throughout; ``gc`` is in N/mm and ``theta`` in
    radians. A ``theta-deg`` key is accepted in place of ``theta``.

    :param e1: longitudinal modulus.
    :param e2: transverse modulus.
    :param g12: in-plane shear modulus.
    :param nu12: major Poisson ratio.
    :param gc: critical energy release rate.
    :param theta: material orientation angle.
    """

    e1: Modulus
    e2: Modulus
    g12: Modulus
    nu12: float
    gc: Annotated[float, annotated_types.Gt(0)]
    theta: float = 0.0

    @pydantic.model_validator(mode="before")
    @classmethod
    def _convert_degrees(cls, data: Any) -> Any:  # noqa: ANN401
        if not isinstance(data, dict):
            return data
        for key in ("theta-deg", "theta_deg"):
            if key in data:
                data = dict(data)
                if "theta" in data:
                    raise ValueError("give either theta or theta-deg, not both")
                data["theta"] = math.radians(float(data.pop(key)))
        return data

    @pydantic.model_validator(mode="after")
    def _check_positive_definite(self) -> Self:
        nu21 = self.e2 / self.e1 * self.nu12
        if 1.0 - self.nu12 * nu21 <= 0.0:
            raise ValueError(
                f"1 - nu12*nu21 must be positive (got {1.0 - self.nu12 * nu21:.6g})"
            )
        return self

    @property
    def nu21(self) -> float:
        """Minor Poisson ratio of the reference material."""
        return self.e2 / self.e1 * self.nu12


class GradationSpec(MarshableModel):
    """Exponential grading of the orthotropic constants.

    :param direction: grading axis, or ``none`` for a homogeneous solid.
    :param alpha: grading index of E1.
    :param beta_idx: grading index of E2 and G12.
    :param gamma: grading index of the toughness.
    :param grade_toughness: whether the toughness is graded at all.
    :param reference_length: length normalizing the grading coordinate;
        filled with the domain extent along ``direction`` when omitted.
    :param origin: coordinate where the grading coordinate is zero; filled
        with the domain origin along ``direction`` when omitted.
    """

    direction: GradingDirection = GradingDirection.NONE
    alpha: float = 0.0
    beta_idx: float = 0.0
    gamma: float = 0.0
    grade_toughness: bool = False
    reference_length: Annotated[float, annotated_types.Gt(0)] | None = None
    origin: float | None = None

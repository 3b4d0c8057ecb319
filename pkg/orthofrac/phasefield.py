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

"""Anisotropic hybrid phase-field ingredients.

Strains are 2x2 symmetric tensors with shape ``(..., 2, 2)``; every function
is a pointwise evaluation and broadcasts over the leading axes.
"""

import numpy as np
import numpy.typing as npt

from orthofrac.material import FloatLike

FloatArray = npt.NDArray[np.float64]


def structural_tensor(theta: float, beta_penalty: float) -> FloatArray:
    """Return ``A = I + beta (I - n n)`` with ``n = (cos theta, sin theta)``.

    The eigenvalue along ``n`` is 1 and across it ``1 + beta``, so gradients
    across the material direction are penalized.
    """
    n = np.array([np.cos(theta), np.sin(theta)])
    identity = np.eye(2)
    return identity + beta_penalty * (identity - np.outer(n, n))


def degradation(phi: FloatLike, k_p: float) -> FloatLike:
    """Return the stiffness degradation ``(1 - phi)^2 + k_p``."""
    return (1.0 - phi) ** 2 + k_p


def voigt_to_tensor(strain: npt.ArrayLike) -> FloatArray:
    """Convert Voigt strains ``(exx, eyy, gxy)`` to symmetric tensors."""
    strain = np.asarray(strain, dtype=np.float64)
    tensor = np.empty((*strain.shape[:-1], 2, 2))
    tensor[..., 0, 0] = strain[..., 0]
    tensor[..., 1, 1] = strain[..., 1]
    tensor[..., 0, 1] = tensor[..., 1, 0] = 0.5 * strain[..., 2]
    return tensor


def principal_strains(eps: npt.ArrayLike) -> tuple[FloatArray, FloatArray]:
    """Return principal strains and directions of symmetric 2x2 tensors.

    Uses the closed-form eigen-decomposition. When both principal strains
    coincide the Cartesian basis is returned.

    :returns: eigenvalues ``(..., 2)`` in descending order and eigenvectors
        ``(..., 2, 2)`` stored as columns.
    """
    eps = np.asarray(eps, dtype=np.float64)
    exx, eyy, exy = eps[..., 0, 0], eps[..., 1, 1], 0.5 * (eps[..., 0, 1] + eps[..., 1, 0])
    mean = 0.5 * (exx + eyy)
    radius = np.hypot(0.5 * (exx - eyy), exy)
    values = np.stack([mean + radius, mean - radius], axis=-1)

    angle = 0.5 * np.arctan2(2.0 * exy, exx - eyy)
    c, s = np.cos(angle), np.sin(angle)
    vectors = np.empty((*eps.shape[:-2], 2, 2))
    vectors[..., 0, 0], vectors[..., 1, 0] = c, s
    vectors[..., 0, 1], vectors[..., 1, 1] = -s, c
    return values, vectors


def split_strain(eps: npt.ArrayLike) -> tuple[FloatArray, FloatArray]:
    """Split strains into tensile and compressive parts.

    ``eps_pm = sum_I <eps_I>_pm n_I (x) n_I``.
    """
    values, vectors = principal_strains(eps)
    positive = np.maximum(values, 0.0)
    negative = np.minimum(values, 0.0)
    eps_plus = np.einsum("...ik,...k,...jk->...ij", vectors, positive, vectors)
    eps_minus = np.einsum("...ik,...k,...jk->...ij", vectors, negative, vectors)
    return eps_plus, eps_minus


def spectral_split(
    eps: npt.ArrayLike, lam: FloatLike, mu: FloatLike
) -> tuple[FloatArray, FloatArray]:
    """Return the tensile and compressive strain energy densities.

    ``psi_pm = lam/2 <tr eps>_pm^2 + mu tr(eps_pm^2)``; the trace of
    ``eps_pm^2`` equals the sum of squared bracketed principal strains.
    """
    values, _ = principal_strains(eps)
    trace = values[..., 0] + values[..., 1]
    positive = np.maximum(values, 0.0)
    negative = np.minimum(values, 0.0)
    psi_plus = 0.5 * lam * np.maximum(trace, 0.0) ** 2 + mu * np.sum(positive**2, axis=-1)
    psi_minus = 0.5 * lam * np.minimum(trace, 0.0) ** 2 + mu * np.sum(negative**2, axis=-1)
    return psi_plus, psi_minus


def strain_energy(eps: npt.ArrayLike, lam: FloatLike, mu: FloatLike) -> FloatArray:
    """Return the undegraded isotropic energy ``lam/2 (tr eps)^2 + mu tr(eps^2)``."""
    eps = np.asarray(eps, dtype=np.float64)
    trace = eps[..., 0, 0] + eps[..., 1, 1]
    return 0.5 * lam * trace**2 + mu * np.einsum("...ij,...ij->...", eps, eps)


def update_history(h_old: FloatLike, psi_plus: FloatLike) -> FloatLike:
    """Return the running maximum of the tensile energy."""
    return np.maximum(h_old, psi_plus)


def hybrid_constraint(psi_plus: FloatLike, psi_minus: FloatLike, phi: FloatLike) -> FloatLike:
    """Return zero where compression dominates (``psi+ < psi-``), else ``phi``."""
    return np.where(np.asarray(psi_plus) < np.asarray(psi_minus), 0.0, phi)

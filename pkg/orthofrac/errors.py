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

"""Orthofrac errors."""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from pathlib import Path


class OrthofracError(Exception):
    """Base class error for orthofrac."""

    def __init__(
        self,
        message: str,
        details: str | None = None,
        resolution: str | None = None,
    ) -> None:
        super().__init__(message)
        self.details = details
        self.resolution = resolution


class ConfigIssueList:
    """Validation issues found in a configuration file.

    Each issue is a dictionary with the keys ``loc`` (dotted field path),
    ``message`` and, when the key is present in the file, ``line``.
    """

    def __init__(self, issue_list: list[dict[str, str]]) -> None:
        self._issue_list = issue_list

    def __len__(self) -> int:
        return len(self._issue_list)

    def __iter__(self) -> Iterator[dict[str, str]]:
        return iter(self._issue_list)

    def __str__(self) -> str:
        issue_list: list[str] = []
        for issue in self._issue_list:
            where = issue["loc"]
            if issue.get("line"):
                where = f"{where} (line {issue['line']})"
            issue_list.append(f"- {where}: {issue['message']}")
        return "\n".join(issue_list).strip()

    def __repr__(self) -> str:
        return f"<ConfigIssueList: {' '.join(i['loc'] for i in self._issue_list)}>"

    def __contains__(self, loc: str) -> bool:
        return any(issue.get("loc") == loc for issue in self._issue_list)

    def __getitem__(self, loc: str) -> dict[str, str]:
        for issue in self._issue_list:
            if issue.get("loc") == loc:
                return issue

        raise KeyError(loc)


class ConfigError(OrthofracError, ValueError):
    """Error when a simulation configuration is invalid."""

    def __init__(
        self,
        message: str,
        *,
        issues: ConfigIssueList | None = None,
        resolution: str | None = None,
    ) -> None:
        details = str(issues) if issues else None
        super().__init__(message, details, resolution)
        self.issues = issues


class DegenerateMaterialError(OrthofracError, ValueError):
    """Error raised when elastic constants give a singular stiffness."""

    def __init__(self, nu12: float, nu21: float) -> None:
        super().__init__(
            f"Degenerate material: 1 - nu12*nu21 = {1.0 - nu12 * nu21:.6g} <= 0.",
            resolution="Check the Poisson ratio and the modulus ratio E2/E1.",
        )


class MeshError(OrthofracError, ValueError):
    """Error raised for invalid mesh geometry or topology."""


class RefinementError(MeshError):
    """Error raised when a cell that cannot be split is flagged."""

    def __init__(self, cell: tuple[int, int, int]) -> None:
        super().__init__(f"Cell {cell} is not a leaf and cannot be refined.")


class UnbalancedMeshError(MeshError):
    """Error raised when elements are requested from an unbalanced quadtree."""

    def __init__(self, cell: tuple[int, int, int]) -> None:
        super().__init__(
            f"Cell {cell} violates the 2:1 rule.",
            resolution="Balance the mesh before extracting elements.",
        )


class DegenerateElementError(OrthofracError, ValueError):
    """Error raised when an element has a singular geometric map."""


class PointOutsideElementError(OrthofracError, ValueError):
    """Error raised when a shape function is evaluated outside its element."""

    def __init__(self, point: Sequence[float]) -> None:
        super().__init__(
            f"Point ({point[0]:.6g}, {point[1]:.6g}) lies outside the element."
        )


class QuadratureOrderError(OrthofracError, ValueError):
    """Error raised for an unsupported quadrature order."""

    def __init__(self, order: int) -> None:
        super().__init__(f"Unsupported quadrature order {order}.")


class CrackGeometryError(OrthofracError, ValueError):
    """Error raised for an invalid crack polyline."""


class InsufficientCoverageError(OrthofracError):
    """Error raised when too few MLS supports cover an evaluation point."""

    def __init__(self, point: Sequence[float], n_nodes: int, condition: float) -> None:
        super().__init__(
            f"MLS moment matrix is singular at ({point[0]:.6g}, {point[1]:.6g}).",
            details=f"{n_nodes} covering nodes, condition number {condition:.3g}.",
            resolution="Increase the recovery support factor.",
        )


class MeshTransferError(OrthofracError):
    """Error raised when a new mesh does not refine the old one."""

    def __init__(self, cell: tuple[int, int, int]) -> None:
        super().__init__(
            f"Cell {cell} of the new mesh is not covered by any old element."
        )


class BoundaryConditionError(OrthofracError, ValueError):
    """Error raised for invalid boundary condition data."""


class StaggeredConvergenceError(OrthofracError):
    """Error raised when the staggered scheme does not converge."""

    def __init__(self, step: int, iterations: int, residual: float) -> None:
        super().__init__(
            f"Staggered scheme did not converge at step {step} "
            f"after {iterations} iterations (residual {residual:.3g}).",
            resolution="Reduce the displacement increment or raise the iteration cap.",
        )
        self.step = step
        self.iterations = iterations
        self.residual = residual


class OutputError(OrthofracError):
    """Error raised when an output file cannot be written."""

    def __init__(self, path: Path, exception: Exception) -> None:
        super().__init__(f"Cannot write {str(path)!r}.", details=str(exception))

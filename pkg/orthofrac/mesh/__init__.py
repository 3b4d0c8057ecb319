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

"""Quadtree meshes and state transfer between them.

:mod:`orthofrac.mesh.transfer` is imported on demand since it depends on
the element library, which itself builds on the quadtree.
"""

from .quadtree import (
    ElementKind,
    ErrorMap,
    MeshElement,
    QuadtreeCell,
    QuadtreeMesh,
    audit_balance,
    balance_2to1,
    build_initial,
    extract_elements,
    flag_by_error,
    refine,
)

__all__ = [
    "ElementKind",
    "ErrorMap",
    "MeshElement",
    "QuadtreeCell",
    "QuadtreeMesh",
    "audit_balance",
    "balance_2to1",
    "build_initial",
    "extract_elements",
    "flag_by_error",
    "refine",
]

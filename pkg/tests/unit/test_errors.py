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


from pathlib import Path
from textwrap import dedent

import pytest
from orthofrac import errors

scenarios = (
    {
        "exception_class": errors.DegenerateMaterialError,
        "args": [0.9, 1.2],
        "expected_message": "Degenerate material: 1 - nu12*nu21 = -0.08 <= 0.",
    },
    {
        "exception_class": errors.RefinementError,
        "args": [(2, 1, 3)],
        "expected_message": "Cell (2, 1, 3) is not a leaf and cannot be refined.",
    },
    {
        "exception_class": errors.UnbalancedMeshError,
        "args": [(1, 0, 1)],
        "expected_message": "Cell (1, 0, 1) violates the 2:1 rule.",
    },
    {
        "exception_class": errors.PointOutsideElementError,
        "args": [(1.5, -0.25)],
        "expected_message": "Point (1.5, -0.25) lies outside the element.",
    },
    {
        "exception_class": errors.QuadratureOrderError,
        "args": [0],
        "expected_message": "Unsupported quadrature order 0.",
    },
    {
        "exception_class": errors.InsufficientCoverageError,
        "args": [(0.5, 0.5), 2, 3.0e13],
        "expected_message": "MLS moment matrix is singular at (0.5, 0.5).",
    },
    {
        "exception_class": errors.MeshTransferError,
        "args": [(1, 0, 0)],
        "expected_message": "Cell (1, 0, 0) of the new mesh is not covered by any old element.",
    },
    {
        "exception_class": errors.StaggeredConvergenceError,
        "args": [7, 200, 0.0125],
        "expected_message": (
            "Staggered scheme did not converge at step 7 after 200 iterations "
            "(residual 0.0125)."
        ),
    },
    {
        "exception_class": errors.OutputError,
        "args": [Path("results/step_0001.vtk"), PermissionError("denied")],
        "expected_message": "Cannot write 'results/step_0001.vtk'.",
    },
)


@pytest.mark.parametrize("scenario", scenarios)
def test_error_formatting(scenario):
    assert (
        str(scenario["exception_class"](*scenario["args"]))
        == scenario["expected_message"]
    )


@pytest.mark.parametrize("scenario", scenarios)
def test_errors_share_a_base(scenario):
    assert issubclass(scenario["exception_class"], errors.OrthofracError)


def test_coverage_error_details():
    error = errors.InsufficientCoverageError((0.5, 0.5), 2, 3.0e13)

    assert error.details == "2 covering nodes, condition number 3e+13."
    assert error.resolution == "Increase the recovery support factor."


def test_output_error_details():
    error = errors.OutputError(Path("out.csv"), PermissionError("denied"))

    assert error.details == "denied"


def test_staggered_error_attributes(check):
    error = errors.StaggeredConvergenceError(3, 50, 1e-2)

    check.equal(error.step, 3)
    check.equal(error.iterations, 50)
    check.equal(error.residual, 1e-2)
    check.is_not_none(error.resolution)


issue_lists = [
    {
        "issue_list": [{"loc": "schedule", "message": "Field required"}],
        "expected": "- schedule: Field required",
    },
    {
        "issue_list": [
            {"loc": "material.e1", "message": "Input should be greater than 0", "line": "4"},
            {"loc": "geometry.colour", "message": "Extra inputs are not permitted", "line": "2"},
        ],
        "expected": dedent(
            """\
            - material.e1 (line 4): Input should be greater than 0
            - geometry.colour (line 2): Extra inputs are not permitted"""
        ),
    },
]


@pytest.mark.parametrize("scenario", issue_lists)
def test_config_error_details(scenario):
    issues = errors.ConfigIssueList(scenario["issue_list"])
    error = errors.ConfigError("Configuration has invalid fields.", issues=issues)

    assert error.details == scenario["expected"]
    assert error.issues is issues


def test_config_issue_list_lookup():
    issues = errors.ConfigIssueList(
        [{"loc": "material.e1", "message": "Input should be greater than 0", "line": "4"}]
    )

    assert "material.e1" in issues
    assert "material.e2" not in issues
    assert issues["material.e1"]["line"] == "4"
    assert len(issues) == 1
    assert repr(issues) == "<ConfigIssueList: material.e1>"
    with pytest.raises(KeyError):
        issues["material.e2"]


def test_config_error_without_issues():
    error = errors.ConfigError("Cannot read configuration.")

    assert error.details is None
    assert error.issues is None
    assert isinstance(error, ValueError)

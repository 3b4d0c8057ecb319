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


import numpy as np
import pytest
from orthofrac.bench import format_report, run_bench
from orthofrac.mesh import ErrorMap
from orthofrac.models import BenchCase, BenchReport, PhaseTimings
from orthofrac.solver import Simulation


def finest_cell_flagged(disc, state):
    element_errors = np.zeros(disc.mesh.n_elements)
    element_errors[-1] = 1.0
    return ErrorMap(cells=disc.mesh.cells, element_errors=element_errors, global_error=1.0)


@pytest.fixture
def report():
    timings = PhaseTimings(solve_u=0.5, assemble_u=0.25)
    return BenchReport(
        adaptive=BenchCase(
            label="adaptive", dofs=1200, elements=500, finest_level=7, timings=timings
        ),
        uniform=BenchCase(
            label="uniform", dofs=33282, elements=16384, finest_level=7, timings=timings
        ),
    )


def test_format_report(report):
    lines = format_report(report).splitlines()

    assert lines[0].split() == [
        "case",
        "dofs",
        "elements",
        "level",
        "error_indicator",
        "remeshing",
        "assemble_phi",
        "solve_phi",
        "assemble_u",
        "solve_u",
        "total",
    ]
    assert lines[1].split()[:4] == ["adaptive", "1200", "500", "7"]
    assert lines[2].split()[-1] == "0.750"
    assert lines[3] == "adaptive/uniform dofs: 0.0361"
    assert len({len(line) for line in lines[:3]}) == 1


def test_dof_ratio(report):
    assert report.dof_ratio == pytest.approx(1200 / 33282)


def test_run_bench(config, mocker, check):
    error_map = mocker.patch.object(Simulation, "error_map", side_effect=finest_cell_flagged)

    report = run_bench(config)

    check.equal(report.adaptive.elements, 7)
    check.equal(report.adaptive.dofs, 28)
    check.equal(report.adaptive.finest_level, 2)
    check.equal(report.uniform.elements, 16)
    check.equal(report.uniform.dofs, 50)
    check.equal(error_map.call_count, 2)
    check.less(report.dof_ratio, 1.0)

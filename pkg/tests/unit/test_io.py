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


import csv
import json
from textwrap import dedent

import numpy as np
import pytest
from orthofrac import errors
from orthofrac.io import (
    CSV_COLUMNS,
    LOAD_DISPLACEMENT_FILE,
    METADATA_FILE,
    VTK_POLYGON,
    VTK_QUAD,
    Provenance,
    RunWriter,
    config_hash,
    load_config,
    parse_config,
    write_load_displacement,
    write_metadata,
    write_vtk,
)
from orthofrac.mesh import ErrorMap
from orthofrac.models import StepRecord
from orthofrac.state import SolutionState

INVALID_CONFIG = dedent(
    """\
    geometry:
      width: 1.0
      height: 1.0
      colour: red
    material:
      e1: -5.0
      e2: 10.0
      g12: 4.0
      nu12: 0.25
      gc: 1.0
    schedule:
      steps: 2
    boundary:
      dirichlet:
        - edge: bottom
          component: z
    """
)


@pytest.fixture
def provenance(config):
    return Provenance.from_config(config)


@pytest.fixture
def records():
    return [
        StepRecord(
            step=step,
            displacement=1e-6 * step,
            reaction=0.001 * step,
            dofs=18,
            iterations=1,
            wall_time=0.25,
            elements=4,
        )
        for step in (1, 2)
    ]


def test_parse_config(config_file, check):
    config = parse_config(config_file)

    check.almost_equal(config.phasefield.ell0, 0.5)
    check.almost_equal(config.schedule.displacement_increment, 1e-6)
    check.equal(config.schedule.steps, 2)
    check.equal(len(config.boundary.loaded), 1)


def test_parse_config_missing(tmp_path):
    with pytest.raises(errors.ConfigError, match="Cannot read configuration"):
        parse_config(tmp_path / "missing.yaml")


def test_parse_config_not_yaml(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("geometry: [1, 2\n")

    with pytest.raises(errors.ConfigError, match="not valid YAML"):
        parse_config(path)


def test_parse_config_not_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- geometry\n- material\n")

    with pytest.raises(errors.ConfigError, match="must be a mapping"):
        parse_config(path)


def test_parse_config_issue_lines(tmp_path, check):
    path = tmp_path / "invalid.yaml"
    path.write_text(INVALID_CONFIG)

    with pytest.raises(errors.ConfigError) as raised:
        parse_config(path)

    issues = raised.value.issues
    check.equal(issues["material.e1"]["line"], "6")
    check.equal(issues["geometry.colour"]["line"], "4")
    check.equal(issues["boundary.dirichlet.0.component"]["line"], "16")
    check.is_in("material.e1 (line 6)", raised.value.details)
    check.equal(str(raised.value), f"Configuration has {len(issues)} invalid field(s).")


def test_load_config_missing_section(config_data):
    del config_data["schedule"]

    with pytest.raises(errors.ConfigError) as raised:
        load_config(config_data)

    assert "schedule" in raised.value.issues
    assert "line" not in raised.value.issues["schedule"]


@pytest.mark.parametrize(
    ("section", "update", "loc"),
    [
        pytest.param("geometry", {"width": 1.5}, "geometry", id="aspect-ratio"),
        pytest.param("mesh", {"base-level": 3, "max-depth": 2}, "mesh", id="depth"),
        pytest.param("material", {"nu12": 4.0}, "material", id="degenerate"),
        pytest.param("recovery", {"min-neighbors": 3}, "recovery.min-neighbors", id="neighbors"),
        pytest.param("phasefield", {"k-p": 1.5}, "phasefield.k-p", id="k-p"),
    ],
)
def test_load_config_rejects(config_data, section, update, loc):
    config_data[section] = {**config_data.get(section, {}), **update}

    with pytest.raises(errors.ConfigError) as raised:
        load_config(config_data)

    assert loc in raised.value.issues


def test_load_config_resolves_gradation(config_data):
    config_data["geometry"] = {"width": 2.0, "height": 1.0, "origin": [-1.0, 0.0]}
    config_data["gradation"] = {"direction": "x", "alpha": 0.5}

    config = load_config(config_data)

    assert config.gradation.reference_length == 2.0
    assert config.gradation.origin == -1.0


def test_config_hash(config, config_data):
    changed = dict(config_data, schedule={"displacement-increment": 2e-6, "steps": 2})

    assert config_hash(config) == config_hash(load_config(config_data))
    assert config_hash(config) != config_hash(load_config(changed))
    assert len(config_hash(config)) == 64


def test_provenance_echo(provenance):
    assert provenance.echo() == (
        f"config-hash={provenance.config_hash} ell0=0.5 du=1e-06 "
        "staggered-tol=0.0001 error-tol=1e-05"
    )


def test_write_vtk(tmp_path, hanging_mesh, provenance, check):
    state = SolutionState.zeros(hanging_mesh.n_nodes, 0)
    error_map = ErrorMap(
        cells=hanging_mesh.cells,
        element_errors=np.arange(hanging_mesh.n_elements, dtype=float),
        global_error=1.0,
    )

    path = write_vtk(
        tmp_path / "step_0003.vtk", hanging_mesh, state, error_map, step=3, provenance=provenance
    )

    lines = path.read_text().splitlines()
    check.equal(lines[0], "# vtk DataFile Version 2.0")
    check.equal(lines[1], f"orthofrac step 3 {provenance.echo()}")
    check.equal(lines[3], "DATASET UNSTRUCTURED_GRID")
    check.is_in("POINTS 14 double", lines)
    check.is_in(f"CELLS 7 {5 * 5 + 2 * 6}", lines)
    start = lines.index("CELL_TYPES 7") + 1
    cell_types = [int(value) for value in lines[start : start + 7]]
    check.equal(cell_types.count(VTK_QUAD), 5)
    check.equal(cell_types.count(VTK_POLYGON), 2)
    check.is_in("SCALARS element_error double 1", lines)
    check.is_in("SCALARS level int 1", lines)


def test_write_vtk_without_error_map(tmp_path, unit_mesh, provenance):
    mesh = unit_mesh(1)
    state = SolutionState.zeros(mesh.n_nodes, 0)

    path = write_vtk(tmp_path / "mesh.vtk", mesh, state, None, step=0, provenance=provenance)

    lines = path.read_text().splitlines()
    start = lines.index("SCALARS element_error double 1") + 2
    assert lines[start : start + 4] == ["0"] * 4


def test_write_vtk_unwritable(tmp_path, unit_mesh, provenance):
    mesh = unit_mesh(1)

    with pytest.raises(errors.OutputError, match="step_0001.vtk"):
        write_vtk(
            tmp_path / "missing" / "step_0001.vtk",
            mesh,
            SolutionState.zeros(mesh.n_nodes, 0),
            None,
            step=1,
            provenance=provenance,
        )


def test_write_vtk_meshio_roundtrip(tmp_path, unit_mesh, provenance):
    meshio = pytest.importorskip("meshio")
    mesh = unit_mesh(2)
    u = np.column_stack([mesh.nodes[:, 0] * 1e-3, -mesh.nodes[:, 1] * 2e-4]).reshape(-1)
    state = SolutionState(u=u, phi=mesh.nodes[:, 0] ** 2, history=np.zeros(0))

    path = write_vtk(tmp_path / "grid.vtk", mesh, state, None, step=1, provenance=provenance)
    grid = meshio.read(path)

    np.testing.assert_allclose(grid.points[:, :2], mesh.nodes)
    np.testing.assert_allclose(grid.point_data["phi"].ravel(), state.phi)
    np.testing.assert_allclose(grid.point_data["u"][:, :2], state.displacement)
    assert grid.cells[0].type == "quad"
    assert len(grid.cells[0].data) == mesh.n_elements


def test_write_load_displacement(tmp_path, records):
    path = write_load_displacement(tmp_path / LOAD_DISPLACEMENT_FILE, records)

    rows = list(csv.reader(path.read_text().splitlines()))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[1] == ["1", "9.9999999999999995e-07", "0.001", "18", "1", "0.25", "4"]
    assert len(rows) == 3


def test_write_load_displacement_single_step(tmp_path, records):
    path = write_load_displacement(tmp_path / "curve.csv", records[:1])

    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0] == ",".join(CSV_COLUMNS)


def test_write_load_displacement_without_wall_time(tmp_path, records):
    path = write_load_displacement(tmp_path / "curve.csv", records, wall_time=False)

    rows = list(csv.DictReader(path.read_text().splitlines()))
    assert [row["wall_time"] for row in rows] == ["0", "0"]


def test_write_load_displacement_empty(tmp_path):
    with pytest.raises(errors.OutputError) as raised:
        write_load_displacement(tmp_path / "curve.csv", [])

    assert raised.value.details == "no completed load steps"


def test_write_metadata(tmp_path, config, provenance, check):
    path = write_metadata(tmp_path / METADATA_FILE, config, provenance)

    metadata = json.loads(path.read_text())
    check.equal(metadata["config-hash"], provenance.config_hash)
    check.equal(metadata["ell0"], 0.5)
    check.equal(metadata["displacement-increment"], 1e-6)
    check.equal(metadata["quadrature"]["quadrilateral"], "2x2 Gauss")
    check.equal(metadata["config"]["schedule"]["steps"], 2)
    check.is_in("version", metadata)


def test_run_writer(config, unit_mesh, records):
    writer = RunWriter(config)
    mesh = unit_mesh(1)

    snapshot = writer.write_snapshot(12, mesh, SolutionState.zeros(mesh.n_nodes, 0), None)
    table = writer.write_records(records)
    metadata = writer.write_metadata()

    assert writer.directory.is_dir()
    assert snapshot.name == "step_0012.vtk"
    assert table.name == LOAD_DISPLACEMENT_FILE
    assert metadata.name == METADATA_FILE
    # The fixture disables wall time.
    assert all(row["wall_time"] == "0" for row in csv.DictReader(table.read_text().splitlines()))


def test_reruns_are_identical(config, records):
    first = RunWriter(config).write_records(records).read_text()
    second = RunWriter(config).write_records(records).read_text()

    assert first == second

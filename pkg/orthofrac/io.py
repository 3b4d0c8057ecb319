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


"""Configuration parsing and run artifacts: VTK snapshots, CSV and metadata."""

import csv
import dataclasses
import hashlib
import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np
import pydantic
import yaml

import orthofrac
from orthofrac import errors
from orthofrac.mesh.quadtree import ErrorMap, QuadtreeMesh
from orthofrac.models.config_model import SimulationConfig
from orthofrac.models.record_model import StepRecord
from orthofrac.state import SolutionState

logger = logging.getLogger(__name__)

VTK_QUAD = 9
VTK_POLYGON = 7

CSV_COLUMNS = (
    "step",
    "displacement",
    "reaction",
    "dofs",
    "iterations",
    "wall_time",
    "elements",
)

METADATA_FILE = "metadata.json"
LOAD_DISPLACEMENT_FILE = "load_displacement.csv"


def _key_line(root: yaml.Node | None, loc: Sequence[int | str]) -> int | None:
    """Return the 1-based line of the key addressed by ``loc``, if present."""
    node = root
    line = None
    for part in loc:
        if isinstance(node, yaml.MappingNode) and isinstance(part, str):
            spellings = {part, part.replace("_", "-"), part.replace("-", "_")}
            for key, value in node.value:
                if key.value in spellings:
                    line = key.start_mark.line + 1
                    node = value
                    break
            else:
                return None
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int):
            if part >= len(node.value):
                return None
            node = node.value[part]
            line = node.start_mark.line + 1
        else:
            return None
    return line


def _issues(
    exc: pydantic.ValidationError, root: yaml.Node | None
) -> errors.ConfigIssueList:
    issue_list = []
    for error in exc.errors():
        loc = error["loc"]
        issue = {
            "loc": ".".join(str(part) for part in loc) or "<root>",
            "message": error["msg"],
        }
        line = _key_line(root, loc)
        if line is not None:
            issue["line"] = str(line)
        issue_list.append(issue)
    return errors.ConfigIssueList(issue_list)


def load_config(data: dict[str, Any], root: yaml.Node | None = None) -> SimulationConfig:
    """Validate configuration data and fill derived defaults.

    :param root: composed YAML tree of ``data``, used to locate issues.

    :raises errors.ConfigError: if the data does not describe a valid run.
    """
    try:
        config = SimulationConfig.unmarshal(data)
    except TypeError as exc:
        raise errors.ConfigError(
            "Configuration must be a mapping of sections.",
            resolution="Start the file with the 'geometry:' section.",
        ) from exc
    except pydantic.ValidationError as exc:
        issues = _issues(exc, root)
        raise errors.ConfigError(
            f"Configuration has {len(issues)} invalid field(s).", issues=issues
        ) from exc
    return config.resolved()


def parse_config(path: Path) -> SimulationConfig:
    """Read and validate a YAML configuration file.

    :raises errors.ConfigError: if the file is unreadable, is not YAML or
        fails validation. Issues carry the line of the offending key.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise errors.ConfigError(
            f"Cannot read configuration {str(path)!r}: {exc.strerror}."
        ) from exc

    try:
        data = yaml.safe_load(text)
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        raise errors.ConfigError(
            f"Configuration {str(path)!r} is not valid YAML.",
            resolution=str(exc),
        ) from exc

    config = load_config(data, root)
    logger.debug("Loaded configuration %s (hash %s).", path, config_hash(config))
    return config


def config_hash(config: SimulationConfig) -> str:
    """SHA-256 of the canonical JSON form of ``config``."""
    canonical = json.dumps(config.marshal(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclasses.dataclass(frozen=True)
class Provenance:
    """Config hash and the numerical parameters echoed into every artifact."""

    config_hash: str
    ell0: float
    increment: float
    staggered_tolerance: float
    error_tolerance: float

    @classmethod
    def from_config(cls, config: SimulationConfig) -> "Provenance":
        config = config.resolved()
        assert config.phasefield.ell0 is not None
        assert config.schedule.displacement_increment is not None
        return cls(
            config_hash=config_hash(config),
            ell0=config.phasefield.ell0,
            increment=config.schedule.displacement_increment,
            staggered_tolerance=config.schedule.staggered_tolerance,
            error_tolerance=config.mesh.error_tolerance,
        )

    def echo(self) -> str:
        return (
            f"config-hash={self.config_hash} ell0={self.ell0:.6g} "
            f"du={self.increment:.6g} staggered-tol={self.staggered_tolerance:.3g} "
            f"error-tol={self.error_tolerance:.3g}"
        )


def write_vtk(
    path: Path,
    mesh: QuadtreeMesh,
    state: SolutionState,
    error_map: ErrorMap | None,
    *,
    step: int,
    provenance: Provenance,
) -> Path:
    """Write a legacy ASCII unstructured grid snapshot.

    Quadrilaterals are written as VTK quads and elements with hanging nodes
    as generic polygons. Without an error map the element error is zero.

    :raises errors.OutputError: if the file cannot be written.
    """
    points = np.column_stack([mesh.nodes, np.zeros(mesh.n_nodes)])
    displacement = np.column_stack([state.displacement, np.zeros(mesh.n_nodes)])
    element_errors = (
        np.zeros(mesh.n_elements) if error_map is None else error_map.element_errors
    )
    connectivity_size = sum(element.n_nodes + 1 for element in mesh.elements)

    try:
        with path.open("w", encoding="utf-8") as handle:
            handle.write("# vtk DataFile Version 2.0\n")
            handle.write(f"orthofrac step {step} {provenance.echo()}\n")
            handle.write("ASCII\nDATASET UNSTRUCTURED_GRID\n")
            handle.write(f"POINTS {mesh.n_nodes} double\n")
            np.savetxt(handle, points, fmt="%.17g")

            handle.write(f"CELLS {mesh.n_elements} {connectivity_size}\n")
            for element in mesh.elements:
                handle.write(" ".join(map(str, (element.n_nodes, *element.nodes))) + "\n")
            handle.write(f"CELL_TYPES {mesh.n_elements}\n")
            for element in mesh.elements:
                handle.write(f"{VTK_QUAD if element.n_nodes == 4 else VTK_POLYGON}\n")

            handle.write(f"POINT_DATA {mesh.n_nodes}\n")
            handle.write("VECTORS u double\n")
            np.savetxt(handle, displacement, fmt="%.17g")
            handle.write("SCALARS phi double 1\nLOOKUP_TABLE default\n")
            np.savetxt(handle, state.phi, fmt="%.17g")

            handle.write(f"CELL_DATA {mesh.n_elements}\n")
            handle.write("SCALARS element_error double 1\nLOOKUP_TABLE default\n")
            np.savetxt(handle, element_errors, fmt="%.17g")
            handle.write("SCALARS level int 1\nLOOKUP_TABLE default\n")
            np.savetxt(handle, [cell.level for cell in mesh.cells], fmt="%d")
    except OSError as exc:
        raise errors.OutputError(path, exc) from exc

    logger.debug("Wrote %s (%d elements).", path, mesh.n_elements)
    return path


def write_load_displacement(
    path: Path,
    records: Sequence[StepRecord],
    *,
    wall_time: bool = True,
) -> Path:
    """Write the load-displacement table: a header and one row per step.

    Provenance lives in the metadata file and the VTK titles. With
    ``wall_time`` off the wall time column holds zeros so that reruns
    compare equal.

    :raises errors.OutputError: if there are no records or the file cannot
        be written.
    """
    if not records:
        raise errors.OutputError(path, ValueError("no completed load steps"))
    try:
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for record in records:
                writer.writerow(
                    [
                        record.step,
                        f"{record.displacement:.17g}",
                        f"{record.reaction:.17g}",
                        record.dofs,
                        record.iterations,
                        f"{record.wall_time if wall_time else 0.0:.17g}",
                        record.elements,
                    ]
                )
    except OSError as exc:
        raise errors.OutputError(path, exc) from exc
    return path


def write_metadata(path: Path, config: SimulationConfig, provenance: Provenance) -> Path:
    """Write the resolved configuration and provenance as JSON.

    :raises errors.OutputError: if the file cannot be written.
    """
    config = config.resolved()
    metadata = {
        "version": orthofrac.__version__,
        "config-hash": provenance.config_hash,
        "ell0": provenance.ell0,
        "displacement-increment": provenance.increment,
        "quadrature": {
            "quadrilateral": f"{config.mesh.quad_order}x{config.mesh.quad_order} Gauss",
            "polygon": f"fan triangulation, triangle order {config.mesh.triangle_order}",
        },
        "config": config.marshal(),
    }
    try:
        path.write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise errors.OutputError(path, exc) from exc
    return path


class RunWriter:
    """Per-step artifacts of one run in the configured output directory.

    Files are flushed as each step completes so that an interrupted run
    keeps every finished step.
    """

    def __init__(self, config: SimulationConfig) -> None:
        self.config = config.resolved()
        self.directory = self.config.output.directory
        self.provenance = Provenance.from_config(self.config)
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise errors.OutputError(self.directory, exc) from exc

    def snapshot_path(self, step: int) -> Path:
        return self.directory / f"step_{step:04d}.vtk"

    def write_metadata(self) -> Path:
        return write_metadata(self.directory / METADATA_FILE, self.config, self.provenance)

    def write_snapshot(
        self,
        step: int,
        mesh: QuadtreeMesh,
        state: SolutionState,
        error_map: ErrorMap | None,
    ) -> Path:
        return write_vtk(
            self.snapshot_path(step),
            mesh,
            state,
            error_map,
            step=step,
            provenance=self.provenance,
        )

    def write_records(self, records: Sequence[StepRecord]) -> Path:
        return write_load_displacement(
            self.directory / LOAD_DISPLACEMENT_FILE,
            records,
            wall_time=self.config.output.wall_time,
        )

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

"""Runs of the shipped specimen configurations."""

import copy
from collections.abc import Callable
from pathlib import Path
from typing import Any

import pytest
import yaml
from orthofrac.io import load_config
from orthofrac.models import SimulationConfig

CONFIGS = Path(__file__).parents[2] / "configs"


@pytest.fixture(scope="session")
def specimen_data() -> Callable[[str], dict[str, Any]]:
    """Raw data of a configuration under ``configs/``."""
    cache: dict[str, dict[str, Any]] = {}

    def _data(name: str) -> dict[str, Any]:
        if name not in cache:
            cache[name] = yaml.safe_load((CONFIGS / f"{name}.yaml").read_text())
        return copy.deepcopy(cache[name])

    return _data


@pytest.fixture
def specimen(specimen_data, tmp_path) -> Callable[..., SimulationConfig]:
    """Load a configuration, writing to ``tmp_path``.

    Keyword arguments replace whole entries of the named sections, for
    example ``specimen("edge-crack-theta-0", mesh={"adaptive": False})``.
    """

    def _specimen(name: str, **sections: dict[str, Any]) -> SimulationConfig:
        data = specimen_data(name)
        data["output"] = {"directory": str(tmp_path / name), "wall-time": False}
        for section, values in sections.items():
            data.setdefault(section, {}).update(values)
        return load_config(data)

    return _specimen

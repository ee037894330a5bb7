"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0
"""

import copy
import json
import math

import numpy as np
import pytest

from core.config import load_config
from core.geometry import DistanceVector, MassVector
from engine.solver import SolverOptions, minimize_U


@pytest.fixture
def config():
    cfg = copy.deepcopy(load_config())
    cfg["logging"]["run_log"] = False
    return cfg


@pytest.fixture
def config_file(tmp_path, config):
    """Конфиг без журнала запусков для тестов командной строки"""
    path = tmp_path / "system_config.json"
    path.write_text(json.dumps(config), encoding='utf-8')
    return str(path)


@pytest.fixture
def rng():
    return np.random.default_rng(20260119)


@pytest.fixture
def unit_masses():
    return MassVector(1.0, 1.0, 1.0, 1.0)


@pytest.fixture
def square_r():
    """Единичный квадрат: I = 1 при равных массах"""
    return DistanceVector(1.0, math.sqrt(2.0), 1.0, 1.0, math.sqrt(2.0), 1.0)


@pytest.fixture(scope="session")
def square_record():
    return minimize_U(MassVector(1.0, 1.0, 1.0, 1.0), SolverOptions.from_config())


@pytest.fixture(scope="session")
def trapezoid_record():
    return minimize_U(MassVector(2.0, 2.0, 1.0, 1.0), SolverOptions.from_config())

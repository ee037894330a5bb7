"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0
"""

import copy
import json
import os
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent.parent
CONFIG_PATH = PROJECT_ROOT / "config" / "system_config.json"

# Значения по умолчанию, если config/system_config.json нет
DEFAULT_CONFIG = {
    "system": {"name": "CCC4", "version": "1.0.0"},
    "geometry": {"eps_H": 1e-9, "eps_tri": 1e-12, "in_D_tol": 1e-8},
    "chart": {"interior_margin": 1e-4, "region_tol": 1e-12, "max_draws": 1_000_000},
    "solver": {
        "starts": 8,
        "seed": 0,
        "max_iterations": 500,
        "grad_tol": 1e-11,
        "constraint_tol": 1e-12,
        "cluster_tol": 1e-6,
        "cocircular_tol": 1e-6,
        "newton_threshold": 1.0,
        "armijo": 1e-4,
        "max_backtracks": 60,
    },
    "certify": {
        "stationarity_tol": 1e-8,
        "dziobek_tol": 1e-9,
        "sigma_sq_tol": 1e-9,
        "virial_tol": 1e-9,
        "cartesian_tol": 1e-7,
    },
    "inverse": {"compat_tol": 1e-9, "max_rounds": 5, "mass_total": 4.0},
    "scan": {"mass_min": 0.5, "mass_max": 3.0, "starts": 1, "schema": 1},
    "performance": {"max_workers": 2},
    "logging": {"level": "WARNING", "run_log": True, "max_entries": 100},
    "paths": {"logs": "data/logs/", "run_log": "data/logs/run_log.json"},
}


def _merge(base, override):
    """Рекурсивно накладывает override на base"""
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value
    return base


def load_config(path=None):
    """Читает system_config.json поверх значений по умолчанию"""
    config = copy.deepcopy(DEFAULT_CONFIG)
    config_path = Path(path) if path is not None else CONFIG_PATH
    if config_path.exists():
        with open(config_path, 'r', encoding='utf-8') as f:
            _merge(config, json.load(f))
    return config


def default_jobs(config=None):
    """CCC4_JOBS из окружения, иначе performance.max_workers"""
    env = os.environ.get("CCC4_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    config = config or load_config()
    return max(1, int(config["performance"]["max_workers"]))

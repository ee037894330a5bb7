"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0

Скан пространства масс: сетка N³, одна строка на точку, CSV в порядке сетки.
"""

import itertools
import logging
from dataclasses import dataclass
from multiprocessing import Pool

import numpy as np
import pandas as pd

from core.config import load_config
from core.errors import Ccc4Error, InvalidInputError
from core.geometry import MassVector

from .solver import SolverOptions, minimize_U

logger = logging.getLogger(__name__)

SCAN_HEADER = ("m1", "m2", "m3", "m4", "K_star", "U_star", "lambda",
               "is_cocircular", "iterations", "converged")
MASS_NAMES = ("m1", "m2", "m3", "m4")


@dataclass(frozen=True)
class ScanRow:
    m1: float
    m2: float
    m3: float
    m4: float
    K_star: float = None
    U_star: float = None
    lambda_: float = None
    is_cocircular: bool = None
    iterations: int = None
    converged: bool = False

    def record(self):
        """Ячейки строки по SCAN_HEADER; None пишется пустой ячейкой"""
        def flag(value):
            return None if value is None else ("true" if value else "false")

        head = dict(zip(MASS_NAMES, (self.m1, self.m2, self.m3, self.m4)))
        if not self.converged:
            return {**head, "K_star": None, "U_star": None, "lambda": None,
                    "is_cocircular": None, "iterations": None, "converged": "false"}
        return {**head, "K_star": self.K_star, "U_star": self.U_star, "lambda": self.lambda_,
                "is_cocircular": flag(self.is_cocircular), "iterations": self.iterations,
                "converged": "true"}


def parse_fix(text):
    """'m4=1' → ('m4', 1.0)"""
    try:
        name, value = text.split("=")
        name, value = name.strip(), float(value)
    except ValueError as e:
        raise InvalidInputError(f"--fix expects mK=value, got {text!r}") from e
    if name not in MASS_NAMES or value <= 0.0:
        raise InvalidInputError(f"--fix expects one of m1..m4 with a positive value, got {text!r}")
    return name, value


def mass_grid(n, fix=("m4", 1.0), lo=0.5, hi=3.0):
    """Точки сетки в лексикографическом порядке; Σm = 4"""
    if n < 2:
        raise InvalidInputError(f"grid size must be at least 2, got {n}")
    fixed_index = MASS_NAMES.index(fix[0])
    values = np.linspace(lo, hi, n)
    grid = []
    for free in itertools.product(values, repeat=3):
        masses = list(free)
        masses.insert(fixed_index, fix[1])
        grid.append(MassVector.from_array(masses).normalized(4.0))
    return grid


def scan_point(args) -> ScanRow:
    m, opts = args
    head = dict(zip(MASS_NAMES, m.as_array().tolist()))
    try:
        rec = minimize_U(m, opts)
    except Ccc4Error as e:
        logger.warning(f"[СКАН] m = {m.as_array().tolist()}: {e}")
        return ScanRow(**head)
    if not rec.converged:
        return ScanRow(**head)
    return ScanRow(K_star=rec.k_value, U_star=rec.scalars.U, lambda_=rec.multipliers.lambda_,
                   is_cocircular=rec.is_cocircular, iterations=rec.iterations, converged=True, **head)


def run_scan(n, fix=("m4", 1.0), jobs=1, opts: SolverOptions = None, config=None):
    """Строки в порядке сетки при любом числе процессов"""
    config = config or load_config()
    sc = config["scan"]
    opts = opts or SolverOptions.from_config(config, starts=int(sc["starts"]))
    tasks = [(m, opts) for m in mass_grid(n, fix, sc["mass_min"], sc["mass_max"])]
    logger.info(f"[СКАН] {len(tasks)} точек, процессов: {jobs}")
    if jobs <= 1:
        rows = [scan_point(t) for t in tasks]
    else:
        with Pool(processes=jobs) as pool:
            rows = pool.map(scan_point, tasks)
    cocircular = sum(1 for row in rows if row.is_cocircular)
    logger.info(f"[СКАН] готово: вписанных {cocircular} из {len(rows)}")
    return rows


def write_scan_csv(rows, stream, schema=1):
    stream.write(f"# ccc4-schema={schema}\n")
    frame = pd.DataFrame([row.record() for row in rows], columns=list(SCAN_HEADER))
    frame.to_csv(stream, index=False, float_format="%.17g", na_rep="", lineterminator="\n")

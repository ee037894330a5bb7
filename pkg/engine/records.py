"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0

JSON записи решения: 17 значащих цифр, неконечные числа как null.
"""

import json
import math
import os
from dataclasses import asdict, is_dataclass

import numpy as np

from core.chart import VWPoint
from core.errors import InvalidInputError, RecordFormatError
from core.geometry import DistanceVector, MassVector, ScalarReport

from .solver import Multipliers, SolveRecord

RECORD_FIELDS = (
    "masses", "r_star", "chart_point", "multipliers", "scalars", "minors", "a_terms",
    "dziobek_residual", "sigma_sq_residuals", "iterations", "converged",
    "is_cocircular", "k_value", "metadata",
)


def _format_float(x):
    if not math.isfinite(x):
        return "null"
    return "%.17g" % x


def _encode(value, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_float(float(value))
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if is_dataclass(value):
        value = asdict(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}"
                 for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) and not is_dataclass(v) for v in value):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in value) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(value).__name__}")


def encode_json(value, indent=2) -> str:
    """Детерминированный JSON: порядок ключей как в объекте, float через %.17g"""
    return _encode(value, indent, 0) + "\n"


def record_to_dict(rec: SolveRecord) -> dict:
    mult = rec.multipliers
    return {
        "masses": asdict(rec.masses),
        "r_star": asdict(rec.r_star),
        "chart_point": {"v": list(rec.chart_point.v), "w": list(rec.chart_point.w)},
        "multipliers": {
            "lambda": mult.lambda_,
            "sigma": mult.sigma,
            "stationarity_residual": mult.stationarity_residual,
        },
        "scalars": asdict(rec.scalars),
        "minors": list(rec.minors),
        "a_terms": list(rec.a_terms),
        "dziobek_residual": rec.dziobek_residual,
        "sigma_sq_residuals": list(rec.sigma_sq_residuals),
        "iterations": rec.iterations,
        "converged": rec.converged,
        "is_cocircular": rec.is_cocircular,
        "k_value": rec.k_value,
        "metadata": dict(rec.metadata),
    }


def _real(x):
    return math.nan if x is None else float(x)


def _reals(values, n, name):
    if not isinstance(values, list) or len(values) != n:
        raise RecordFormatError(f"field {name!r} must be a list of {n} numbers")
    return tuple(_real(v) for v in values)


def record_from_dict(data) -> SolveRecord:
    if not isinstance(data, dict):
        raise RecordFormatError("record must be a JSON object")
    missing = [name for name in RECORD_FIELDS if name not in data and name != "metadata"]
    if missing:
        raise RecordFormatError(f"missing fields: {', '.join(missing)}")
    try:
        mult = data["multipliers"]
        return SolveRecord(
            masses=MassVector(**{k: float(v) for k, v in data["masses"].items()}),
            r_star=DistanceVector(**{k: float(v) for k, v in data["r_star"].items()}),
            chart_point=VWPoint(_reals(data["chart_point"]["v"], 3, "v"),
                                _reals(data["chart_point"]["w"], 3, "w")),
            multipliers=Multipliers(float(mult["lambda"]), float(mult["sigma"]),
                                    _real(mult["stationarity_residual"])),
            scalars=ScalarReport(**{k: _real(v) for k, v in data["scalars"].items()}),
            minors=_reals(data["minors"], 6, "minors"),
            a_terms=_reals(data["a_terms"], 3, "a_terms"),
            dziobek_residual=_real(data["dziobek_residual"]),
            sigma_sq_residuals=_reals(data["sigma_sq_residuals"], 3, "sigma_sq_residuals"),
            iterations=int(data["iterations"]),
            converged=bool(data["converged"]),
            is_cocircular=bool(data["is_cocircular"]),
            k_value=_real(data["k_value"]),
            metadata=dict(data.get("metadata") or {}),
        )
    except RecordFormatError:
        raise
    except (KeyError, TypeError, ValueError, InvalidInputError) as e:
        raise RecordFormatError(f"invalid record: {e}") from e


def save_record(rec: SolveRecord, filepath):
    """Пишет запись; каталоги создаются при необходимости"""
    directory = os.path.dirname(os.fspath(filepath))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(filepath, 'w', encoding='utf-8') as f:
        f.write(encode_json(record_to_dict(rec)))


def load_record(filepath) -> SolveRecord:
    with open(filepath, 'r', encoding='utf-8') as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise RecordFormatError(f"not a JSON document: {e}") from e
    return record_from_dict(data)

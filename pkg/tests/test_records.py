import json
import math
from dataclasses import replace

import pytest

from core.errors import RecordFormatError
from engine.records import (RECORD_FIELDS, encode_json, load_record, record_from_dict,
                            record_to_dict, save_record)


def test_record_survives_disk(tmp_path, trapezoid_record):
    path = tmp_path / "records" / "trapezoid.json"
    save_record(trapezoid_record, path)
    loaded = load_record(path)
    assert loaded == trapezoid_record
    assert loaded.metadata == trapezoid_record.metadata


def test_record_has_every_field(square_record):
    data = record_to_dict(square_record)
    assert tuple(data) == RECORD_FIELDS
    assert set(data["multipliers"]) == {"lambda", "sigma", "stationarity_residual"}


def test_floats_keep_seventeen_digits():
    text = encode_json({"x": 0.1, "y": 1.0 / 3.0})
    assert '"x": 0.10000000000000001' in text
    assert json.loads(text)["y"] == 1.0 / 3.0


def test_non_finite_values_become_null():
    data = json.loads(encode_json({"a": math.nan, "b": [math.inf, 1.0]}))
    assert data == {"a": None, "b": [None, 1.0]}


def test_nan_field_loads_as_nan(tmp_path, square_record):
    rec = replace(square_record, dziobek_residual=math.nan)
    path = tmp_path / "nan.json"
    save_record(rec, path)
    assert math.isnan(load_record(path).dziobek_residual)


def test_encoding_is_deterministic(square_record):
    assert encode_json(record_to_dict(square_record)) == encode_json(record_to_dict(square_record))


def test_broken_json_is_reported(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{ not json", encoding='utf-8')
    with pytest.raises(RecordFormatError):
        load_record(path)


@pytest.mark.parametrize("field", ["masses", "multipliers", "minors"])
def test_missing_field_is_reported(field, square_record):
    data = json.loads(encode_json(record_to_dict(square_record)))
    del data[field]
    with pytest.raises(RecordFormatError, match=field):
        record_from_dict(data)


def test_wrong_shapes_are_reported(square_record):
    data = json.loads(encode_json(record_to_dict(square_record)))
    data["minors"] = data["minors"][:5]
    with pytest.raises(RecordFormatError):
        record_from_dict(data)
    data = json.loads(encode_json(record_to_dict(square_record)))
    data["masses"]["m1"] = -1.0
    with pytest.raises(RecordFormatError):
        record_from_dict(data)
    with pytest.raises(RecordFormatError):
        record_from_dict([1, 2, 3])

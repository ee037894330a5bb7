import json

import pytest

from shell.ccc4_shell import (EXIT_CANT_CREATE, EXIT_CHECK_FAILED, EXIT_NO_INPUT, EXIT_OK,
                              EXIT_USAGE, main)


def _run(config_file, *argv):
    return main(["--config", config_file, *argv])


def test_solve_prints_a_record(config_file, capsys):
    assert _run(config_file, "solve", "--masses", "1,1,1,1") == EXIT_OK
    record = json.loads(capsys.readouterr().out)
    assert record["converged"] is True
    assert record["is_cocircular"] is True
    assert record["multipliers"]["lambda"] == pytest.approx(0.6767767, abs=1e-7)


def test_negative_mass_is_a_usage_error(config_file, capsys):
    with pytest.raises(SystemExit) as excinfo:
        _run(config_file, "solve", "--masses", "1,1,1,-1")
    assert excinfo.value.code == EXIT_USAGE
    assert "masses must be positive" in capsys.readouterr().err


def test_missing_subcommand_is_a_usage_error(config_file):
    with pytest.raises(SystemExit) as excinfo:
        _run(config_file)
    assert excinfo.value.code == EXIT_USAGE


def test_inverse_of_the_square(config_file, capsys):
    assert _run(config_file, "inverse", "--angles", "0,90,180,270", "--degrees") == EXIT_OK
    result = json.loads(capsys.readouterr().out)
    assert result["feasible"] is True
    assert result["masses"] == pytest.approx([1.0, 1.0, 1.0, 1.0], rel=1e-10)


def test_inverse_generic_shape_is_infeasible(config_file, capsys):
    assert _run(config_file, "inverse", "--angles", "0,50,180,300", "--degrees") == EXIT_CHECK_FAILED
    assert capsys.readouterr().out.startswith("infeasible:")


def test_inverse_coincident_angles(config_file):
    with pytest.raises(SystemExit) as excinfo:
        _run(config_file, "inverse", "--angles", "0,0,90,180", "--degrees")
    assert excinfo.value.code == EXIT_USAGE


def test_inverse_from_shape_file(config_file, tmp_path, capsys):
    shape = tmp_path / "shape.json"
    shape.write_text(json.dumps({"theta": [0.0, 1.5707963267948966, 3.141592653589793,
                                           4.71238898038469], "radius": 2.0}), encoding='utf-8')
    assert _run(config_file, "inverse", "--shape", str(shape)) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["masses"] == pytest.approx([1.0] * 4, rel=1e-10)
    assert _run(config_file, "inverse", "--shape", str(tmp_path / "absent.json")) == EXIT_NO_INPUT


def test_certify_round_trip_and_tamper(config_file, tmp_path, capsys):
    path = tmp_path / "rec.json"
    assert _run(config_file, "solve", "--masses", "2,2,1,1", "--out", str(path)) == EXIT_OK
    assert _run(config_file, "certify", "--in", str(path)) == EXIT_OK
    capsys.readouterr()

    data = json.loads(path.read_text(encoding='utf-8'))
    data["multipliers"]["lambda"] *= 1.01
    path.write_text(json.dumps(data), encoding='utf-8')
    assert _run(config_file, "certify", "--in", str(path)) == EXIT_CHECK_FAILED
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] is False
    assert report["checks"]["stationarity"]["passed"] is False


def test_certify_unreadable_file(config_file, tmp_path):
    assert _run(config_file, "certify", "--in", str(tmp_path / "missing.json")) == EXIT_NO_INPUT
    broken = tmp_path / "broken.json"
    broken.write_text("[]", encoding='utf-8')
    assert _run(config_file, "certify", "--in", str(broken)) == EXIT_NO_INPUT


def test_scan_to_unwritable_path(config_file, tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding='utf-8')
    code = _run(config_file, "scan", "--grid", "2", "--out", str(blocker / "scan.csv"))
    assert code == EXIT_CANT_CREATE


def test_scan_bad_fix(config_file):
    with pytest.raises(SystemExit) as excinfo:
        _run(config_file, "scan", "--grid", "2", "--fix", "m7=1")
    assert excinfo.value.code == EXIT_USAGE


def test_scan_to_file(config_file, tmp_path):
    out = tmp_path / "scan.csv"
    assert _run(config_file, "scan", "--grid", "2", "--out", str(out), "--jobs", "1") == EXIT_OK
    lines = out.read_text(encoding='utf-8').splitlines()
    assert lines[0] == "# ccc4-schema=1"
    assert len(lines) == 10


def test_identities(config_file, capsys):
    assert _run(config_file, "identities", "--samples", "20", "--seed", "3") == EXIT_OK
    table = capsys.readouterr().out
    assert "pech" in table
    assert "FAIL" not in table


def test_run_log_is_capped(config, tmp_path, capsys):
    log_path = tmp_path / "logs" / "run_log.json"
    config["logging"]["run_log"] = True
    config["logging"]["max_entries"] = 2
    config["paths"]["run_log"] = str(log_path)
    cfg_path = tmp_path / "with_log.json"
    cfg_path.write_text(json.dumps(config), encoding='utf-8')

    for _ in range(3):
        assert _run(str(cfg_path), "inverse", "--angles", "0,90,180,270", "--degrees") == EXIT_OK
    log = json.loads(log_path.read_text(encoding='utf-8'))
    assert len(log) == 2
    assert log[-1]["command"] == "inverse"
    assert log[-1]["exit_code"] == EXIT_OK

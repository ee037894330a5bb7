import json

from core.config import DEFAULT_CONFIG, default_jobs, load_config


def test_missing_file_gives_defaults(tmp_path):
    config = load_config(tmp_path / "absent.json")
    assert config == DEFAULT_CONFIG
    assert config is not DEFAULT_CONFIG


def test_file_overrides_are_merged(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"solver": {"starts": 3}, "extra": {"x": 1}}), encoding='utf-8')
    config = load_config(path)
    assert config["solver"]["starts"] == 3
    assert config["solver"]["grad_tol"] == DEFAULT_CONFIG["solver"]["grad_tol"]
    assert config["extra"] == {"x": 1}
    assert DEFAULT_CONFIG["solver"]["starts"] == 8


def test_jobs_from_environment(monkeypatch, config):
    monkeypatch.setenv("CCC4_JOBS", "5")
    assert default_jobs(config) == 5
    monkeypatch.setenv("CCC4_JOBS", "zero")
    assert default_jobs(config) == config["performance"]["max_workers"]
    monkeypatch.delenv("CCC4_JOBS")
    config["performance"]["max_workers"] = 0
    assert default_jobs(config) == 1

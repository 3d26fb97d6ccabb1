import json

import pytest

from exportcast.synthetic import synthetic_panel, wide_csv

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def workspace(tmp_path, monkeypatch):
    """A synthetic wide CSV and a config writer rooted in a temp dir."""
    monkeypatch.delenv("EXPORTCAST_OUT", raising=False)
    (tmp_path / "exports.csv").write_text(wide_csv(synthetic_panel()), encoding="utf-8")

    def write_config(**overrides):
        cfg = {"data_path": "exports.csv", "output_dir": "out"} | overrides
        path = tmp_path / "config.json"
        path.write_text(json.dumps(cfg), encoding="utf-8")
        return path

    return tmp_path, write_config


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

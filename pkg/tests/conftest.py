"""Shared fixtures."""
import pytest

from radixtiles import defaults


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Point the configuration file into a temporary directory and drop the cap override."""
    monkeypatch.setattr(defaults, "config_file_path", str(tmp_path / "config.ini"))
    monkeypatch.delenv("RADIXTILES_CAP", raising=False)
    return tmp_path / "config.ini"

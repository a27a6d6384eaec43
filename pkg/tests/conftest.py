"""Pytest configuration and fixtures."""

import json
import logging
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))

from core.distributions import Instance, with_rates  # noqa: E402
from core.families import complete, parallel  # noqa: E402
from core.graph import MultiGraph  # noqa: E402


@pytest.fixture
def k3():
    """Triangle with edges e1=(0,1), e2=(0,2), e3=(1,2)."""
    return complete(3)


@pytest.fixture
def k4():
    return complete(4)


@pytest.fixture
def two_parallel():
    return parallel(2)


@pytest.fixture
def path4():
    """Tree on four vertices."""
    return MultiGraph.from_pairs(4, [(0, 1), (1, 2), (2, 3)], name="P4")


@pytest.fixture
def k3_instance(k3) -> Instance:
    """K3 with rates 1, 2, 3 on e1, e2, e3."""
    return with_rates(k3, [1.0, 2.0, 3.0])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def write_json(tmp_path):
    """Write a JSON-serializable object to a file under tmp_path and return its path."""

    def _write(name: str, data) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return _write


@pytest.fixture
def isolated_logs(tmp_path, monkeypatch):
    """Point the log directory and the seed variable away from the user's environment."""
    monkeypatch.setenv("BONDSPAN_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.delenv("BONDSPAN_SEED", raising=False)
    monkeypatch.setattr(
        "core.config.AppConfig.get_default_config_path",
        staticmethod(lambda: tmp_path / "missing-config.json"),
    )
    return tmp_path / "logs"


@pytest.fixture
def reset_logging():
    """Close the handlers the command line attaches to the root logger."""
    yield
    for handler in logging.root.handlers[:]:
        logging.root.removeHandler(handler)
        handler.close()

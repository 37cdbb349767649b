"""PrivAR Privacy Pipeline

Shared Test Configuration

Session-wide synthetic mini-fixture and a guard that fails any test
opening a real network connection.

Author: PrivAR Team
License: MIT"""

import logging
import os
import socket

import pytest

from src.common.config import Settings
from src.evaluation.synthetic import generate_mini_fixture
from src.risk_assessment.backends import MockVLMBackend, ScenarioTable


class NetworkAccessError(RuntimeError):
    pass


@pytest.fixture(autouse=True)
def no_network(monkeypatch):
    """Mock backends and in-process services must never touch the network."""
    def guard(*args, **kwargs):
        raise NetworkAccessError(f"network access attempted: {args[1:] if len(args) > 1 else args}")

    monkeypatch.setattr(socket.socket, 'connect', guard)
    monkeypatch.setattr(socket, 'create_connection', guard)


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Tests see only the configuration they set up themselves."""
    for name in list(os.environ):
        if name.startswith('PRIVAR_'):
            monkeypatch.delenv(name)


@pytest.fixture(autouse=True)
def restore_root_logger():
    """configure_logging replaces root handlers; put the originals back."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    for handler in list(root.handlers):
        root.removeHandler(handler)
        if handler not in handlers:
            handler.close()
    for handler in handlers:
        root.addHandler(handler)
    root.setLevel(level)


@pytest.fixture(scope='session')
def mini_fixture(tmp_path_factory):
    """The 12-frame synthetic dataset, generated once per session."""
    return generate_mini_fixture(tmp_path_factory.mktemp('mini'))


@pytest.fixture(scope='session')
def scenario_table(mini_fixture):
    return ScenarioTable.load(mini_fixture.scenarios)


@pytest.fixture
def mock_backend(scenario_table):
    return MockVLMBackend(scenario_table)


@pytest.fixture
def fixture_settings(mini_fixture):
    """Default settings pointed at the fixture's scenario table."""
    return Settings.model_validate({
        'backend': {'kind': 'mock', 'scenario_table': str(mini_fixture.scenarios)},
        'detector': {'manifest_path': str(mini_fixture.manifest)},
    })

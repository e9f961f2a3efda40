"""Top level test fixtures."""

from __future__ import annotations

import os

import pytest
from _pytest.config import Config

SLOW_TESTS_ENV = "ROUGH_HARMONICS_SLOW_TESTS"


def pytest_collection_modifyitems(config: Config, items: list[pytest.Item]):
    if os.environ.get(SLOW_TESTS_ENV, "").lower() in ("1", "true", "yes"):
        return

    skip_slow = pytest.mark.skip(reason=f"slow test; set {SLOW_TESTS_ENV}=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def quiet_loglevel(monkeypatch: pytest.MonkeyPatch):
    """Ignore LOGLEVEL settings of the calling shell."""
    monkeypatch.delenv("LOGLEVEL", raising=False)
    monkeypatch.delenv("ROUGH_HARMONICS_LOGLEVEL", raising=False)

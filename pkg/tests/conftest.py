import os
import sys

import pytest
from hypothesis import HealthCheck, settings as hypothesis_settings

# Ensure the top-level packages can be imported
ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT_DIR not in sys.path:
    sys.path.insert(0, ROOT_DIR)

from tools.engine_config import EngineSettings, set_settings  # noqa: E402
from tools.perm_graph import build_bubble_sort  # noqa: E402


hypothesis_settings.register_profile(
    "engine", deadline=None, max_examples=50, suppress_health_check=[HealthCheck.function_scoped_fixture])
hypothesis_settings.load_profile("engine")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale runs (full 2^24 scans, 10^5-sample searches)")


@pytest.fixture(autouse=True)
def default_settings():
    """Every test starts from the built-in settings, independent of PMC_* variables."""
    settings = EngineSettings(threads=1)
    set_settings(settings)
    yield settings
    set_settings(None)


@pytest.fixture
def b3():
    return build_bubble_sort(3)


@pytest.fixture
def b4():
    return build_bubble_sort(4)


@pytest.fixture
def b5():
    return build_bubble_sort(5)

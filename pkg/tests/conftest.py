import os

import pytest


def pytest_collection_modifyitems(config, items):
    if os.environ.get("LINKCENSUS_SLOW_TESTS"):
        return
    skip = pytest.mark.skip(reason="set LINKCENSUS_SLOW_TESTS=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: optional heavy runs beyond the default suite")

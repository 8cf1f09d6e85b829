"""
    Pytest configuration: acceptance-scale tests are marked ``slow`` and only run with ``--runslow``.
"""

from typing import List

import pytest

def pytest_addoption(parser: pytest.Parser) -> None:
    """ Registers the ``--runslow`` flag. """
    parser.addoption("--runslow", action="store_true", default=False, help="run acceptance-scale tests")

def pytest_collection_modifyitems(config: pytest.Config, items: List[pytest.Item]) -> None:
    """ Skips tests marked ``slow`` unless ``--runslow`` is given. """
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="acceptance-scale, needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)

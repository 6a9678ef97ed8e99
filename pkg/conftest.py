"""
Shared pytest setup: root modules importable, quiet logging, the `slow` marker.
"""

import os
import sys
import logging

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: tabulated-kernel checks that take tens of seconds")
    logging.getLogger().setLevel(logging.WARNING)

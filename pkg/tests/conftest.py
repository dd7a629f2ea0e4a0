from __future__ import annotations

import math

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def h2():
    """Step for the partition (a, b) = (2, 1)."""
    return 2 * math.pi / math.log(2)

import json

import pytest

from distributions.pmf import pmf_from_probs

LABELS = ["a1", "a2", "a3", "a4"]


@pytest.fixture
def p1():
    return pmf_from_probs(LABELS, [0.1, 0.2, 0.3, 0.4])


@pytest.fixture
def p2():
    return pmf_from_probs(LABELS, [0.05, 0.23, 0.27, 0.45])


@pytest.fixture
def binary():
    return pmf_from_probs(["x", "y"], [0.3, 0.7])


@pytest.fixture
def write_dist(tmp_path):
    """Write a distribution JSON payload and return its path."""
    def _write(payload, name="dist.json"):
        path = tmp_path / name
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
        return path
    return _write

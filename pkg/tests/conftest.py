"""Shared fixtures and the acceptance summary printed at the end of a run."""
from __future__ import annotations

import random

import pytest
from hypothesis import HealthCheck, settings

from relhyp.graphs import random_connected_graph

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# filled by test_acceptance.py, one Criterion per test that ran
ACCEPTANCE: dict = {}


def small_graph(seed: int, n_max: int = 9):
    rng = random.Random(seed)
    n = rng.randint(2, n_max)
    return random_connected_graph(n, rng.uniform(0.05, 0.5), rng)


@pytest.fixture(scope="session")
def zz_instance():
    from relhyp.boundary import free_product_instance
    return free_product_instance("Z*Z", window_radius=4)


@pytest.fixture(scope="session")
def line_instance():
    from relhyp.boundary import hyperbolic_instance
    return hyperbolic_instance("Z", window_radius=4)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k].line())

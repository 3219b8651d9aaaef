import functools

import numpy as np
import pytest

from schottky_kp.graph import build_curve, dumbbell_params, mcurve_params
from schottky_kp.periods import period_matrix
from schottky_kp.theta_tau import tau_data_from_curve

KP_GRID = "-1:1:5,-0.5:0.5:5,-0.5:0.5:5"

# criterion number -> (passed, detail), filled by the acceptance tests
ACCEPTANCE: dict = {}


@functools.lru_cache(maxsize=None)
def mcurve(g: int, y: float = 0.01):
    graph, params = mcurve_params(g, y_value=y)
    return build_curve(graph, params)


@functools.lru_cache(maxsize=None)
def mcurve_periods(g: int, y: float = 0.01):
    return period_matrix(mcurve(g, y).group)


@functools.lru_cache(maxsize=None)
def mcurve_tau(g: int, M: int = 3):
    curve = mcurve(g)
    return tau_data_from_curve(curve, None, M, periods=mcurve_periods(g))


@functools.lru_cache(maxsize=None)
def dumbbell(y_edge: float = 0.01):
    graph, params = dumbbell_params(y_edge=y_edge)
    return build_curve(graph, params)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def record_criterion():
    def record(number: int, passed: bool, detail: str):
        ACCEPTANCE[number] = (bool(passed), detail)
        print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}")

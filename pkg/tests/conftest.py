import functools

import numpy as np
import pytest

from gibcfm.forward import ScatteringConfig, solve_forward
from gibcfm.geometry import Circle, Ellipse, Kite
from gibcfm.surface import ImpedanceParams

ACCEPTANCE_LINES = []


def record(criterion, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


CURVES = {"circle": Circle(1.0), "kite": Kite(), "ellipse": Ellipse(2.0, 1.0)}


@functools.lru_cache(maxsize=None)
def farfield(curve_name, k=2.0, mu=0.1, lam=0.0, n=50, m=128):
    cfg = ScatteringConfig(CURVES[curve_name], ImpedanceParams.constant(mu, lam), k, n, m)
    return solve_forward(cfg)


@pytest.fixture
def rng():
    return np.random.default_rng(20241019)


def inside_outside_ratio(imap, curve, margin=0.5):
    """Median W over grid points inside ``curve`` over the median at distance >= margin outside."""
    from gibcfm.geometry import distance_to_curve

    pts = imap.points()
    W = imap.W.ravel()
    inside = curve.contains(pts)
    far = ~inside & (distance_to_curve(curve, pts) >= margin)
    return float(np.median(W[inside]) / np.median(W[far]))

import math

import numpy as np
import pytest

import wedgetug as wt


@pytest.fixture(scope="session")
def psol_p2():
    """Game solution for the quarter-turn wedge at p = 2."""
    return wt.PSolution.build(2.0, math.pi / 4)


@pytest.fixture(scope="session")
def psol_p3():
    return wt.PSolution.build(3.0, 0.4)


@pytest.fixture(scope="session")
def bounds_p2(psol_p2):
    return wt.bound_constants(psol_p2)


@pytest.fixture(scope="session")
def gp_a1_p2():
    return wt.solve_G(1.0, 2.0)


@pytest.fixture(scope="session")
def gk_p2():
    return wt.solve_G(math.inf, 2.0)


def g_exact_p2(a, u):
    """Closed-form shooting profile at p = 2 (exact test oracle)."""
    u = np.asarray(u, dtype=float)
    return (4.0 * a * a * (1.0 - u * u) + 4.0 * a * (1.0 - u)) / (a * a * u * u)


def k_exact_p2(u):
    u = np.asarray(u, dtype=float)
    return 4.0 * (1.0 - u * u) / (u * u)


def theta_exact_p2(a):
    """Exact half-aperture at p = 2: arccos(1/(2a+1)) / 2."""
    return math.acos(1.0 / (2.0 * a + 1.0)) / 2.0

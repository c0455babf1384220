import math

import numpy as np
import pytest

from ghost_duality.experiment import DEFAULT_GEOMETRY, Geometry, detector_branches
from ghost_duality.gaussian_core import make_epr
from ghost_duality.numeric_oracle import Grid2D, momentum_space_propagate, sample_bipartite

# acceptance outcomes, filled by tests/test_acceptance.py and printed at the end
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def geom():
    return DEFAULT_GEOMETRY


@pytest.fixture(scope="session")
def branches(geom):
    return detector_branches(geom)


@pytest.fixture(scope="session")
def z2_grid():
    return np.linspace(-15.0, 15.0, 2048)


@pytest.fixture(scope="session")
def slit_geom():
    """sigma 2, Omega 50, eps 0.25, z0 1 with tau0 = 0.5."""
    return Geometry(sigma=2.0, omega=50.0, epsilon=0.25, z0=1.0, wavelength=0.1, L1=100.0, L2=10.0 * math.pi)


@pytest.fixture(scope="session")
def epr_grid():
    """EPR(1, 10) sampled on a 2048^2 grid of half-width 100."""
    return sample_bipartite(make_epr(1.0, 10.0), Grid2D.square(100.0, 2048))


@pytest.fixture(scope="session")
def epr_grid_tau3(epr_grid):
    return momentum_space_propagate(epr_grid, 3.0)

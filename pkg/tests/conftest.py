import numpy as np
import pytest
from scipy.linalg import expm

from phonon_gw.cavity import CavityConfig
from phonon_gw.gaussian import CovarianceState, symplectic_form

RB87_MASS = 1.44316e-25  # kg


@pytest.fixture
def paper_cavity():
    """L = 1 um, c_s = 10 mm/s, enough modes for every resonant pair used in tests."""
    return CavityConfig(length=1e-6, sound_speed=1e-2, max_mode=24, atom_mass=RB87_MASS)


@pytest.fixture
def small_cavity():
    return CavityConfig(length=1e-6, sound_speed=1e-2, max_mode=8)


def random_physical_state(rng, n_modes=2, scale=0.6, pure=False):
    """S diag(nu) S^T with S = expm(Omega H), H random symmetric."""
    om = symplectic_form(n_modes)
    h = rng.normal(size=(2 * n_modes, 2 * n_modes)) * scale
    S = expm(om @ (h + h.T) / 2)
    nu = np.ones(n_modes) if pure else 1.0 + rng.exponential(1.0, size=n_modes)
    sigma = S @ np.diag(np.repeat(nu, 2)) @ S.T
    return CovarianceState(0.5 * (sigma + sigma.T))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

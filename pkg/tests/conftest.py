"""Shared fixtures: flux models and small prepared Lagrangian states."""

import numpy as np
import pytest

from conswave import lagrangian
from conswave.model import make_preset


@pytest.fixture(scope="session")
def ch_model():
    return make_preset("camassa_holm")


@pytest.fixture(scope="session")
def tcch_model():
    return make_preset("two_component_ch", k=1.0)


@pytest.fixture(scope="session")
def gaussian_state(ch_model):
    """Small Gaussian scenario state at t=0 (u and rho both nonzero)."""
    initial = lagrangian.gaussian_data(0.5, 0.2)
    zmap = lagrangian.build_z_map(initial)
    grid = lagrangian.grid_for(initial, 512, zmap)
    return lagrangian.init_state(initial, grid, zmap)


@pytest.fixture(scope="session")
def peakon_state():
    initial = lagrangian.peakon_data(1.0, 0.0)
    zmap = lagrangian.build_z_map(initial)
    grid = lagrangian.grid_for(initial, 2048, zmap)
    return lagrangian.init_state(initial, grid, zmap)


def smooth_test_state(index: int, n: int) -> lagrangian.LagrangianState:
    """Deterministic smooth synthetic state (sinusoid/Gaussian mixtures).

    Used wherever a family of well-resolved states is needed; amplitudes
    and wavenumbers grow mildly with the index so the family spans a range
    of shapes while staying second-order resolved at n=512.
    """
    grid = lagrangian.LagrangianGrid(z_min=-20.0, z_max=20.0, n=n)
    z = grid.z
    env = np.exp(-((z / 5.0) ** 2))
    u = (0.15 + 0.008 * index) * env * np.cos((0.1 + 0.02 * index) * z + 0.2 * index)
    ux = (0.12 + 0.008 * index) * env * np.sin((0.1 + 0.015 * index) * z + 0.1 * index)
    w = 2.0 * np.arctan(ux)
    v = 1.0 + 0.2 * env * np.cos((0.1 + 0.01 * index) * z)
    rho = (0.08 + 0.008 * index) * env * np.sin((0.1 + 0.01 * index) * z)
    return lagrangian.LagrangianState(t=0.0, u=u, rho=rho, w=w, v=v,
                                      x=z.copy(), grid=grid)

import numpy as np
import pytest

from blochlab import (
    PotentialSpec,
    RingGrid,
    build_hamiltonian,
    build_translation,
    build_wannier,
    solve_bands,
    wannier_projector,
)

# Reference configuration shared by most tests: 8 cells of unit length,
# 32 samples per cell, V = 2 cos(2 pi x / a), four bands.


@pytest.fixture(scope="session")
def ref_grid():
    return RingGrid(8, 1.0, 32)


@pytest.fixture(scope="session")
def ref_potential():
    return PotentialSpec(0.0, ((1, 2.0, 0.0),))


@pytest.fixture(scope="session")
def ref_bands(ref_grid, ref_potential):
    return solve_bands(ref_grid, ref_potential, 4)


@pytest.fixture(scope="session")
def ref_hamiltonian(ref_grid, ref_potential):
    return build_hamiltonian(ref_grid, ref_potential)


@pytest.fixture(scope="session")
def ref_translation(ref_grid):
    return build_translation(ref_grid)


@pytest.fixture(scope="session")
def free_bands(ref_grid):
    return solve_bands(ref_grid, PotentialSpec(), 4)


@pytest.fixture(scope="session")
def site0_projector(ref_bands):
    return wannier_projector(build_wannier(ref_bands, 0, 0))


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)

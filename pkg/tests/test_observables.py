import numpy as np
import pytest

from blochlab import (
    GridMismatchError,
    LocalObservableSeries,
    RingGrid,
    WaveFunction,
    apply_kernel,
    build_wannier,
    cell_periodicity_defect,
    locality_report,
    materialize,
    momentum_power_matrix,
)
from blochlab.lattice import OperatorMatrix


def test_series_validation():
    with pytest.raises(ValueError):
        LocalObservableSeries(((-1, 0, 1.0, 0.0),))
    with pytest.raises(ValueError):
        LocalObservableSeries(((0, 9, 1.0, 0.0),))
    with pytest.raises(ValueError):
        LocalObservableSeries(((0, 0, np.nan, 0.0),))
    with pytest.raises(ValueError):
        LocalObservableSeries(((0, 0, 1.0),))


def test_materialize_identity_and_kinetic(ref_grid):
    ident = materialize(LocalObservableSeries(((0, 0, 1.0, 0.0),)), ref_grid)
    assert np.max(np.abs(ident.entries - np.eye(256))) < 1e-14
    # m = 0, n = 2 is exactly the squared momentum.
    kin = materialize(LocalObservableSeries(((0, 2, 1.0, 0.0),)), ref_grid)
    assert np.max(np.abs(kin.entries - momentum_power_matrix(ref_grid, 2))) < 1e-12


def test_materialize_cell_harmonic_is_tiled_diagonal(ref_grid):
    # m = N has the one-cell period; its diagonal must tile exactly.
    op = materialize(LocalObservableSeries(((8, 0, 1.0, 0.0),)), ref_grid)
    diag = np.diag(op.entries).real
    assert np.array_equal(diag, np.tile(diag[:32], 8))
    expected = np.cos(2.0 * np.pi * ref_grid.points[:32] / ref_grid.cell_length)
    assert np.max(np.abs(diag[:32] - expected)) < 1e-14
    off = op.entries - np.diag(np.diag(op.entries))
    assert np.max(np.abs(off)) == 0.0


def test_materialize_additive_in_terms(ref_grid):
    s1 = LocalObservableSeries(((1, 1, 0.5, 0.0),))
    s2 = LocalObservableSeries(((3, 2, 0.0, 1.2),))
    combined = s1.combined_with(s2)
    a = materialize(s1, ref_grid).entries + materialize(s2, ref_grid).entries
    b = materialize(combined, ref_grid).entries
    assert np.max(np.abs(a - b)) < 1e-12


def test_symmetrize_flag(ref_grid):
    bare = materialize(LocalObservableSeries(((1, 1, 1.0, 0.0),), symmetrize=False), ref_grid)
    assert bare.hermitian_defect() > 1e-3
    sym = materialize(LocalObservableSeries(((1, 1, 1.0, 0.0),)), ref_grid)
    assert sym.hermitian_defect() < 1e-12


def test_materialize_scheme_validation(ref_grid):
    with pytest.raises(ValueError):
        materialize(LocalObservableSeries(((0, 2, 1.0, 0.0),)), ref_grid, scheme="fd5")


def test_finite_difference_approaches_spectral(ref_grid):
    spectral = materialize(LocalObservableSeries(((0, 2, 1.0, 0.0),)), ref_grid).entries
    distances = []
    for scheme in ("fd2", "fd4", "fd6", "fd8"):
        fd = materialize(LocalObservableSeries(((0, 2, 1.0, 0.0),)), ref_grid, scheme=scheme)
        distances.append(np.linalg.norm(fd.entries - spectral))
    assert distances[0] > distances[1] > distances[2] > distances[3]


def test_locality_of_banded_kinetic(ref_grid):
    kin = materialize(LocalObservableSeries(((0, 2, 0.5, 0.0),)), ref_grid, scheme="fd4")
    report = locality_report(kin)
    # A five-point stencil is supported within two samples of the diagonal.
    assert report.bandwidth_mass(2 * ref_grid.spacing) == pytest.approx(1.0, abs=1e-14)
    assert report.locality_width(0.99) <= 2 * ref_grid.spacing
    # Frozen mass fraction within one sample.
    assert report.bandwidth_mass(ref_grid.spacing) == pytest.approx(0.9985860, abs=1e-6)


def test_locality_of_diagonal_operator(ref_grid):
    op = materialize(LocalObservableSeries(((3, 0, 1.0, 0.5),)), ref_grid)
    report = locality_report(op)
    assert report.locality_width(0.99) == 0.0
    assert report.bandwidth_mass(0.0) == 1.0


def test_locality_of_site_projector(ref_grid, site0_projector):
    # The band-0 site projector spreads over several cells: frozen profile.
    report = locality_report(site0_projector)
    assert report.bandwidth_mass(ref_grid.cell_length) == pytest.approx(0.4921197, abs=1e-6)
    assert report.locality_width(0.99) == pytest.approx(3.84375, abs=1e-12)
    assert not report.is_local(ref_grid.cell_length, 0.9)


def test_locality_report_requires_hermitian(ref_grid):
    with pytest.raises(ValueError, match="Hermitian"):
        locality_report(materialize(LocalObservableSeries(((1, 1, 1.0, 0.0),), symmetrize=False),
                                    ref_grid))
    with pytest.raises(ValueError):
        locality_report(OperatorMatrix(ref_grid, np.zeros((256, 256))))


def test_locality_width_threshold_validation(ref_grid, site0_projector):
    report = locality_report(site0_projector)
    with pytest.raises(ValueError):
        report.locality_width(0.0)
    with pytest.raises(ValueError):
        report.locality_width(1.5)


def test_periodicity_defect_of_commuting_operators(ref_grid, ref_hamiltonian, ref_translation):
    assert cell_periodicity_defect(ref_hamiltonian, ref_translation) == 0.0
    cellcos = materialize(LocalObservableSeries(((8, 0, 1.0, 0.0),)), ref_grid)
    assert cell_periodicity_defect(cellcos, ref_translation) < 1e-14


def test_periodicity_defect_of_ring_harmonic(ref_grid, ref_translation):
    # diag cos(2 pi x / L) misses cell periodicity by a computable amount:
    # ||cos(theta + 2 pi / N) - cos(theta)|| / ||cos|| = 2 sin(pi / N).
    op = materialize(LocalObservableSeries(((1, 0, 1.0, 0.0),)), ref_grid)
    defect = cell_periodicity_defect(op, ref_translation)
    assert defect == pytest.approx(2.0 * np.sin(np.pi / 8.0), abs=1e-12)


def test_periodicity_defect_of_site_projector(site0_projector, ref_translation):
    # T moves the site, and distinct-site states are orthogonal, so the
    # defect is exactly sqrt(2) for any potential.
    defect = cell_periodicity_defect(site0_projector, ref_translation)
    assert defect == pytest.approx(np.sqrt(2.0), abs=1e-9)


def test_periodicity_defect_validation(ref_grid, ref_hamiltonian):
    not_unitary = OperatorMatrix(ref_grid, 0.5 * np.eye(256))
    with pytest.raises(ValueError, match="unitary"):
        cell_periodicity_defect(ref_hamiltonian, not_unitary)


def test_apply_kernel_identity_and_diagonal(ref_grid, rng):
    psi = WaveFunction(ref_grid, rng.normal(size=256) + 1j * rng.normal(size=256))
    ident = materialize(LocalObservableSeries(((0, 0, 1.0, 0.0),)), ref_grid)
    out = apply_kernel(ident, psi)
    assert np.max(np.abs(out.samples - psi.samples)) < 1e-12
    cos_op = materialize(LocalObservableSeries(((1, 0, 1.0, 0.0),)), ref_grid)
    expected = np.cos(2.0 * np.pi * ref_grid.points / ref_grid.ring_length) * psi.samples
    assert np.max(np.abs(apply_kernel(cos_op, psi).samples - expected)) < 1e-12


def test_apply_site_projector_to_bloch_state(ref_bands, site0_projector, ref_grid):
    # P_{W} psi_{0 l} = <W|psi> W = exp(+i k_l M a) W / sqrt(N); M = 0 here.
    for l in (0, 3, 6):
        state = ref_bands.state(0, l)
        out = apply_kernel(site0_projector, state.wavefunction)
        w = build_wannier(ref_bands, 0, 0).wavefunction.samples
        assert np.max(np.abs(out.samples - w / np.sqrt(8))) < 1e-8


def test_apply_kernel_grid_mismatch(ref_grid, site0_projector):
    other = RingGrid(8, 1.0, 16)
    psi = WaveFunction(other, np.ones(128))
    with pytest.raises(GridMismatchError):
        apply_kernel(site0_projector, psi)

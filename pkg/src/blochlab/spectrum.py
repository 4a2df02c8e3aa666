"""Band structure of the ring: sector-by-sector solve and translation classifier.

On a ring of N cells the one-cell translation T commutes with a cell-periodic
Hamiltonian, so the spectrum splits into N sectors labelled by l = 0..N-1
with T-eigenvalue exp(+i k_l a), k_l = 2 pi l / L.  States take the Bloch
form psi(x) = u(x) exp(i k_l x) with u cell-periodic.

Two independent routes to the same spectrum are provided and kept separate
on purpose:

* :func:`solve_sector` / :func:`solve_bands` work in the reduced plane-wave
  basis of one sector, never touching the other sectors.
* :func:`classify_by_translation` diagonalizes the dense Hamiltonian with no
  sector knowledge and reads each eigenvector's sector off the translation
  operator afterwards.

Agreement between the two is a meaningful check, so neither calls the other.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .grid import RingGrid, WaveFunction, inner_product
from .lattice import OperatorMatrix, PotentialSpec

# Relative spectral-gap threshold below which eigh ordering inside a
# degenerate cluster is not trustworthy and a deterministic rule takes over.
_CLUSTER_RTOL = 1e-9


@dataclass
class BlochState:
    """One band eigenstate of a definite crystal-momentum sector.

    Attributes
    ----------
    band : int
        Band index n, counted from 0 upward in energy within the sector.
    sector : int
        Crystal-momentum label l in {0..N-1}; the translation eigenvalue is
        exp(+i k_l a).
    energy : float
    wavefunction : WaveFunction
        Normalized full wave psi = u(x) exp(i k_l x).
    cell_part : WaveFunction
        The cell-periodic factor u(x) = psi(x) exp(-i k_l x).
    """

    band: int
    sector: int
    energy: float
    wavefunction: WaveFunction
    cell_part: WaveFunction

    @property
    def wavevector(self) -> float:
        return self.wavefunction.grid.wavevector(self.sector)


def _cell_part(psi: WaveFunction, sector: int) -> WaveFunction:
    grid = psi.grid
    phase = np.exp(-1j * grid.wavevector(sector) * grid.points)
    return WaveFunction(grid, psi.samples * phase)


def fix_gauge(state: BlochState) -> BlochState:
    """Remove the free global phase with a deterministic convention.

    The whole state is rotated so that u at its largest-modulus sample (the
    first such sample on ties) is real and positive.  Applying the fix twice
    changes nothing, and two states differing only by a global phase map to
    the same representative.
    """
    u = state.cell_part.samples
    moduli = np.abs(u)
    top = float(moduli.max())
    # Ties must be detected with a tolerance band: an exactly flat or
    # symmetric profile (plane wave, standing wave) acquires last-bit noise
    # that would otherwise send independent solvers to different peaks.
    peak = int(np.argmax(moduli >= top * (1.0 - 1e-9)))
    value = u[peak]
    if value == 0:
        raise ValueError("cannot fix gauge: cell-periodic part vanishes at its own peak")
    phase = value / abs(value)
    grid = state.wavefunction.grid
    return replace(
        state,
        wavefunction=WaveFunction(grid, state.wavefunction.samples / phase),
        cell_part=WaveFunction(grid, u / phase),
    )


def _tie_broken_order(energies: np.ndarray, vectors: np.ndarray,
                      wavenumbers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Resolve degenerate clusters toward definite plane-wave content.

    Inside each cluster of (numerically) equal energies the eigvectors are
    rotated to diagonalize the restriction of the wavenumber operator, then
    ordered by |q| with positive q first.  This pins the band labels at
    crossings such as the free particle at the zone edge, where LAPACK's
    ordering is arbitrary.
    """
    spread = max(float(energies[-1] - energies[0]), 1.0)
    tol = _CLUSTER_RTOL * spread
    vectors = vectors.copy()
    start = 0
    while start < energies.size:
        stop = start + 1
        while stop < energies.size and energies[stop] - energies[stop - 1] <= tol:
            stop += 1
        if stop - start > 1:
            block = vectors[:, start:stop]
            q_block = block.conj().T @ (wavenumbers[:, None] * block)
            q_vals, q_vecs = np.linalg.eigh(q_block)
            rotated = block @ q_vecs
            q_round = np.rint(q_vals).astype(int)
            rank = np.lexsort((q_round < 0, np.abs(q_round)))
            vectors[:, start:stop] = rotated[:, rank]
        start = stop
    return energies, vectors


def solve_sector(grid: RingGrid, potential: PotentialSpec, sector: int,
                 band_count: int, mass: float = 1.0, hbar: float = 1.0) -> list[BlochState]:
    """Lowest ``band_count`` eigenstates of crystal momentum k_l, l = ``sector``.

    Works entirely in the reduced basis of the P plane waves
    exp(i kappa x)/sqrt(L) with kappa = (2 pi / L)(l + N m), m running over
    the symmetric window [-P/2, P/2).  The kinetic part is diagonal there
    and a cell-periodic potential couples only these waves to each other, so
    the sector block is exact on the grid.
    """
    if not 0 <= sector < grid.n_cells:
        raise ValueError(f"sector must lie in [0, {grid.n_cells}), got {sector}")
    if not 1 <= band_count <= grid.points_per_cell:
        raise ValueError(
            f"band_count must lie in [1, {grid.points_per_cell}], got {band_count}"
        )
    if not np.isfinite(mass) or mass <= 0:
        raise ValueError(f"mass must be positive and finite, got {mass!r}")

    p = grid.points_per_cell
    n_cells = grid.n_cells
    length = grid.ring_length
    m_window = np.arange(-(p // 2), p - p // 2)
    q = sector + n_cells * m_window          # integer wavenumber index
    kappa = 2.0 * np.pi * q / length

    kinetic = np.diag((hbar**2 / (2.0 * mass)) * kappa**2).astype(complex)
    # The potential couples plane waves differing by a reciprocal lattice
    # vector: <kappa_i| V |kappa_j> = V_hat((q_i - q_j)/N).  q_i - q_j is
    # always a multiple of N inside one sector, and the Toeplitz structure
    # in (i - j) captures all of it.
    row_diffs = (q[0] - q) // n_cells
    col_diffs = (q - q[0]) // n_cells
    first_col = np.array([potential.fourier_coefficient(d) for d in col_diffs])
    first_row = np.array([potential.fourier_coefficient(d) for d in row_diffs])
    block = kinetic + scipy.linalg.toeplitz(first_col, first_row)

    energies, coeffs = np.linalg.eigh(block)
    energies, coeffs = _tie_broken_order(energies, coeffs, q.astype(float))

    x = grid.points
    phases = np.exp(1j * np.outer(x, kappa)) / np.sqrt(length)
    states = []
    for band in range(band_count):
        psi = WaveFunction(grid, phases @ coeffs[:, band])
        state = BlochState(
            band=band,
            sector=sector,
            energy=float(energies[band]),
            wavefunction=psi,
            cell_part=_cell_part(psi, sector),
        )
        states.append(fix_gauge(state))
    return states


@dataclass
class BandStructure:
    """All computed Bloch states, indexed by band n and sector l."""

    grid: RingGrid
    states: list[list[BlochState]]     # states[n][l]

    def __post_init__(self):
        if not self.states or any(len(row) != self.grid.n_cells for row in self.states):
            raise ValueError("states must be a non-empty band-major table of N sectors per band")

    @property
    def band_count(self) -> int:
        return len(self.states)

    @property
    def n_cells(self) -> int:
        return self.grid.n_cells

    def state(self, band: int, sector: int) -> BlochState:
        return self.states[band][sector % self.grid.n_cells]

    def all_states(self):
        for row in self.states:
            yield from row

    def energies(self) -> np.ndarray:
        """Array of shape (band_count, N) of eigenvalues."""
        return np.array([[s.energy for s in row] for row in self.states])

    def state_matrix(self) -> np.ndarray:
        """Columns psi_{n l} in band-major order, shape (G, band_count * N)."""
        cols = [s.wavefunction.samples for s in self.all_states()]
        return np.column_stack(cols)

    def orthonormality_defect(self) -> float:
        """Largest deviation of h * Psi^dagger Psi from the identity."""
        m = self.state_matrix()
        gram = self.grid.spacing * (m.conj().T @ m)
        return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))

    def translation_defect(self) -> float:
        """Largest norm of T_a psi - exp(+i k_l a) psi over all states."""
        from .grid import translate_by_cells

        worst = 0.0
        for s in self.all_states():
            shifted = translate_by_cells(s.wavefunction, 1)
            expected = np.exp(1j * s.wavevector * self.grid.cell_length)
            diff = WaveFunction(self.grid, shifted.samples - expected * s.wavefunction.samples)
            worst = max(worst, diff.norm())
        return worst

    def cell_periodicity_defect(self) -> float:
        """Largest |u(x + a) - u(x)| over all states and samples."""
        p = self.grid.points_per_cell
        worst = 0.0
        for s in self.all_states():
            u = s.cell_part.samples
            worst = max(worst, float(np.max(np.abs(np.roll(u, -p) - u))))
        return worst

    def regauged(self, phases: np.ndarray) -> "BandStructure":
        """Copy with psi_{n l} multiplied by exp(i phases[n, l]).

        Useful for checking which derived quantities are gauge invariant.
        """
        phases = np.asarray(phases, dtype=float)
        if phases.shape != (self.band_count, self.n_cells):
            raise ValueError(
                f"phases must have shape {(self.band_count, self.n_cells)}, got {phases.shape}"
            )
        new_rows = []
        for n, row in enumerate(self.states):
            new_row = []
            for l, s in enumerate(row):
                factor = np.exp(1j * phases[n, l])
                new_row.append(
                    replace(
                        s,
                        wavefunction=WaveFunction(self.grid, factor * s.wavefunction.samples),
                        cell_part=WaveFunction(self.grid, factor * s.cell_part.samples),
                    )
                )
            new_rows.append(new_row)
        return BandStructure(self.grid, new_rows)


def solve_bands(grid: RingGrid, potential: PotentialSpec, band_count: int,
                mass: float = 1.0, hbar: float = 1.0) -> BandStructure:
    """Solve every sector and assemble the band-major table."""
    per_sector = [
        solve_sector(grid, potential, l, band_count, mass=mass, hbar=hbar)
        for l in range(grid.n_cells)
    ]
    rows = [[per_sector[l][n] for l in range(grid.n_cells)] for n in range(band_count)]
    return BandStructure(grid, rows)


def classify_by_translation(hamiltonian: OperatorMatrix, translation: OperatorMatrix,
                            band_count: int) -> BandStructure:
    """Diagonalize H directly and sort eigenvectors into sectors using T.

    No sector structure is assumed up front: the dense H is diagonalized,
    eigenvectors are clustered by energy, each degenerate cluster is rotated
    so the restricted translation matrix becomes diagonal (a unitary Schur
    decomposition, since that restriction is unitary when [H, T] = 0), and
    the sector label l is read from the eigenvalue exp(+i 2 pi l / N).
    """
    grid = hamiltonian.grid
    if translation.grid != grid:
        raise ValueError("hamiltonian and translation live on different grids")
    h = hamiltonian.entries
    t = translation.entries
    scale = max(float(np.max(np.abs(h))), 1.0)
    if hamiltonian.hermitian_defect() > 1e-10 * scale:
        raise ValueError("hamiltonian is not Hermitian")
    comm = float(np.max(np.abs(h @ t - t @ h)))
    if comm > 1e-9 * scale:
        raise ValueError(
            f"hamiltonian does not commute with translation (defect {comm:.3e})"
        )
    if not 1 <= band_count <= grid.points_per_cell:
        raise ValueError(
            f"band_count must lie in [1, {grid.points_per_cell}], got {band_count}"
        )

    energies, vectors = np.linalg.eigh(h)
    spread = max(float(energies[-1] - energies[0]), 1.0)
    tol = _CLUSTER_RTOL * spread

    n_cells = grid.n_cells
    per_sector: list[list[tuple[float, np.ndarray]]] = [[] for _ in range(n_cells)]
    start = 0
    g = grid.total_points
    while start < g:
        stop = start + 1
        while stop < g and energies[stop] - energies[stop - 1] <= tol:
            stop += 1
        block = vectors[:, start:stop]
        if stop - start == 1:
            rotated = block
            t_eigs = np.array([(block.conj().T @ t @ block)[0, 0]])
        else:
            restricted = block.conj().T @ t @ block
            # Unitary matrices are normal, so the complex Schur form is
            # diagonal and Z holds an orthonormal eigenbasis.
            schur_t, z = scipy.linalg.schur(restricted, output="complex")
            rotated = block @ z
            t_eigs = np.diag(schur_t)
        for i in range(stop - start):
            lam = t_eigs[i]
            if abs(abs(lam) - 1.0) > 1e-8:
                raise ValueError(
                    f"translation eigenvalue {lam!r} is not on the unit circle"
                )
            l = int(np.rint(np.angle(lam) * n_cells / (2.0 * np.pi))) % n_cells
            residual = abs(lam - np.exp(2j * np.pi * l / n_cells))
            if residual > 1e-6:
                raise ValueError(
                    f"translation eigenvalue {lam!r} is not an N-th root of unity"
                )
            psi = WaveFunction(grid, rotated[:, i] / np.sqrt(grid.spacing))
            per_sector[l].append((float(energies[start + i]), psi))
        start = stop

    rows: list[list[BlochState]] = [[] for _ in range(band_count)]
    for l, bucket in enumerate(per_sector):
        bucket.sort(key=lambda item: item[0])
        if len(bucket) < band_count:
            raise ValueError(
                f"sector {l} received {len(bucket)} states, fewer than band_count={band_count}"
            )
        for n in range(band_count):
            energy, psi = bucket[n]
            state = BlochState(
                band=n,
                sector=l,
                energy=energy,
                wavefunction=psi,
                cell_part=_cell_part(psi, l),
            )
            rows[n].append(fix_gauge(state))
    return BandStructure(grid, rows)


def spectral_overlap(a: BlochState, b: BlochState) -> complex:
    """Plain state overlap <psi_a|psi_b>, a small convenience."""
    return inner_product(a.wavefunction, b.wavefunction)

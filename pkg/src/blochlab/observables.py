"""Harmonic-series observables and kernel-locality diagnostics.

An observable here is a finite series

    R = sum_t [c_t cos(2 pi m_t x / L) + d_t sin(2 pi m_t x / L)] (-i d/dx)^{n_t}

mixing ring harmonics (period L, not the cell length) with momentum powers.
Harmonics with m a multiple of N are cell-periodic; all others break the
lattice period on purpose.  Materialization produces a dense matrix whose
locality can then be measured by how much Frobenius mass sits within a given
ring distance of the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .derivatives import momentum_power_matrix
from .grid import GridMismatchError, RingGrid, WaveFunction
from .lattice import OperatorMatrix


@dataclass(frozen=True)
class LocalObservableSeries:
    """Finite list of (m, n, c, d) terms; see the module docstring.

    m >= 0 is the ring harmonic, 0 <= n <= 8 the momentum power, and c, d
    the cosine and sine amplitudes.  With ``symmetrize`` (the default) the
    materialized matrix is replaced by its Hermitian part (A + A^dagger)/2,
    since the bare product of a position factor and a momentum power is not
    Hermitian on its own.
    """

    terms: tuple[tuple[int, int, float, float], ...]
    symmetrize: bool = True

    def __post_init__(self):
        cleaned = []
        for term in self.terms:
            if len(term) != 4:
                raise ValueError(f"terms are (m, n, cos_amp, sin_amp) tuples, got {term!r}")
            m, n, c, d = term
            if not isinstance(m, (int, np.integer)) or m < 0:
                raise ValueError(f"harmonic m must be an integer >= 0, got {m!r}")
            if not isinstance(n, (int, np.integer)) or not 0 <= n <= 8:
                raise ValueError(f"momentum power n must be an integer in [0, 8], got {n!r}")
            if not (np.isfinite(c) and np.isfinite(d)):
                raise ValueError(f"amplitudes must be finite, got {term!r}")
            cleaned.append((int(m), int(n), float(c), float(d)))
        object.__setattr__(self, "terms", tuple(cleaned))

    def combined_with(self, other: "LocalObservableSeries") -> "LocalObservableSeries":
        if self.symmetrize != other.symmetrize:
            raise ValueError("cannot combine series with different symmetrize settings")
        return LocalObservableSeries(self.terms + other.terms, symmetrize=self.symmetrize)


def _harmonic_profiles(grid: RingGrid, m: int) -> tuple[np.ndarray, np.ndarray]:
    """cos and sin of 2 pi m x / L on all samples.

    When m is a multiple of N the function has the cell period, and it is
    evaluated on one cell and tiled so the samples repeat exactly.
    """
    if m % grid.n_cells == 0:
        reps = m // grid.n_cells
        x_cell = np.arange(grid.points_per_cell) * grid.spacing
        phase = 2.0 * np.pi * reps * x_cell / grid.cell_length
        return np.tile(np.cos(phase), grid.n_cells), np.tile(np.sin(phase), grid.n_cells)
    phase = 2.0 * np.pi * m * grid.points / grid.ring_length
    return np.cos(phase), np.sin(phase)


def materialize(series: LocalObservableSeries, grid: RingGrid,
                scheme: str = "spectral") -> OperatorMatrix:
    """Dense matrix of the series on the grid.

    Each term is a diagonal position factor times a momentum-power circulant
    from the requested derivative scheme; momentum matrices are cached per
    power so repeated n cost one build.
    """
    g = grid.total_points
    acc = np.zeros((g, g), dtype=complex)
    momentum_cache: dict[int, np.ndarray] = {}
    for m, n, c, d in series.terms:
        cos_prof, sin_prof = _harmonic_profiles(grid, m)
        profile = c * cos_prof + d * sin_prof
        if n == 0:
            acc[np.diag_indices(g)] += profile
            continue
        if n not in momentum_cache:
            momentum_cache[n] = momentum_power_matrix(grid, n, scheme)
        acc += profile[:, None] * momentum_cache[n]
    op = OperatorMatrix(grid, acc, label="series")
    if series.symmetrize:
        op = op.symmetrized()
    return op


@dataclass
class LocalityReport:
    """How the Frobenius mass of a Hermitian kernel spreads off the diagonal.

    ``cumulative`` holds, for each sample distance w = 0..G//2, the fraction
    of squared Frobenius mass with ring distance(i, j) <= w.  Physical
    widths are sample counts times the grid spacing.
    """

    grid: RingGrid
    cumulative: np.ndarray = field(repr=False)
    total_mass: float

    def bandwidth_mass(self, width: float) -> float:
        """Mass fraction within physical ring distance <= width."""
        w = int(np.floor(width / self.grid.spacing + 1e-12))
        w = min(max(w, 0), self.grid.total_points // 2)
        return float(self.cumulative[w])

    def locality_width(self, threshold: float = 0.99) -> float:
        """Smallest physical width holding at least ``threshold`` of the mass."""
        if not 0.0 < threshold <= 1.0:
            raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
        idx = int(np.searchsorted(self.cumulative, threshold - 1e-12))
        idx = min(idx, self.cumulative.size - 1)
        return idx * self.grid.spacing

    def is_local(self, width: float, threshold: float = 0.99) -> bool:
        return self.bandwidth_mass(width) >= threshold


def locality_report(op: OperatorMatrix) -> LocalityReport:
    """Cumulative band-mass profile of a Hermitian operator.

    Entries are binned by the ring distance between their row and column
    samples; the report stores the cumulative fraction of |A_ij|^2 per
    distance.  Hermiticity is required so the profile reads as 'how nonlocal
    is this observable' rather than mixing in an arbitrary non-normal part.
    """
    scale = max(float(np.max(np.abs(op.entries))), 1e-300)
    if op.hermitian_defect() > 1e-8 * scale:
        raise ValueError("locality report requires a Hermitian operator")
    g = op.grid.total_points
    idx = np.arange(g)
    diff = np.abs(idx[:, None] - idx[None, :])
    dist = np.minimum(diff, g - diff)
    weights = np.abs(op.entries) ** 2
    mass = np.bincount(dist.ravel(), weights=weights.ravel(), minlength=g // 2 + 1)
    total = float(mass.sum())
    if total == 0.0:
        raise ValueError("cannot report locality of the zero operator")
    cumulative = np.cumsum(mass[: g // 2 + 1]) / total
    return LocalityReport(op.grid, cumulative, total_mass=total)


def cell_periodicity_defect(op: OperatorMatrix, translation: OperatorMatrix) -> float:
    """Relative Frobenius size of A - T A T^dagger.

    Zero (to roundoff) exactly when the operator commutes with the one-cell
    shift; order one when a single cell's worth of structure moves.
    """
    if op.grid != translation.grid:
        raise GridMismatchError("operator and translation live on different grids")
    t = translation.entries
    unitary_defect = float(np.max(np.abs(t @ t.conj().T - np.eye(t.shape[0]))))
    if unitary_defect > 1e-12:
        raise ValueError("translation operator is not unitary")
    moved = t @ op.entries @ t.conj().T
    return float(np.linalg.norm(op.entries - moved) / max(np.linalg.norm(op.entries), 1e-300))


def apply_kernel(op: OperatorMatrix, chi: WaveFunction) -> WaveFunction:
    """Act with the kernel on a wavefunction: (A chi)_i = sum_j A_ij chi_j."""
    if op.grid != chi.grid:
        raise GridMismatchError("operator and wavefunction live on different grids")
    return WaveFunction(chi.grid, op.entries @ chi.samples)

"""Cell-periodic potentials, dense operators, and the lattice Hamiltonian."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .derivatives import momentum_power_matrix
from .grid import GridMismatchError, RingGrid


@dataclass(frozen=True)
class PotentialSpec:
    """Real potential with the period of one cell, given as a Fourier series.

    V(x) = constant + sum_h [alpha_h cos(2 pi h x / a) + beta_h sin(2 pi h x / a)]

    ``harmonics`` is a tuple of (h, alpha_h, beta_h) with distinct positive
    integer h.  The potential is sampled once on the first cell and tiled, so
    its grid samples are exactly cell-periodic by construction.
    """

    constant: float = 0.0
    harmonics: tuple[tuple[int, float, float], ...] = ()

    def __post_init__(self):
        if not np.isfinite(self.constant):
            raise ValueError(f"constant term must be finite, got {self.constant!r}")
        seen = set()
        cleaned = []
        for term in self.harmonics:
            if len(term) != 3:
                raise ValueError(f"harmonic terms are (index, cos, sin) triples, got {term!r}")
            h, alpha, beta = term
            if not isinstance(h, (int, np.integer)) or h < 1:
                raise ValueError(f"harmonic index must be a positive integer, got {h!r}")
            if h in seen:
                raise ValueError(f"harmonic index {h} appears twice")
            if not (np.isfinite(alpha) and np.isfinite(beta)):
                raise ValueError(f"harmonic amplitudes must be finite, got {term!r}")
            seen.add(h)
            cleaned.append((int(h), float(alpha), float(beta)))
        object.__setattr__(self, "harmonics", tuple(cleaned))

    def sample_cell(self, grid: RingGrid) -> np.ndarray:
        """Values on the P samples of the first cell."""
        x = np.arange(grid.points_per_cell) * grid.spacing
        v = np.full(grid.points_per_cell, float(self.constant))
        for h, alpha, beta in self.harmonics:
            phase = 2.0 * np.pi * h * x / grid.cell_length
            v += alpha * np.cos(phase) + beta * np.sin(phase)
        return v

    def sample(self, grid: RingGrid) -> np.ndarray:
        """Values on all G samples; exact tiling of the first cell."""
        return np.tile(self.sample_cell(grid), grid.n_cells)

    def fourier_coefficient(self, h: int) -> complex:
        """Coefficient of exp(+i 2 pi h x / a); conjugate-symmetric in h."""
        if h == 0:
            return complex(self.constant)
        for idx, alpha, beta in self.harmonics:
            if idx == abs(h):
                c = 0.5 * complex(alpha, -beta)
                return c if h > 0 else np.conj(c)
        return 0j


@dataclass
class OperatorMatrix:
    """Dense operator on grid samples, acting as (A psi)_i = sum_j A_ij psi_j.

    The entries absorb the quadrature weight: a kernel r(x, y) is stored as
    A_ij = h * r(x_i, x_j), so matrix-vector products approximate the
    integral operator directly.
    """

    grid: RingGrid
    entries: np.ndarray
    label: str = field(default="", compare=False)

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        g = self.grid.total_points
        if entries.shape != (g, g):
            raise ValueError(f"entries must have shape ({g}, {g}), got {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ValueError("operator entries must be finite")
        self.entries = entries

    def hermitian_defect(self) -> float:
        """Largest absolute entry of A - A^dagger."""
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def symmetrized(self) -> "OperatorMatrix":
        """(A + A^dagger) / 2, with the same label."""
        sym = 0.5 * (self.entries + self.entries.conj().T)
        return OperatorMatrix(self.grid, sym, label=self.label)

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.entries))


def _require_grid(op: OperatorMatrix, other) -> None:
    if op.grid != other.grid:
        raise GridMismatchError(f"grids differ: {op.grid} vs {other.grid}")


def build_hamiltonian(grid: RingGrid, potential: PotentialSpec, mass: float = 1.0,
                      hbar: float = 1.0, scheme: str = "spectral") -> OperatorMatrix:
    """H = (hbar^2/2m) (-i d/dx)^2 + V(x) as a dense Hermitian operator.

    The kinetic part is a circulant (invariant under any sample shift) and
    the potential diagonal is an exact tiling of one cell, so H commutes
    with the one-cell translation bit for bit.
    """
    if not np.isfinite(mass) or mass <= 0:
        raise ValueError(f"mass must be positive and finite, got {mass!r}")
    if not np.isfinite(hbar) or hbar <= 0:
        raise ValueError(f"hbar must be positive and finite, got {hbar!r}")
    kinetic = (hbar**2 / (2.0 * mass)) * momentum_power_matrix(grid, 2, scheme)
    entries = kinetic + np.diag(potential.sample(grid).astype(complex))
    return OperatorMatrix(grid, entries, label="hamiltonian")


def build_translation(grid: RingGrid) -> OperatorMatrix:
    """Unitary one-cell shift T with (T psi)(x) = psi(x + a).

    T permutes samples: row i has a single 1 in column (i + P) mod G, the
    matrix form of :func:`blochlab.grid.translate_by_cells` with one cell.
    """
    g = grid.total_points
    entries = np.zeros((g, g), dtype=complex)
    rows = np.arange(g)
    entries[rows, (rows + grid.points_per_cell) % g] = 1.0
    return OperatorMatrix(grid, entries, label="translation")


def commutator_norm(a: OperatorMatrix, b: OperatorMatrix) -> float:
    """Frobenius norm of [A, B], a quick commutation check."""
    _require_grid(a, b)
    c = a.entries @ b.entries - b.entries @ a.entries
    return float(np.linalg.norm(c))

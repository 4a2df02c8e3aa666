"""Short-time transition amplitudes between localized points on the ring.

The experiment: prepare a particle exactly at sample z (the discrete stand-in
for a position eigenstate, |z> = e_z / sqrt(h)), evolve for a short time
epsilon under H_m = H + R, and read the amplitude at sample y,

    amp(eps) = <y| exp(-i eps H_m / hbar) |z> = U_{yz}(eps) / h.

To first order in eps this is delta_{yz}/h - (i eps / hbar) H_{yz}/h, so the
small-time growth rate of |amp| between distinct points measures the kernel
entry connecting them: zero for a strictly banded H whenever the points are
farther apart than the band, nonzero as soon as R has long-range entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import OperatorMatrix


@dataclass
class PropagationExperiment:
    """Fixed Hamiltonian, optional perturbation, and a source/target pair.

    ``source`` and ``target`` are sample indices.  The eigendecomposition of
    the total generator is computed once on first use and shared by every
    amplitude evaluated afterwards, so sweeping epsilon costs one dense
    diagonalization total.
    """

    hamiltonian: OperatorMatrix
    source: int
    target: int
    perturbation: OperatorMatrix | None = None
    hbar: float = 1.0
    _eig: tuple[np.ndarray, np.ndarray] | None = field(
        default=None, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        grid = self.hamiltonian.grid
        if self.perturbation is not None and self.perturbation.grid != grid:
            raise ValueError("perturbation lives on a different grid")
        g = grid.total_points
        if not (0 <= self.source < g and 0 <= self.target < g):
            raise ValueError(f"source and target must be sample indices in [0, {g})")
        if not np.isfinite(self.hbar) or self.hbar <= 0:
            raise ValueError(f"hbar must be positive and finite, got {self.hbar!r}")
        total = self.total_matrix()
        defect = float(np.max(np.abs(total - total.conj().T)))
        scale = max(float(np.max(np.abs(total))), 1.0)
        if defect > 1e-10 * scale:
            raise ValueError(f"total generator is not Hermitian (defect {defect:.3e})")

    def total_matrix(self) -> np.ndarray:
        if self.perturbation is None:
            return self.hamiltonian.entries
        return self.hamiltonian.entries + self.perturbation.entries

    def ring_distance(self) -> float:
        return self.hamiltonian.grid.ring_distance(self.source, self.target)

    def kernel_entry(self) -> complex:
        """Matrix entry H_m[target, source] that first-order theory probes."""
        return complex(self.total_matrix()[self.target, self.source])

    def _eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        if self._eig is None:
            energies, vectors = np.linalg.eigh(self.total_matrix())
            self._eig = (energies, vectors)
        return self._eig


def exact_amplitude(experiment: PropagationExperiment, epsilon: float) -> complex:
    """<target| exp(-i eps H_m / hbar) |source> via the cached eigensystem."""
    if not np.isfinite(epsilon):
        raise ValueError(f"epsilon must be finite, got {epsilon!r}")
    energies, vectors = experiment._eigensystem()
    h = experiment.hamiltonian.grid.spacing
    phases = np.exp(-1j * epsilon * energies / experiment.hbar)
    row = vectors[experiment.target, :]
    col = vectors[experiment.source, :]
    return complex((row * phases) @ col.conj() / h)


def first_order_amplitude(experiment: PropagationExperiment, epsilon: float) -> complex:
    """delta_{yz}/h - (i eps / hbar) (H_m)_{yz} / h, the short-time expansion."""
    h = experiment.hamiltonian.grid.spacing
    delta = 1.0 / h if experiment.target == experiment.source else 0.0
    return complex(delta - 1j * epsilon / experiment.hbar * experiment.kernel_entry() / h)


def transport_profile(experiment: PropagationExperiment, epsilon: float) -> np.ndarray:
    """|amplitude|^2 from the source to every sample after time epsilon.

    The h^2-weighted sum of the profile is exactly 1 (unitarity with two
    continuum normalizations), so entries read as transition densities.
    """
    energies, vectors = experiment._eigensystem()
    h = experiment.hamiltonian.grid.spacing
    phases = np.exp(-1j * epsilon * energies / experiment.hbar)
    col = (vectors * phases[None, :]) @ vectors[experiment.source, :].conj()
    return np.abs(col / h) ** 2


def cell_transport_profile(experiment: PropagationExperiment, epsilon: float) -> np.ndarray:
    """Transition probability h^2 sum_{j in cell} |amp_j|^2 per cell."""
    grid = experiment.hamiltonian.grid
    profile = transport_profile(experiment, epsilon) * grid.spacing**2
    return profile.reshape(grid.n_cells, grid.points_per_cell).sum(axis=1)


def linear_response_slope(experiment: PropagationExperiment,
                          epsilons: np.ndarray) -> tuple[float, float]:
    """Fit |amp(eps)| = s * eps + q * eps^2 over the sweep; return (s, q).

    For distinct source and target the first-order theory predicts
    s = |kernel_entry| / (hbar h); the quadratic term absorbs the next order
    so the linear coefficient stays clean over finite sweeps.
    """
    eps = np.asarray(epsilons, dtype=float)
    if eps.size < 2:
        raise ValueError("need at least two epsilon values to fit a slope")
    if np.any(eps <= 0) or not np.all(np.isfinite(eps)):
        raise ValueError("epsilon sweep must be positive and finite")
    if experiment.target == experiment.source:
        raise ValueError("slope fit expects distinct source and target samples")
    mags = np.array([abs(exact_amplitude(experiment, e)) for e in eps])
    basis = np.column_stack([eps, eps**2])
    coeffs, *_ = np.linalg.lstsq(basis, mags, rcond=None)
    return float(coeffs[0]), float(coeffs[1])


def first_order_error_exponent(experiment: PropagationExperiment,
                               epsilons: np.ndarray) -> float:
    """Log-log slope of |exact - first_order| against eps; 2 when the
    expansion is honest."""
    eps = np.asarray(epsilons, dtype=float)
    if eps.size < 2:
        raise ValueError("need at least two epsilon values to fit an exponent")
    errs = np.array(
        [abs(exact_amplitude(experiment, e) - first_order_amplitude(experiment, e)) for e in eps]
    )
    if np.any(errs <= 0):
        raise ValueError("error vanished on the sweep; exponent undefined")
    slope, _ = np.polyfit(np.log(eps), np.log(errs), 1)
    return float(slope)

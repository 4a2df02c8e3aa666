"""Selection-rule scans, winding numbers, and sector-weight probes.

For operators commuting with the one-cell shift, matrix elements between
different crystal-momentum sectors vanish identically: the sectors are
eigenspaces of a unitary with distinct eigenvalues, so <psi'|A|psi> = 0
whenever l' != l.  The scan below measures the full matrix-element table of
an arbitrary kernel over a computed band structure and, when the kernel does
commute with the shift, enforces that theorem on its own output.

The winding number tracks the other side of the same coin: a Bloch state
psi = u exp(i k_l x) with nodeless u carries l units of phase winding around
the ring, and a kernel that leaves windings intact cannot connect sectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import WaveFunction, inner_product, translate_by_cells
from .lattice import OperatorMatrix, build_translation
from .observables import LocalObservableSeries, apply_kernel, cell_periodicity_defect, materialize
from .spectrum import BandStructure, BlochState

# A kernel this close to cell-periodic must show no off-sector leakage
# beyond roundoff; the scan raises if its own output violates that.
_PERIODIC_TOL = 1e-10
_LEAK_TOL = 1e-8


def matrix_element(op: OperatorMatrix, bra: BlochState, ket: BlochState) -> complex:
    """<psi_bra | A | psi_ket> with the quadrature inner product."""
    return inner_product(bra.wavefunction, apply_kernel(op, ket.wavefunction))


@dataclass
class SelectionScan:
    """Table of matrix elements <psi_{n' l'}| A |psi_{n l}> over a band set.

    ``table[n_bra, l_bra, n_ket, l_ket]`` holds the complex element.  The
    moduli are gauge independent only on the diagonal (n', l') = (n, l);
    what the scan summaries use are aggregates that do not depend on the
    per-state phases: largest off-sector modulus, per-harmonic footprints,
    and the sector-difference histogram.
    """

    table: np.ndarray
    periodicity_defect: float
    operator_label: str = ""

    @property
    def band_count(self) -> int:
        return self.table.shape[0]

    @property
    def n_cells(self) -> int:
        return self.table.shape[1]

    def moduli(self) -> np.ndarray:
        return np.abs(self.table)

    def off_sector_max(self) -> float:
        """Largest |element| between different sectors l' != l."""
        mods = self.moduli()
        l_bra = np.arange(self.n_cells)[None, :, None, None]
        l_ket = np.arange(self.n_cells)[None, None, None, :]
        return float(np.max(np.where(l_bra != l_ket, mods, 0.0)))

    def same_band_moduli(self, band: int) -> np.ndarray:
        """N x N moduli within one band, all sector pairs."""
        return self.moduli()[band, :, band, :]

    def hermitian_symmetry_defect(self) -> float:
        """Largest |table[a, b] - conj(table[b, a])| over state pairs."""
        flat = self.table.reshape(self.band_count * self.n_cells, -1)
        return float(np.max(np.abs(flat - flat.conj().T)))

    def sector_difference_profile(self) -> np.ndarray:
        """Largest modulus as a function of (l_ket - l_bra) mod N."""
        mods = self.moduli()
        n = self.n_cells
        profile = np.zeros(n)
        l_bra = np.arange(n)[None, :, None, None]
        l_ket = np.arange(n)[None, None, None, :]
        delta = (l_ket - l_bra) % n
        for d in range(n):
            profile[d] = float(np.max(np.where(delta == d, mods, 0.0)))
        return profile


def selection_scan(op: OperatorMatrix, bands: BandStructure,
                   label: str | None = None) -> SelectionScan:
    """Measure every matrix element of ``op`` over the computed states.

    If the kernel is cell-periodic (relative defect <= 1e-10) the exact
    selection rule applies, and finding off-sector leakage above 1e-8 means
    the scan itself or the states are broken, so a RuntimeError is raised
    rather than returning numbers that contradict a theorem.
    """
    if op.grid != bands.grid:
        raise ValueError("operator and band structure live on different grids")
    psis = bands.state_matrix()
    transformed = op.entries @ psis
    flat = bands.grid.spacing * (psis.conj().T @ transformed)
    b, n = bands.band_count, bands.n_cells
    table = flat.reshape(b, n, b, n)

    defect = cell_periodicity_defect(op, build_translation(bands.grid))
    scan = SelectionScan(
        table=table,
        periodicity_defect=defect,
        operator_label=label if label is not None else op.label,
    )
    if defect <= _PERIODIC_TOL and scan.off_sector_max() > _LEAK_TOL:
        raise RuntimeError(
            "cell-periodic kernel shows off-sector matrix elements "
            f"(defect {defect:.3e}, leakage {scan.off_sector_max():.3e}); "
            "this contradicts the translation selection rule and indicates "
            "a broken scan or band structure"
        )
    return scan


@dataclass
class WindingResult:
    """Winding diagnostics of a sampled curve psi: ring -> C.

    ``value`` is None when the winding is undefined: some sample modulus at
    or below the zero threshold, or a phase step of 0.9 pi or more between
    neighbouring samples (the lift is then untrustworthy).  ``residual`` is
    the distance of the accumulated phase sum from the nearest integer
    multiple of 2 pi, in turns.
    """

    value: int | None
    min_modulus: float
    max_step: float
    residual: float

    @property
    def defined(self) -> bool:
        return self.value is not None


def winding_number(psi: WaveFunction, zero_threshold: float | None = None) -> WindingResult:
    """Total phase accumulated by psi around the ring, in units of 2 pi.

    Phase steps between neighbouring samples use the principal argument of
    psi_{j+1} conj(psi_j), so each step lies in (-pi, pi].  The result is
    declared undefined rather than guessed when the curve passes too close
    to zero or jumps too fast for the principal branch to be meaningful.
    """
    s = psi.samples
    mods = np.abs(s)
    max_mod = float(mods.max())
    min_mod = float(mods.min())
    if zero_threshold is None:
        zero_threshold = 1e-6 * max_mod
    steps = np.angle(np.roll(s, -1) * np.conj(s))
    max_step = float(np.max(np.abs(steps))) if steps.size else 0.0
    total_turns = float(steps.sum() / (2.0 * np.pi))
    nearest = int(np.rint(total_turns))
    residual = abs(total_turns - nearest)
    if max_mod == 0.0 or min_mod <= zero_threshold or max_step >= 0.9 * np.pi:
        return WindingResult(None, min_mod, max_step, residual)
    return WindingResult(nearest, min_mod, max_step, residual)


def sector_weights(psi: WaveFunction) -> np.ndarray:
    """Squared norm of the projection of psi onto each sector l = 0..N-1.

    Uses the exact projector P_l = (1/N) sum_c exp(-i 2 pi l c / N) T^c,
    built from whole-cell shifts only, so the weights always sum to |psi|^2
    (the projectors resolve the identity on the grid).
    """
    grid = psi.grid
    n = grid.n_cells
    shifted = np.stack([translate_by_cells(psi, c).samples for c in range(n)])
    components = np.fft.fft(shifted, axis=0) / n
    return grid.spacing * np.sum(np.abs(components) ** 2, axis=1)


@dataclass
class ProbeReport:
    """What one kernel application does to one Bloch state.

    Records the winding diagnostics of the output curve, its norm, and its
    sector weights, next to the input sector and winding for comparison.
    """

    band: int
    sector: int
    input_winding: WindingResult
    output_winding: WindingResult
    output_norm: float
    output_weights: np.ndarray = field(repr=False)

    def dominant_sectors(self, fraction: float = 1e-6) -> list[int]:
        """Sectors carrying at least ``fraction`` of the output norm squared."""
        total = float(self.output_weights.sum())
        if total == 0.0:
            return []
        return [int(l) for l in np.nonzero(self.output_weights >= fraction * total)[0]]


def winding_preservation_probe(series: LocalObservableSeries, bands: BandStructure,
                               band: int, sector: int,
                               scheme: str = "spectral") -> ProbeReport:
    """Apply a harmonic-series kernel to one Bloch state and inspect the output.

    The point of the probe: a series of ring harmonics multiplies the Bloch
    wave by smooth functions of x and differentiates it, so the output is
    exp(i k_l x) times another smooth ring function.  When that function is
    nodeless the winding survives, and the sector weights show exactly which
    harmonics moved norm between sectors.
    """
    state = bands.state(band, sector)
    op = materialize(series, bands.grid, scheme=scheme)
    out = apply_kernel(op, state.wavefunction)
    return ProbeReport(
        band=band,
        sector=sector,
        input_winding=winding_number(state.wavefunction),
        output_winding=winding_number(out),
        output_norm=out.norm(),
        output_weights=sector_weights(out),
    )

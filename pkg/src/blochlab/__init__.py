"""Numerical laboratory for quantum states on a finite periodic ring.

The package discretizes a ring of N unit cells, solves the single-particle
band problem sector by sector, builds localized lattice-site states from the
band eigenfunctions, and provides the measurement tools used to study them:
kernel locality reports, crystal-momentum selection scans, winding numbers,
and short-time transition amplitudes.
"""

from .grid import (
    GridMismatchError,
    RingGrid,
    WaveFunction,
    inner_product,
    translate_by_cells,
)
from .derivatives import momentum_power_matrix
from .lattice import (
    OperatorMatrix,
    PotentialSpec,
    build_hamiltonian,
    build_translation,
)
from .spectrum import (
    BandStructure,
    BlochState,
    classify_by_translation,
    fix_gauge,
    solve_bands,
    solve_sector,
)
from .wannier import (
    WannierState,
    build_wannier,
    cell_probability,
    wannier_projector,
)
from .observables import (
    LocalObservableSeries,
    LocalityReport,
    apply_kernel,
    cell_periodicity_defect,
    locality_report,
    materialize,
)
from .superselection import (
    ProbeReport,
    SelectionScan,
    WindingResult,
    matrix_element,
    sector_weights,
    selection_scan,
    winding_number,
    winding_preservation_probe,
)
from .dynamics import (
    PropagationExperiment,
    exact_amplitude,
    first_order_amplitude,
    linear_response_slope,
    transport_profile,
)

__version__ = "0.1.0"

__all__ = [
    "GridMismatchError",
    "RingGrid",
    "WaveFunction",
    "inner_product",
    "translate_by_cells",
    "momentum_power_matrix",
    "OperatorMatrix",
    "PotentialSpec",
    "build_hamiltonian",
    "build_translation",
    "BandStructure",
    "BlochState",
    "classify_by_translation",
    "fix_gauge",
    "solve_bands",
    "solve_sector",
    "WannierState",
    "build_wannier",
    "cell_probability",
    "wannier_projector",
    "LocalObservableSeries",
    "LocalityReport",
    "apply_kernel",
    "cell_periodicity_defect",
    "locality_report",
    "materialize",
    "ProbeReport",
    "SelectionScan",
    "WindingResult",
    "matrix_element",
    "sector_weights",
    "selection_scan",
    "winding_number",
    "winding_preservation_probe",
    "PropagationExperiment",
    "exact_amplitude",
    "first_order_amplitude",
    "linear_response_slope",
    "transport_profile",
]

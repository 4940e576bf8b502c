"""Opto-mechanical shamrock-crystal toolkit: plane-wave-expansion photonic
and phononic band structures, defect waveguides and cavities, and the
lambda-system photon-phonon cascade."""

from .bands import BandStructure, GapInterval, GapReport, find_gaps
from .cascade import (
    EffectiveRates,
    EmitterRates,
    ScatteringResult,
    SpectralDensity,
    effective_rates,
    success_curve,
    t_elastic,
    t_raman,
    validate_regime,
    wavepacket_success,
)
from .defects import (
    DefectSpec,
    HeterostructureSpec,
    LocalizedMode,
    Supercell,
    build_supercell,
    cavity_modes,
    export_mode_profile,
    waveguide_bands,
)
from .geometry import (
    FourierField,
    LatticeSpec,
    ShamrockHole,
    UnitCellGeometry,
    build_unit_cell,
    fourier_coefficients,
    point_in_shamrock,
    reciprocal_basis,
)
from .numerics import HermitianProblem, bracketed_root, hermitian_eigensolve
from .phononic import (
    ElasticMaterial,
    assemble_elastic_operator,
    elastic_band_structure,
    find_complete_gap,
)
from .photonic import (
    PhotonicMaterial,
    assemble_photonic_operator,
    band_structure,
    effective_index,
)
from .symmetry import KPath, PointOp, check_time_reversal, irbz_path, point_group

__version__ = "0.1.0"

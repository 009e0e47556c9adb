"""Band structure, Mott lobes and phase maps of Jaynes-Cummings-Hubbard lattices."""

__version__ = "0.1.0"

from .errors import BracketError, JCHError, LobeClosedError, NumericalError, TruncationError
from .jc_core import (
    DressedState,
    SiteParams,
    atomic_edge,
    atomic_limit_filling,
    dressed_energy,
    dressed_state,
    jc_block,
    rabi_chi,
)
from .bloch import Band, UnitCellSpec, band_energies, build_block, diagonalize, sample_band
from .phase_map import PhaseGrid, gap_map, intersection_check, lobe_boundary, lobe_tip
from .meanfield import MfProblem, MfResult, mf_boundary, mf_critical_kappa, mf_order_parameter
from .exact_diag import EdSpectrum, build_sector, ground_energy, plateau_boundaries, sector_ground_energies

__all__ = [name for name in dir() if not name.startswith("_")]

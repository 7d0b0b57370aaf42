"""Sideband cooling of trapped atoms coupled by free-space dipole-dipole interactions."""

from .geometry import (
    AtomConfiguration,
    CoincidentAtomsError,
    CouplingMatrices,
    build_equilateral_triangle,
    build_hexagon_config,
    build_isosceles,
    build_line,
    build_single,
    coupling_matrices,
    dipole_at_angle,
    find_magic_spacings,
    magic_spacing,
    pair_couplings,
)
from .hilbert import HilbertLayout, phonon_annihilation, sigma_lower
from .liouvillian import ModelParams, build_hamiltonian, build_liouvillian, layout_for
from .steady import (
    DegenerateSteadyStateError,
    InvariantViolation,
    SteadyResult,
    cooling_ratio,
    evolve,
    phonon_occupation,
    steady_state,
)

__version__ = "0.1.0"

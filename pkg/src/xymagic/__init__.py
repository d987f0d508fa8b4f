"""Magic content of the transverse-field anisotropic XY spin chain.

The package computes reduced one- and two-qubit density matrices of the
XY chain from exact infinite-chain correlators (Barouch-McCoy integrals
and Toeplitz determinants) or from sparse exact diagonalization of finite
open chains, quantifies their non-stabilizerness via the robustness of
magic, and provides the analysis layer on top: pseudocritical-point
location, scaling-exponent fits, finite-size collapse, thermal sudden
death, and quantum-critical-region maps.
"""

from .quantum_state import (
    PauliVector,
    bell_state,
    computational_zero,
    fidelity,
    h_state,
    maximally_mixed,
    partial_trace,
    purity,
    tensor_product,
)
from .stabilizer_polytope import StabilizerPolytope, enumerate_polytope, membership
from .rom_solver import (
    RomResult,
    global_magic,
    log_robustness,
    rom_closed_form,
    rom_lp,
)
from .xy_correlators import (
    ChainParams,
    CorrelatorSet,
    correlator_set,
    g_r,
    order_parameter,
    single_site_state,
    symmetric_two_site_state,
    toeplitz_correlator,
    transverse_magnetization,
)
from .finite_chain import (
    FiniteChainSpec,
    FiniteChainState,
    central_pair,
    central_site,
    ground_state,
    order_parameter_derivative_peak,
    reduced_density,
)
from . import critical_analysis

__all__ = [
    "PauliVector",
    "bell_state",
    "computational_zero",
    "fidelity",
    "h_state",
    "maximally_mixed",
    "partial_trace",
    "purity",
    "tensor_product",
    "StabilizerPolytope",
    "enumerate_polytope",
    "membership",
    "RomResult",
    "global_magic",
    "log_robustness",
    "rom_closed_form",
    "rom_lp",
    "ChainParams",
    "CorrelatorSet",
    "correlator_set",
    "g_r",
    "order_parameter",
    "single_site_state",
    "symmetric_two_site_state",
    "toeplitz_correlator",
    "transverse_magnetization",
    "FiniteChainSpec",
    "FiniteChainState",
    "central_pair",
    "central_site",
    "ground_state",
    "order_parameter_derivative_peak",
    "reduced_density",
    "critical_analysis",
]

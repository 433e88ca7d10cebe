"""Atomic quantum memory for photonic polarization qubits.

A single Lambda-type atom in a two-mode optical cavity scatters one photon
at a time.  Near the cavity resonance the scattering entangles the photon's
polarization with the atomic ground-state qubit, which turns the cavity into
a heralded memory: scatter, detect one polarization, and the photonic qubit
is mapped onto the atom.  A later scattering event releases it again.

The package computes the closed-form figures of merit of that protocol
(swap and memory fidelities, success probabilities, storage/retrieval
fidelity) averaged over Gaussian or Lorentzian pulse spectra, and carries an
independent state-vector simulation of the same protocol used to cross-check
every closed form.  All rates are measured in units of the atomic decay rate
(gamma = 1).
"""

from .errors import (
    CavqmemError,
    DegenerateDenominator,
    InvalidField,
    NonFiniteField,
    NonFiniteIntegrand,
    UnequalCouplings,
    ZeroProbability,
    ZeroScatteringWeight,
)
from .metrics import (
    MetricReport,
    compute_report,
    convergence_delta,
    qm_fidelity,
    qm_success,
    retrieval_success,
    storage_retrieval_fidelity,
    storage_success,
    swap_fidelity,
    swap_fidelity_leading,
    swap_target_atom,
    swap_target_photon,
    transfer_fidelity,
)
from .params import (
    AtomQubit,
    DetectorModel,
    PhotonQubit,
    Profile,
    PulseSpec,
    SystemParams,
    cooperativity,
    point_from_dict,
    point_to_dict,
    rescaled,
    validate,
    validate_pulse,
)
from .scattering import (
    ScatteringMatrix,
    bright_phase_factor,
    coupling_amplitude,
    scattered_amplitude,
    t_elements,
    t_matrix,
)
from .spectral import (
    DEFAULT_QUAD,
    KGrid,
    QuadratureConfig,
    build_grid,
    profile_amplitude,
    spectral_average,
)
from .statesim import (
    AtomEnsemble,
    EntanglementOutcome,
    JointState,
    MemoryRecord,
    PhotonPair,
    RetrievalOutcome,
    TwoCavityState,
    apply_scattering,
    atomic_readout_via_third_photon,
    detect_photon_L,
    entanglement_storage,
    prepare_input,
    prepare_pair,
    retrieve,
    run_memory_protocol,
    scatter_pair,
    swap_transfer_fidelity,
)

__version__ = "0.1.0"

__all__ = [
    "AtomEnsemble",
    "AtomQubit",
    "CavqmemError",
    "DEFAULT_QUAD",
    "DegenerateDenominator",
    "DetectorModel",
    "EntanglementOutcome",
    "InvalidField",
    "JointState",
    "KGrid",
    "MemoryRecord",
    "MetricReport",
    "NonFiniteField",
    "NonFiniteIntegrand",
    "PhotonPair",
    "PhotonQubit",
    "Profile",
    "PulseSpec",
    "QuadratureConfig",
    "RetrievalOutcome",
    "ScatteringMatrix",
    "SystemParams",
    "TwoCavityState",
    "UnequalCouplings",
    "ZeroProbability",
    "ZeroScatteringWeight",
    "apply_scattering",
    "atomic_readout_via_third_photon",
    "bright_phase_factor",
    "build_grid",
    "compute_report",
    "convergence_delta",
    "cooperativity",
    "coupling_amplitude",
    "detect_photon_L",
    "entanglement_storage",
    "point_from_dict",
    "point_to_dict",
    "prepare_input",
    "prepare_pair",
    "profile_amplitude",
    "qm_fidelity",
    "qm_success",
    "rescaled",
    "retrieval_success",
    "retrieve",
    "run_memory_protocol",
    "scatter_pair",
    "scattered_amplitude",
    "spectral_average",
    "storage_retrieval_fidelity",
    "storage_success",
    "swap_fidelity",
    "swap_fidelity_leading",
    "swap_target_atom",
    "swap_target_photon",
    "swap_transfer_fidelity",
    "t_elements",
    "t_matrix",
    "transfer_fidelity",
    "validate",
    "validate_pulse",
]

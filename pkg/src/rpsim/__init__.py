"""Radical-pair spin dynamics and entropy-audit toolkit.

Simulates the spin state of a recombining radical pair under two master
equations -- the traditional Haberkorn form and the quantum-measurement
(Kominis) form -- and audits the Ozawa and Lanford-Robinson entropy bounds
along the trajectories.  Field sweeps expose reaction-yield and
Groenewold-information magnetic-field effects; the Liouville-space module
diagonalizes the non-reacting evolution generator behind them.
"""

from .entropy import (BoundsReport, EntropyTrace, audit_bounds, gamma_scan,
                      post_measurement_entropy, pre_measurement_entropy,
                      shannon_entropy, von_neumann_entropy)
from .integrate import (IntegrationError, TrajectoryRecord, default_grid,
                        integrate, integrate_nonreacting)
from .liouville import (SpectralDecomposition, Superoperator,
                        build_superoperator, devectorize, match_modes,
                        nonreacting_rhs, reconstruct, spectrum, vectorize)
from .master import (COHERENCE_MEASURES, ReactionParams, StepStats, Theory,
                     check_density_matrix, maximally_mixed_state,
                     mixed_triplet_state, p_coh, relaxation_term, rhs,
                     rhs_haberkorn, rhs_kominis, singlet_up_state, step_stats)
from .spins import (Coupling, SpinSystem, build_basis, build_hamiltonian,
                    build_projectors, singlet_adapted_transform, spin_operator)
from .sweep import (SweepResult, coherence_yield_rho35, field_sweep,
                    groenewold_information, liouville_lifetimes_link)

__version__ = "0.1.0"

__all__ = [
    "BoundsReport", "COHERENCE_MEASURES", "Coupling", "EntropyTrace",
    "IntegrationError", "ReactionParams", "SpectralDecomposition",
    "SpinSystem", "StepStats", "Superoperator", "SweepResult", "Theory",
    "TrajectoryRecord", "audit_bounds", "build_basis", "build_hamiltonian",
    "build_projectors", "build_superoperator", "check_density_matrix",
    "coherence_yield_rho35", "default_grid", "devectorize", "field_sweep",
    "gamma_scan", "groenewold_information", "integrate",
    "integrate_nonreacting", "liouville_lifetimes_link", "match_modes",
    "maximally_mixed_state", "mixed_triplet_state", "nonreacting_rhs",
    "p_coh", "post_measurement_entropy", "pre_measurement_entropy",
    "reconstruct", "relaxation_term", "rhs", "rhs_haberkorn", "rhs_kominis",
    "shannon_entropy", "singlet_adapted_transform", "singlet_up_state",
    "spectrum", "spin_operator", "step_stats", "vectorize",
    "von_neumann_entropy",
]

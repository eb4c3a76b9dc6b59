"""Right-hand sides of the two radical-pair master equations, plus per-step
reaction statistics.

Both theories share the coherent part -i[H, rho] and an optional
trace-preserving spin relaxation term
    -gamma * (rho - Tr{rho}/Tr{1} * 1).

Haberkorn damps singlet/triplet amplitude through anticommutators:
    d rho = -i[H,rho] - k_S/2 {Q_S,rho} - k_T/2 {Q_T,rho} + relax.

The quantum-measurement variant treats recombination as a continuous
partial measurement of the singlet projector.  After combining its
measurement and null-measurement pieces it reads

    d rho = -i[H,rho]
            - (k_S+k_T)/2 (Q_S rho + rho Q_S - 2 Q_S rho Q_S)
            - (1 - p_coh) (k_S Q_S rho Q_S + k_T Q_T rho Q_T)
            - (dr_S + dr_T)/dt * 1/Tr{rho}
              * [ p_coh (Q_S rho Q_S + Q_T rho Q_T) + Q_S rho Q_T + Q_T rho Q_S ]

with dr_S = k_S Tr{rho Q_S} dt and dr_T = k_T Tr{rho Q_T} dt the singlet and
triplet recombination losses of that step.  p_coh in [0,1] interpolates
between fully projective (0) and coherence-preserving (1) back-action.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .spins import SpinSystem, build_hamiltonian, build_projectors

# Subspace populations below this fraction of the trace are treated as empty
# by the coherence measure (the normalized cross norm is pure noise there).
POPULATION_FLOOR = 1e-12


class Theory(enum.Enum):
    HABERKORN = "haberkorn"
    KOMINIS = "kominis"


def parse_theory(name) -> Theory:
    if isinstance(name, Theory):
        return name
    try:
        return Theory(str(name).strip().lower())
    except ValueError:
        valid = ", ".join(t.value for t in Theory)
        raise ValueError(f"unknown theory {name!r}; expected one of: {valid}") from None


# ---------------------------------------------------------------------------
# Singlet/triplet coherence measures.  Pluggable so alternatives can be
# compared; keys are plain strings, values map (rho, qs_block, qt_block
# norms...) -> scalar.  The default uses the trace norm of the S-T cross
# block normalised by the geometric mean of the subspace populations.
# ---------------------------------------------------------------------------

def _cross_block_trace_norm(rho: np.ndarray, qs: np.ndarray, qt: np.ndarray) -> float:
    m = qs @ rho @ qt
    # Trace norm = sum of singular values = Tr sqrt(M M^dag).  M has rank at
    # most n_singlet, so eigvalsh on the small Gram matrix would also work;
    # svdvals is clearer and this path is not performance critical.
    sv = np.linalg.svd(m, compute_uv=False)
    return float(np.sum(sv))


def coherence_fraction(rho: np.ndarray, qs: np.ndarray, qt: np.ndarray) -> float:
    """Default p_coh: ||Q_S rho Q_T||_1 / sqrt(Tr{rho Q_S} Tr{rho Q_T}).

    Clamped to [0, 1]; defined as 0 when either subspace population is
    negligible (below a part in 1e12 of the trace) -- there is nothing left
    to decohere between, and the ratio is numerically meaningless there.
    """
    ps = float(np.trace(rho @ qs).real)
    pt = float(np.trace(rho @ qt).real)
    floor = POPULATION_FLOOR * (ps + pt)
    if ps <= floor or pt <= floor:
        return 0.0
    val = _cross_block_trace_norm(rho, qs, qt) / np.sqrt(ps * pt)
    return float(min(max(val, 0.0), 1.0))


def coherence_zero(rho, qs, qt) -> float:
    """Fully projective limit: p_coh identically zero."""
    return 0.0


def coherence_one(rho, qs, qt) -> float:
    """Coherence-preserving limit: p_coh identically one."""
    return 1.0


COHERENCE_MEASURES = {
    "trace-norm": coherence_fraction,
    "zero": coherence_zero,
    "one": coherence_one,
}


def p_coh(rho: np.ndarray, system: SpinSystem,
          measure: str = "trace-norm") -> float:
    """Singlet-triplet coherence measure of rho, in [0, 1].

    Raises for non-positive trace; see COHERENCE_MEASURES for the available
    measures (new ones can be registered under fresh keys).
    """
    if float(np.trace(rho).real) <= 0.0:
        raise ValueError("p_coh undefined for non-positive trace")
    try:
        fn = COHERENCE_MEASURES[measure]
    except KeyError:
        raise ValueError(f"unknown coherence measure {measure!r}") from None
    qs, qt = build_projectors(system)
    return fn(rho, qs, qt)


@dataclass(frozen=True)
class ReactionParams:
    """Reaction and relaxation rates plus the coherence measure choice.

    k_s, k_t: singlet / triplet recombination rates (units of the reference
        hyperfine constant).
    gamma: isotropic spin relaxation rate towards the maximally mixed state.
    coherence_measure: key into COHERENCE_MEASURES (only used by the
        measurement theory).
    """

    k_s: float
    k_t: float
    gamma: float = 0.0
    coherence_measure: str = "trace-norm"

    def __post_init__(self):
        if self.k_s < 0 or self.k_t < 0 or self.gamma < 0:
            raise ValueError("rates must be non-negative")
        if self.coherence_measure not in COHERENCE_MEASURES:
            valid = ", ".join(sorted(COHERENCE_MEASURES))
            raise ValueError(f"unknown coherence measure "
                             f"{self.coherence_measure!r}; have: {valid}")

    def p_coh(self, rho, qs, qt) -> float:
        return COHERENCE_MEASURES[self.coherence_measure](rho, qs, qt)


def relaxation_term(rho: np.ndarray, gamma: float) -> np.ndarray:
    """Trace-preserving relaxation -gamma (rho - Tr{rho}/dim * identity)."""
    if gamma == 0.0:
        return np.zeros_like(rho)
    dim = rho.shape[0]
    tr = np.trace(rho)
    return -gamma * (rho - (tr / dim) * np.eye(dim, dtype=rho.dtype))


def rhs_haberkorn(rho: np.ndarray, params: ReactionParams,
                  system: SpinSystem) -> np.ndarray:
    h = build_hamiltonian(system)
    qs, qt = build_projectors(system)
    out = -1j * (h @ rho - rho @ h)
    out -= 0.5 * params.k_s * (qs @ rho + rho @ qs)
    out -= 0.5 * params.k_t * (qt @ rho + rho @ qt)
    out += relaxation_term(rho, params.gamma)
    return out


def rhs_kominis(rho: np.ndarray, params: ReactionParams,
                system: SpinSystem) -> np.ndarray:
    tr = float(np.trace(rho).real)
    if tr <= 0.0:
        # Reaction has run to completion; nothing left to evolve.
        return np.zeros_like(rho)
    h = build_hamiltonian(system)
    qs, qt = build_projectors(system)
    ks, kt = params.k_s, params.k_t

    qs_rho = qs @ rho
    rho_qs = rho @ qs
    qs_rho_qs = qs_rho @ qs
    qt_rho_qt = qt @ rho @ qt
    ps = float(np.trace(qs_rho).real)
    pt = tr - ps

    out = -1j * (h @ rho - rho @ h)
    out -= 0.5 * (ks + kt) * (qs_rho + rho_qs - 2.0 * qs_rho_qs)

    pcoh = params.p_coh(rho, qs, qt)
    out -= (1.0 - pcoh) * (ks * qs_rho_qs + kt * qt_rho_qt)

    loss_rate = ks * ps + kt * pt        # (dr_S + dr_T)/dt
    cross = rho - qs_rho_qs - qt_rho_qt  # Q_S rho Q_T + Q_T rho Q_S
    out -= (loss_rate / tr) * (pcoh * (qs_rho_qs + qt_rho_qt) + cross)

    out += relaxation_term(rho, params.gamma)
    return out


_RHS = {Theory.HABERKORN: rhs_haberkorn, Theory.KOMINIS: rhs_kominis}


def rhs(rho: np.ndarray, params: ReactionParams, system: SpinSystem,
        theory: Theory) -> np.ndarray:
    """Master-equation right-hand side for the chosen theory."""
    return _RHS[parse_theory(theory)](rho, params, system)


@dataclass
class StepStats:
    """Differential bookkeeping for one time step of length dt.

    dr_s / dr_t: population removed into singlet / triplet products,
        dr_x = k_x * Tr{rho Q_x} * dt.
    dp_s / dp_t: probabilities of unobserved singlet / triplet projections,
        dp_x = (k_S + k_T)/2 * Tr{rho Q_x} * dt.  Reported regardless of the
        selected theory; the Haberkorn entropy accounting simply ignores them.
    q_s / q_t: conditional singlet/triplet probabilities of the state the
        step acted on; q_s + q_t = 1.
    """

    dr_s: float
    dr_t: float
    dp_s: float
    dp_t: float
    q_s: float
    q_t: float
    p_coh: float = 0.0

    @property
    def total_weight(self) -> float:
        return self.dr_s + self.dr_t + self.dp_s + self.dp_t


def step_stats(rho: np.ndarray, params: ReactionParams, system: SpinSystem,
               dt: float) -> StepStats:
    """Reaction statistics generated by `rho` over an interval dt."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    qs, qt = build_projectors(system)
    tr = float(np.trace(rho).real)
    if tr <= 0:
        raise ValueError("step statistics undefined for non-positive trace")
    ps = float(np.trace(rho @ qs).real)
    pt = tr - ps
    half = 0.5 * (params.k_s + params.k_t)
    return StepStats(
        dr_s=params.k_s * ps * dt,
        dr_t=params.k_t * pt * dt,
        dp_s=half * ps * dt,
        dp_t=half * pt * dt,
        q_s=ps / tr,
        q_t=pt / tr,
        p_coh=params.p_coh(rho, qs, qt),
    )


# ---------------------------------------------------------------------------
# Canonical initial states
# ---------------------------------------------------------------------------

def singlet_up_state(system: SpinSystem) -> np.ndarray:
    """Pure |S> x |Up...Up>: electron singlet, all nuclei up."""
    dim = system.dim
    nuc_dim = 2 ** system.n_nuclei
    vec = np.zeros(dim, dtype=complex)
    s2 = 1 / np.sqrt(2)
    vec[1 * nuc_dim] = s2       # |up down> x |Up..Up>
    vec[2 * nuc_dim] = -s2      # |down up> x |Up..Up>
    return np.outer(vec, vec.conj())


def mixed_triplet_state(system: SpinSystem) -> np.ndarray:
    """Maximally mixed state on the triplet subspace, Q_T / Tr{Q_T}."""
    _, qt = build_projectors(system)
    return np.array(qt) / float(np.trace(qt).real)


def maximally_mixed_state(system: SpinSystem) -> np.ndarray:
    return np.eye(system.dim, dtype=complex) / system.dim


def check_density_matrix(rho: np.ndarray, herm_tol: float = 1e-12,
                         eig_tol: float = 1e-10,
                         require_unit_trace: bool = False) -> None:
    """Raise ValueError unless rho is a valid (sub-normalized) density matrix.

    Hermitian to herm_tol, eigenvalues >= -eig_tol, 0 < Tr rho <= 1 + 1e-12.
    Trace below one is fine (the reaction removes population); with
    require_unit_trace the trace must equal 1 within 1e-9.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > herm_tol:
        raise ValueError("density matrix is not Hermitian")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -eig_tol:
        raise ValueError(f"density matrix has negative eigenvalue {evals.min():.3e}")
    tr = float(np.trace(rho).real)
    if tr <= 0:
        raise ValueError(f"trace must be positive, got {tr}")
    if tr > 1.0 + 1e-12:
        raise ValueError(f"trace must not exceed 1, got {tr}")
    if require_unit_trace and abs(tr - 1.0) > 1e-9:
        raise ValueError(f"trace must be 1, got {tr}")

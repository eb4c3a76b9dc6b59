"""Liouville-space form of the non-reacting evolution law.

At equal recombination rates both theories factor as rho = e^{-kt} R(t) where
R obeys the trace-preserving law

    dR/dt = -i[H, R] - (k_S + k_T)/2 (Q_S R + R Q_S - 2 Q_S R Q_S).

Column-stacking R into a vector turns this into dR~/dt = K R~ with a dense
dim^2 x dim^2 generator K whose eigenvalues -lambda_m + i Omega_m set the
lifetimes and frequencies of every observable, including the rho_35 coherence
tracked in field sweeps.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .spins import SpinSystem, build_hamiltonian, build_projectors

COND_FALLBACK = 1e8   # eigenvector condition number beyond which spectral
                      # reconstruction is distrusted


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a dim x dim matrix: entry (i,j) lands at index j*dim + i."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    return rho.flatten(order="F")


def devectorize(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec)
    if vec.ndim != 1:
        raise ValueError("expected a flat vector")
    dim = round(np.sqrt(vec.size))
    if dim * dim != vec.size:
        raise ValueError(f"length {vec.size} is not a perfect square")
    return vec.reshape((dim, dim), order="F")


def _left(a: np.ndarray) -> np.ndarray:
    """Superoperator of X -> a X under column stacking."""
    return np.kron(np.eye(a.shape[0]), a)


def _right(a: np.ndarray) -> np.ndarray:
    """Superoperator of X -> X a under column stacking."""
    return np.kron(a.T, np.eye(a.shape[0]))


def nonreacting_rhs(rho: np.ndarray, system: SpinSystem, k_s: float,
                    k_t: float) -> np.ndarray:
    """Direct evaluation of the non-reacting law (oracle for the matrix form)."""
    h = build_hamiltonian(system)
    qs, _ = build_projectors(system)
    kbar = 0.5 * (k_s + k_t)
    return (-1j * (h @ rho - rho @ h)
            - kbar * (qs @ rho + rho @ qs - 2.0 * qs @ rho @ qs))


@dataclass
class Superoperator:
    matrix: np.ndarray
    dim: int
    kbar: float
    convention: str = "column-stacking"

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return devectorize(self.matrix @ vectorize(rho))


def build_superoperator(system: SpinSystem, k_s: float,
                        k_t: float) -> Superoperator:
    """Dense matrix K with K vec(rho) = vec(nonreacting_rhs(rho))."""
    if k_s < 0 or k_t < 0:
        raise ValueError("rates must be non-negative")
    h = np.asarray(build_hamiltonian(system))
    qs = np.asarray(build_projectors(system)[0])
    kbar = 0.5 * (k_s + k_t)
    k = -1j * (_left(h) - _right(h))
    k -= kbar * (_left(qs) + _right(qs) - 2.0 * np.kron(qs.T, qs))
    return Superoperator(matrix=k, dim=system.dim, kbar=kbar)


@dataclass
class SpectralDecomposition:
    """Eigensystem of K, ordered by decay rate then frequency.

    eigenvalues[m] = -decay_rates[m] + 1j*frequencies[m]; modes[m] is the
    devectorized right eigenvector.  cond_v is the condition number of the
    eigenvector matrix -- large values mean the spectral expansion of initial
    states is ill-conditioned and reconstruction should fall back to direct
    propagation.
    """

    eigenvalues: np.ndarray
    decay_rates: np.ndarray
    frequencies: np.ndarray
    modes: np.ndarray
    eigenvectors: np.ndarray
    cond_v: float

    def slowest_nonzero_rate(self, tol: float = 1e-10) -> float:
        nonzero = self.decay_rates[self.decay_rates > tol]
        if nonzero.size == 0:
            return 0.0
        return float(nonzero.min())


def spectrum(superop: Superoperator) -> SpectralDecomposition:
    """Full eigendecomposition of the generator."""
    evals, vecs = np.linalg.eig(superop.matrix)
    decay = -evals.real
    freq = evals.imag
    order = np.lexsort((freq, decay))
    evals, decay, freq = evals[order], decay[order], freq[order]
    vecs = vecs[:, order]
    modes = np.stack([devectorize(vecs[:, m]) for m in range(vecs.shape[1])])
    return SpectralDecomposition(
        eigenvalues=evals, decay_rates=decay, frequencies=freq, modes=modes,
        eigenvectors=vecs, cond_v=float(np.linalg.cond(vecs)))


def reconstruct(superop: Superoperator, rho0: np.ndarray, times,
                spec: SpectralDecomposition = None):
    """Propagate rho0 under the non-reacting law to the given times.

    Uses the spectral expansion rho(t) = sum_m c_m e^{(-lambda_m + i Omega_m) t}
    mode_m when the eigenvector matrix is well conditioned; otherwise falls
    back to stepping with the exact interval propagator.  Returns
    (states, used_fallback).
    """
    times = np.asarray(times, dtype=float)
    if spec is None:
        spec = spectrum(superop)
    v0 = vectorize(np.asarray(rho0, dtype=complex))
    if spec.cond_v <= COND_FALLBACK:
        coeff = np.linalg.solve(spec.eigenvectors, v0)
        phases = np.exp(np.outer(times, spec.eigenvalues))
        vecs_t = phases * coeff[None, :] @ spec.eigenvectors.T
        dim = superop.dim
        out = vecs_t.reshape(len(times), dim, dim).transpose(0, 2, 1)
        return out, False
    return _propagate_chain(superop, v0, times), True


def _propagate_chain(superop, v0, times):
    """expm-stepping fallback for non-normal / ill-conditioned generators."""
    dim = superop.dim
    out = np.empty((len(times), dim, dim), dtype=complex)
    steps = np.diff(np.concatenate(([0.0], times)))
    if steps.size and steps.min() < -1e-12:
        raise ValueError("times must be ascending")
    props = {}
    v = v0.copy()
    for i, h in enumerate(steps):
        h = round(float(h), 12)
        if h > 0.0:
            if h not in props:
                props[h] = scipy.linalg.expm(superop.matrix * h)
            v = props[h] @ v
        out[i] = devectorize(v)
    return out


def match_modes(reference: SpectralDecomposition,
                other: SpectralDecomposition) -> np.ndarray:
    """Permutation aligning `other`'s modes to `reference` by overlap.

    Solves the assignment problem on |<v_ref, v_other>| so eigenvalue curves
    tracked across a parameter grid stay continuous instead of jumping at
    sort-order crossings.  Returns indices such that other.eigenvalues[perm]
    lines up with reference.eigenvalues.
    """
    overlap = np.abs(reference.eigenvectors.conj().T @ other.eigenvectors)
    row, col = linear_sum_assignment(-overlap)
    perm = np.empty_like(col)
    perm[row] = col
    return perm

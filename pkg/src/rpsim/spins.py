"""Spin Hilbert space for a radical pair: basis, operators, projectors, Hamiltonian.

The system is two electron spins (donor D and acceptor A) plus ``n_nuclei``
spin-1/2 nuclei.  The product basis is ordered |e_D e_A n_1 ... n_N> with
up before down in every slot, so basis index 3 (1-based) is |up,down>x|Up>
and index 5 is |down,up>x|Up> for a single nucleus.  All couplings and the
field are dimensionless multiples of the reference hyperfine constant, and
time is measured in its inverse.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

UP_DOWN = ("↑", "↓")        # electron arrows
NUC_UP_DOWN = ("⇑", "⇓")    # nuclear double arrows

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class Coupling:
    """Isotropic hyperfine coupling of one nucleus to one electron.

    nucleus is 1-based, target is "D" or "A", strength is in units of the
    reference hyperfine constant.
    """

    nucleus: int
    target: str
    strength: float = 1.0

    def __post_init__(self):
        if self.target not in ("D", "A"):
            raise ValueError(f"coupling target must be 'D' or 'A', got {self.target!r}")
        if self.nucleus < 1:
            raise ValueError("nucleus index is 1-based and must be >= 1")
        if not np.isfinite(self.strength):
            raise ValueError("coupling strength must be finite")


@dataclass(frozen=True)
class SpinSystem:
    """Immutable description of the spin Hilbert space and magnetic interactions.

    Args:
        n_nuclei: number of spin-1/2 nuclei (>= 1).
        couplings: hyperfine couplings; default is one nucleus on the donor
            with unit strength.
        b_field: static field along z, in units of the reference hyperfine
            constant; enters as b_field * (s_Dz + s_Az).
    """

    n_nuclei: int = 1
    couplings: tuple = (Coupling(1, "D", 1.0),)
    b_field: float = 0.0

    def __post_init__(self):
        if self.n_nuclei < 1:
            raise ValueError("need at least one nucleus (no hyperfine physics otherwise)")
        object.__setattr__(self, "couplings", tuple(self.couplings))
        for c in self.couplings:
            if not isinstance(c, Coupling):
                raise TypeError("couplings must be Coupling instances")
            if c.nucleus > self.n_nuclei:
                raise ValueError(f"coupling references nucleus {c.nucleus} but only "
                                 f"{self.n_nuclei} present")
        if not np.isfinite(self.b_field):
            raise ValueError("b_field must be finite")

    @property
    def dim(self) -> int:
        return 2 ** (2 + self.n_nuclei)

    @property
    def n_particles(self) -> int:
        return 2 + self.n_nuclei

    def with_field(self, b_field: float) -> "SpinSystem":
        """Copy of this system at a different field value."""
        return SpinSystem(self.n_nuclei, self.couplings, float(b_field))


def build_basis(n_nuclei: int) -> list:
    """Ordered product-basis labels, e.g. ['up up Up', ...] with arrows.

    Lexicographic in (e_D, e_A, n_1, ..., n_N), up before down.  Returned
    list is 0-based; user-facing indexing (CSV, docs) is 1-based.
    """
    if n_nuclei < 1:
        raise ValueError("need at least one nucleus (no hyperfine physics otherwise)")
    labels = []
    for idx in range(2 ** (2 + n_nuclei)):
        bits = [(idx >> (1 + n_nuclei - k)) & 1 for k in range(2 + n_nuclei)]
        s = UP_DOWN[bits[0]] + UP_DOWN[bits[1]]
        s += "".join(NUC_UP_DOWN[b] for b in bits[2:])
        labels.append(s)
    return labels


def _embed(op: np.ndarray, slot: int, n_particles: int) -> np.ndarray:
    """Tensor-embed a single-spin operator at the given slot (0-based)."""
    out = np.array([[1.0 + 0j]])
    for k in range(n_particles):
        out = np.kron(out, op if k == slot else np.eye(2, dtype=complex))
    return out


def _slot(system: SpinSystem, particle) -> int:
    if particle == "D":
        return 0
    if particle == "A":
        return 1
    idx = int(particle)
    if not 1 <= idx <= system.n_nuclei:
        raise ValueError(f"invalid particle {particle!r}: nucleus index out of range")
    return 1 + idx


def spin_operator(system: SpinSystem, particle, axis: str) -> np.ndarray:
    """Spin-1/2 operator (Pauli/2) for 'D', 'A' or a 1-based nucleus index."""
    if axis not in PAULI:
        raise ValueError(f"axis must be one of x, y, z, got {axis!r}")
    return _embed(PAULI[axis] / 2.0, _slot(system, particle), system.n_particles)


@lru_cache(maxsize=None)
def _projectors_cached(system: SpinSystem):
    nuc_dim = 2 ** system.n_nuclei
    singlet = np.zeros(4, dtype=complex)
    singlet[1] = 1 / np.sqrt(2)   # |up,down>
    singlet[2] = -1 / np.sqrt(2)  # |down,up>
    qs_elec = np.outer(singlet, singlet.conj())
    qs = np.kron(qs_elec, np.eye(nuc_dim, dtype=complex))
    qt = np.eye(system.dim, dtype=complex) - qs
    qs.setflags(write=False)
    qt.setflags(write=False)
    return qs, qt


def build_projectors(system: SpinSystem):
    """Orthogonal projectors (Q_S, Q_T) onto the electron singlet/triplet subspaces."""
    return _projectors_cached(system)


@lru_cache(maxsize=None)
def _hamiltonian_cached(system: SpinSystem) -> np.ndarray:
    h = np.zeros((system.dim, system.dim), dtype=complex)
    for c in system.couplings:
        for axis in "xyz":
            h += c.strength * (spin_operator(system, c.nucleus, axis)
                               @ spin_operator(system, c.target, axis))
    if system.b_field != 0.0:
        h += system.b_field * (spin_operator(system, "D", "z")
                               + spin_operator(system, "A", "z"))
    h.setflags(write=False)
    return h


def build_hamiltonian(system: SpinSystem) -> np.ndarray:
    """Isotropic hyperfine + electron Zeeman Hamiltonian, Hermitian, dense."""
    return _hamiltonian_cached(system)


@lru_cache(maxsize=None)
def _st_transform_cached(system: SpinSystem):
    # Columns: singlet states first, then T+, T0, T- blocks, each tensored
    # with the nuclear basis.  Unitary; used internally to make Q_S diagonal.
    s2 = 1 / np.sqrt(2)
    elec = np.zeros((4, 4), dtype=complex)
    elec[:, 0] = [0, s2, -s2, 0]   # singlet
    elec[:, 1] = [1, 0, 0, 0]      # T+
    elec[:, 2] = [0, s2, s2, 0]    # T0
    elec[:, 3] = [0, 0, 0, 1]      # T-
    w = np.kron(elec, np.eye(2 ** system.n_nuclei, dtype=complex))
    w.setflags(write=False)
    return w


def singlet_adapted_transform(system: SpinSystem):
    """Unitary W whose first 2**n_nuclei columns span the singlet subspace.

    W.conj().T @ Q_S @ W is diagonal with ones in the leading block.
    Returns (W, n_singlet).
    """
    return _st_transform_cached(system), 2 ** system.n_nuclei

"""Truncated Fock-space and composite (field x atoms) operator construction.

Basis ordering is field-major throughout: the flat composite index is
``n * atomic_dim + m`` with ``n`` the Fock index and ``m`` the lexicographic
atomic multi-index (atom 0 most significant).
"""

from __future__ import annotations

from dataclasses import dataclass, field as _field

import numpy as np

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-10


@dataclass(frozen=True)
class FieldSpace:
    """Truncated bosonic mode.

    ``n_max`` caps the excitation number of admissible control states, while
    Fock levels 0..``n_trunc`` are retained numerically so that dynamics can
    populate levels above the cap without hitting the truncation edge.
    ``n_trunc`` defaults to ``2 * n_max``.
    """

    n_max: int
    n_trunc: int = -1

    def __post_init__(self):
        if self.n_trunc < 0:
            object.__setattr__(self, "n_trunc", 2 * self.n_max)
        if self.n_max < 0:
            raise ValueError(f"n_max must be >= 0, got {self.n_max}")
        if self.n_trunc < self.n_max:
            raise ValueError(
                f"n_trunc ({self.n_trunc}) must be >= n_max ({self.n_max})"
            )

    @property
    def dim(self) -> int:
        return self.n_trunc + 1


@dataclass
class AtomicSystem:
    """Bound-state spectra and mode couplings of one or more atoms.

    ``energies[j][k]`` is the energy of level k of atom j (k = 0 is the
    lowest level by convention), in units of the mode frequency.
    ``couplings[j][k, l]`` is the real, symmetric, zero-diagonal coupling
    matrix of atom j to the field quadrature.
    """

    energies: list = _field(default_factory=list)
    couplings: list = _field(default_factory=list)

    def __post_init__(self):
        if len(self.energies) == 0:
            raise ValueError("at least one atom is required")
        if len(self.energies) != len(self.couplings):
            raise ValueError("energies and couplings must have one entry per atom")
        energies = []
        couplings = []
        for j, (e, g) in enumerate(zip(self.energies, self.couplings)):
            e = np.asarray(e, dtype=float)
            g = np.asarray(g, dtype=float)
            if e.ndim != 1 or e.size < 2:
                raise ValueError(f"atom {j}: need at least two levels")
            if not np.all(np.isfinite(e)):
                raise ValueError(f"atom {j}: level energies must be finite")
            if g.shape != (e.size, e.size):
                raise ValueError(
                    f"atom {j}: coupling matrix shape {g.shape} does not match "
                    f"{e.size} levels"
                )
            if not np.all(np.isfinite(g)):
                raise ValueError(f"atom {j}: couplings must be finite")
            if np.max(np.abs(g - g.T)) > 0:
                raise ValueError(f"atom {j}: coupling matrix must be symmetric")
            if np.max(np.abs(np.diag(g))) > 0:
                raise ValueError(f"atom {j}: coupling matrix must have zero diagonal")
            e.setflags(write=False)
            g.setflags(write=False)
            energies.append(e)
            couplings.append(g)
        self.energies = energies
        self.couplings = couplings

    @property
    def n_atoms(self) -> int:
        return len(self.energies)

    @property
    def level_counts(self) -> tuple:
        return tuple(e.size for e in self.energies)

    @property
    def dim(self) -> int:
        d = 1
        for n in self.level_counts:
            d *= n
        return d

    @property
    def all_qubits(self) -> bool:
        return all(n == 2 for n in self.level_counts)

    def unflatten(self, m: int) -> tuple:
        """Per-atom level indices of the flat atomic basis index ``m``."""
        levels = []
        for n in reversed(self.level_counts):
            levels.append(m % n)
            m //= n
        return tuple(reversed(levels))

    def flatten(self, levels) -> int:
        m = 0
        for lev, n in zip(levels, self.level_counts):
            if not 0 <= lev < n:
                raise ValueError(f"level index {lev} out of range for {n} levels")
            m = m * n + lev
        return m


def qubit_system(n_atoms: int, omega_e: float, coupling: float) -> AtomicSystem:
    """Identical two-level atoms with excitation energy ``omega_e`` and
    ground-excited quadrature coupling ``coupling``."""
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    e = [0.0, omega_e]
    g = [[0.0, coupling], [coupling, 0.0]]
    return AtomicSystem([e] * n_atoms, [g] * n_atoms)


@dataclass(frozen=True)
class CompositeSpace:
    """Tensor product of a truncated field and an atomic system."""

    field: FieldSpace
    atoms: AtomicSystem

    @property
    def dim(self) -> int:
        return self.field.dim * self.atoms.dim

    @property
    def field_dim(self) -> int:
        return self.field.dim

    @property
    def atomic_dim(self) -> int:
        return self.atoms.dim

    def flatten(self, n: int, m: int) -> int:
        if not 0 <= n < self.field_dim:
            raise ValueError(f"Fock index {n} out of range")
        if not 0 <= m < self.atomic_dim:
            raise ValueError(f"atomic index {m} out of range")
        return n * self.atomic_dim + m

    def unflatten(self, i: int) -> tuple:
        if not 0 <= i < self.dim:
            raise ValueError(f"composite index {i} out of range")
        return divmod(i, self.atomic_dim)


# ---------------------------------------------------------------------------
# field operators

def annihilation_matrix(space: FieldSpace) -> np.ndarray:
    """Ladder operator a with a[n-1, n] = sqrt(n)."""
    return np.diag(np.sqrt(np.arange(1, space.dim)), k=1).astype(complex)


def creation_matrix(space: FieldSpace) -> np.ndarray:
    return annihilation_matrix(space).conj().T


def number_operator(space: FieldSpace) -> np.ndarray:
    return np.diag(np.arange(space.dim)).astype(complex)


def quadratures(space: FieldSpace) -> tuple:
    """Hermitian pair X = (a + a^dag)/2, P = (a - a^dag)/(2i)."""
    a = annihilation_matrix(space)
    ad = a.conj().T
    x = (a + ad) / 2.0
    p = (a - ad) / 2.0j
    return x, p


def field_parity_operator(space: FieldSpace) -> np.ndarray:
    """diag((-1)^n) on the truncated Fock basis."""
    return np.diag((-1.0) ** np.arange(space.dim)).astype(complex)


def fock_state(space: FieldSpace, n: int) -> np.ndarray:
    if not 0 <= n <= space.n_trunc:
        raise ValueError(f"Fock index {n} exceeds truncation {space.n_trunc}")
    v = np.zeros(space.dim, dtype=complex)
    v[n] = 1.0
    return v


def coherent_state(space: FieldSpace, alpha: complex) -> np.ndarray:
    """Truncated coherent state, renormalized on the kept levels.

    Amplitudes are evaluated in log space so large |alpha| does not
    overflow before normalization.
    """
    n = np.arange(space.dim)
    if alpha == 0:
        return fock_state(space, 0)
    from scipy.special import gammaln

    log_mag = n * np.log(np.abs(alpha)) - 0.5 * gammaln(n + 1.0) \
        - 0.5 * np.abs(alpha) ** 2
    phase = np.exp(1j * n * np.angle(alpha))
    v = np.exp(log_mag) * phase
    return v / np.linalg.norm(v)


def coherent_truncation_leakage(space: FieldSpace, alpha: complex) -> float:
    """Poisson weight of |alpha> above the numerical truncation."""
    from scipy.stats import poisson

    mean = np.abs(alpha) ** 2
    return float(poisson.sf(space.n_trunc, mean)) if mean > 0 else 0.0


# ---------------------------------------------------------------------------
# atomic operators

def transition_operator_matrix(
    atoms: AtomicSystem, atom: int, upper: int, lower: int
) -> np.ndarray:
    """|upper><lower| on the given atom, identity on the others.

    Indices are 0-based; the result acts on the atomic space only.
    """
    if not 0 <= atom < atoms.n_atoms:
        raise ValueError(f"atom index {atom} out of range (have {atoms.n_atoms})")
    counts = atoms.level_counts
    for name, idx in (("upper", upper), ("lower", lower)):
        if not 0 <= idx < counts[atom]:
            raise ValueError(
                f"{name} level index {idx} out of range for atom {atom} "
                f"with {counts[atom]} levels"
            )
    op = np.ones((1, 1), dtype=complex)
    for j, n in enumerate(counts):
        if j == atom:
            block = np.zeros((n, n), dtype=complex)
            block[upper, lower] = 1.0
        else:
            block = np.eye(n, dtype=complex)
        op = np.kron(op, block)
    return op


def atomic_operator(atoms: AtomicSystem, atom: int, op: np.ndarray) -> np.ndarray:
    """Embed a single-atom operator into the full atomic space."""
    if not 0 <= atom < atoms.n_atoms:
        raise ValueError(f"atom index {atom} out of range (have {atoms.n_atoms})")
    n = atoms.level_counts[atom]
    op = np.asarray(op, dtype=complex)
    if op.shape != (n, n):
        raise ValueError(f"operator shape {op.shape} does not match {n} levels")
    full = np.ones((1, 1), dtype=complex)
    for j, m in enumerate(atoms.level_counts):
        block = op if j == atom else np.eye(m, dtype=complex)
        full = np.kron(full, block)
    return full


def atomic_basis_state(atoms: AtomicSystem, levels) -> np.ndarray:
    v = np.zeros(atoms.dim, dtype=complex)
    v[atoms.flatten(levels)] = 1.0
    return v


def atomic_ground_state(atoms: AtomicSystem) -> np.ndarray:
    return atomic_basis_state(atoms, (0,) * atoms.n_atoms)


# ---------------------------------------------------------------------------
# composite embeddings

def embed_field_operator(op: np.ndarray, space: CompositeSpace) -> np.ndarray:
    op = np.asarray(op, dtype=complex)
    if op.shape != (space.field_dim, space.field_dim):
        raise ValueError(
            f"field operator shape {op.shape} does not match dimension "
            f"{space.field_dim}"
        )
    return np.kron(op, np.eye(space.atomic_dim, dtype=complex))


def embed_atomic_operator(op: np.ndarray, space: CompositeSpace) -> np.ndarray:
    op = np.asarray(op, dtype=complex)
    if op.shape != (space.atomic_dim, space.atomic_dim):
        raise ValueError(
            f"atomic operator shape {op.shape} does not match dimension "
            f"{space.atomic_dim}"
        )
    return np.kron(np.eye(space.field_dim, dtype=complex), op)


def joint_parity_operator(space: CompositeSpace) -> np.ndarray:
    """exp(i pi (a^dag a + sum_j P_excited^(j))) for all-qubit systems."""
    if not space.atoms.all_qubits:
        raise ValueError("joint parity is defined for two-level atoms only")
    n_exc = np.array(
        [sum(space.atoms.unflatten(m)) for m in range(space.atomic_dim)]
    )
    fock = np.arange(space.field_dim)
    diag = (-1.0) ** (fock[:, None] + n_exc[None, :])
    return np.diag(diag.ravel()).astype(complex)


# ---------------------------------------------------------------------------
# small numeric helpers

def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def normalize(v: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("cannot normalize the zero vector")
    return np.asarray(v, dtype=complex) / nrm

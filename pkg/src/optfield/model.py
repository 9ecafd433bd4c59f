"""Joint Hamiltonian construction and named scenario presets.

Energies are expressed in units of the mode frequency and times in units of
its inverse period, so the default mode frequency is 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field as _field

import numpy as np

from .operators import (
    AtomicSystem,
    CompositeSpace,
    FieldSpace,
    annihilation_matrix,
    atomic_ground_state,
    hermiticity_defect,
    normalize,
    number_operator,
    qubit_system,
)

# Presets quote the coupling g of the sigma_x * (a + a^dag) form used on
# every figure axis; the internal interaction couples to X = (a + a^dag)/2,
# so preset coupling matrices carry 2 g.
COUPLING_FORM_FACTOR = 2.0

MULTILEVEL_SPECTRA = {
    "jc": (0.86, 0.92, 1.1, 1.2, 2.0),
    "rsc": (0.86, 0.92, 1.1, 1.2, 2.0),
    "dr": (0.32, 0.35, 0.4, 0.42, 0.5),
}
MULTILEVEL_COUPLINGS = {"jc": 0.001, "rsc": 0.1, "dr": 0.5}

PRESET_NAMES = (
    "rabi_resonant",
    "multilevel_jc",
    "multilevel_rsc",
    "multilevel_dr",
    "multiqubit",
)


@dataclass
class ScenarioSpec:
    """Complete control problem statement.

    ``initial_atomic`` and ``target_atomic`` are state vectors on the atomic
    factor; the field starts in the control state being optimized.
    """

    atoms: AtomicSystem
    field: FieldSpace
    control_time: float
    target_atomic: np.ndarray
    initial_atomic: np.ndarray = None
    omega_c: float = 1.0
    label: str = ""

    def __post_init__(self):
        if self.control_time < 0:
            raise ValueError(
                f"control_time must be nonnegative, got {self.control_time}"
            )
        if self.initial_atomic is None:
            self.initial_atomic = atomic_ground_state(self.atoms)
        self.initial_atomic = normalize(np.asarray(self.initial_atomic, complex))
        self.target_atomic = normalize(np.asarray(self.target_atomic, complex))
        d = self.atoms.dim
        for name, v in (
            ("initial_atomic", self.initial_atomic),
            ("target_atomic", self.target_atomic),
        ):
            if v.shape != (d,):
                raise ValueError(f"{name} has shape {v.shape}, expected ({d},)")

    @property
    def composite(self) -> CompositeSpace:
        return CompositeSpace(self.field, self.atoms)

    def with_field(self, field: FieldSpace) -> "ScenarioSpec":
        return ScenarioSpec(
            atoms=self.atoms,
            field=field,
            control_time=self.control_time,
            target_atomic=self.target_atomic,
            initial_atomic=self.initial_atomic,
            omega_c=self.omega_c,
            label=self.label,
        )


def atomic_energy_diagonal(atoms: AtomicSystem) -> np.ndarray:
    """Sum of per-atom level energies over the flat atomic basis."""
    diag = np.zeros(1)
    for e in atoms.energies:
        diag = (diag[:, None] + e[None, :]).ravel()
    return diag


def atomic_coupling_matrix(atoms: AtomicSystem) -> np.ndarray:
    """Sum over atoms of the embedded coupling matrices g_kl |k><l|."""
    total = np.zeros((atoms.dim, atoms.dim), dtype=complex)
    for j in range(atoms.n_atoms):
        op = np.ones((1, 1), dtype=complex)
        for jj, n in enumerate(atoms.level_counts):
            block = atoms.couplings[jj] if jj == j else np.eye(n)
            op = np.kron(op, block)
        total += op
    return total


def build_hamiltonian(spec: ScenarioSpec) -> np.ndarray:
    """H = omega_c a^dag a + sum_jk omega_k |k><k| + sum g_kl |k><l| X.

    Counter-rotating terms are present by construction; no rotating-wave
    approximation is applied anywhere.
    """
    space = spec.composite
    a = annihilation_matrix(spec.field)
    x = (a + a.conj().T) / 2.0
    num = number_operator(spec.field)
    i_atom = np.eye(space.atomic_dim, dtype=complex)
    i_field = np.eye(space.field_dim, dtype=complex)

    h = spec.omega_c * np.kron(num, i_atom)
    h += np.kron(i_field, np.diag(atomic_energy_diagonal(spec.atoms)))
    h += np.kron(x, atomic_coupling_matrix(spec.atoms))

    defect = hermiticity_defect(h)
    if defect > 1e-12:
        raise ValueError(f"assembled Hamiltonian is not Hermitian (defect {defect})")
    return h


# ---------------------------------------------------------------------------
# presets

def _field_space(n_max: int, n_trunc) -> FieldSpace:
    return FieldSpace(n_max, -1 if n_trunc is None else n_trunc)


def rabi_resonant(
    g: float,
    control_time: float,
    theta: float,
    phi: float = 0.0,
    n_max: int = 80,
    n_trunc: int = None,
) -> ScenarioSpec:
    """Resonant two-level atom, target on the Bloch sphere at (theta, phi)."""
    from .analysis import bloch_target

    atoms = qubit_system(1, 1.0, COUPLING_FORM_FACTOR * g)
    return ScenarioSpec(
        atoms=atoms,
        field=_field_space(n_max, n_trunc),
        control_time=control_time,
        target_atomic=bloch_target(theta, phi),
        label=f"rabi_resonant(g={g}, theta={theta}, phi={phi})",
    )


def multilevel(
    regime: str,
    control_time: float,
    g: float = None,
    n_max: int = 80,
    n_trunc: int = None,
) -> ScenarioSpec:
    """Six-level ladder: ground, four intermediate levels, isolated top level.

    Allowed transitions couple the ground state to each intermediate level
    and each intermediate level to the top level, all with equal strength.
    The target is the top level.
    """
    if regime not in MULTILEVEL_SPECTRA:
        raise ValueError(f"unknown multilevel regime {regime!r}")
    if g is None:
        g = MULTILEVEL_COUPLINGS[regime]
    energies = np.concatenate([[0.0], MULTILEVEL_SPECTRA[regime]])
    n_levels = energies.size
    gmat = np.zeros((n_levels, n_levels))
    for i in range(1, n_levels - 1):
        gmat[0, i] = gmat[i, 0] = COUPLING_FORM_FACTOR * g
        gmat[i, n_levels - 1] = gmat[n_levels - 1, i] = COUPLING_FORM_FACTOR * g
    atoms = AtomicSystem([energies], [gmat])
    target = np.zeros(n_levels, dtype=complex)
    target[n_levels - 1] = 1.0
    return ScenarioSpec(
        atoms=atoms,
        field=_field_space(n_max, n_trunc),
        control_time=control_time,
        target_atomic=target,
        label=f"multilevel_{regime}(g={g})",
    )


def multiqubit(
    target: str,
    control_time: float,
    n_atoms: int = 3,
    g: float = 0.01,
    n_max: int = 80,
    n_trunc: int = None,
) -> ScenarioSpec:
    """Register of resonant qubits coupled to the same mode."""
    from .analysis import named_target

    atoms = qubit_system(n_atoms, 1.0, COUPLING_FORM_FACTOR * g)
    return ScenarioSpec(
        atoms=atoms,
        field=_field_space(n_max, n_trunc),
        control_time=control_time,
        target_atomic=named_target(target, n_atoms),
        label=f"multiqubit(target={target}, n_atoms={n_atoms}, g={g})",
    )


_PRESET_REQUIRED = {
    "rabi_resonant": ("g", "control_time", "theta"),
    "multilevel_jc": ("control_time",),
    "multilevel_rsc": ("control_time",),
    "multilevel_dr": ("control_time",),
    "multiqubit": ("target", "control_time"),
}


def preset(name: str, **params) -> ScenarioSpec:
    """Build a named scenario; raises on unknown names or missing parameters."""
    if name not in PRESET_NAMES:
        raise ValueError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    missing = [p for p in _PRESET_REQUIRED[name] if p not in params]
    if missing:
        raise ValueError(f"preset {name!r} is missing parameters: {missing}")
    if name == "rabi_resonant":
        return rabi_resonant(**params)
    if name.startswith("multilevel_"):
        return multilevel(name.split("_", 1)[1], **params)
    return multiqubit(**params)

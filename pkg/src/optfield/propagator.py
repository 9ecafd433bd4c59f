"""Exact time evolution of time-independent Hamiltonians.

One Hermitian eigendecomposition is reused for every requested time, so
evaluating a unitary or a trajectory point costs O(D^2) after the O(D^3)
decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .operators import hermiticity_defect

HERMITIAN_CHECK_TOL = 1e-10


@dataclass
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvector columns."""

    energies: np.ndarray
    states: np.ndarray

    @property
    def dim(self) -> int:
        return self.energies.size


def eigendecompose(h: np.ndarray, check: bool = True) -> SpectralDecomposition:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if check:
        defect = hermiticity_defect(h)
        if defect > HERMITIAN_CHECK_TOL:
            raise ValueError(f"matrix is not Hermitian (defect {defect:.3e})")
    energies, states = scipy.linalg.eigh(h)
    return SpectralDecomposition(energies=energies, states=states)


def evolve_unitary(decomp: SpectralDecomposition, t: float) -> np.ndarray:
    """U(t) = V exp(-i E t) V^dag."""
    phases = np.exp(-1j * decomp.energies * t)
    return (decomp.states * phases[None, :]) @ decomp.states.conj().T


def evolve_state(decomp: SpectralDecomposition, psi0: np.ndarray, t: float) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (decomp.dim,):
        raise ValueError(f"state shape {psi0.shape} does not match dimension {decomp.dim}")
    c = decomp.states.conj().T @ psi0
    return decomp.states @ (np.exp(-1j * decomp.energies * t) * c)


def trajectory(decomp: SpectralDecomposition, psi0: np.ndarray, times) -> np.ndarray:
    """States at the given times, one per column."""
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (decomp.dim,):
        raise ValueError(f"state shape {psi0.shape} does not match dimension {decomp.dim}")
    times = np.asarray(times, dtype=float)
    c = decomp.states.conj().T @ psi0
    phases = np.exp(-1j * np.outer(decomp.energies, times))
    return decomp.states @ (phases * c[:, None])


def population_timeseries(
    decomp: SpectralDecomposition,
    psi0: np.ndarray,
    times,
    projector: np.ndarray,
) -> np.ndarray:
    """<psi(t)| P |psi(t)> for each requested time."""
    projector = np.asarray(projector, dtype=complex)
    if projector.shape != (decomp.dim, decomp.dim):
        raise ValueError(
            f"projector shape {projector.shape} does not match dimension {decomp.dim}"
        )
    psi = trajectory(decomp, psi0, times)
    return np.einsum("dk,dk->k", psi.conj(), projector @ psi).real

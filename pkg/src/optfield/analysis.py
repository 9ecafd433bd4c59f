"""Field-state diagnostics and target-state constructors.

Covers photon-number statistics, Wigner functions on quadrature grids
matching X = (a + a^dag)/2, named multi-qubit targets, and the weak-coupling
resonance condition for full population transfer by a Fock state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .operators import FieldSpace, annihilation_matrix
from .propagator import eigendecompose, evolve_unitary

WIGNER_RELIABLE_FRACTION = 0.8
_WIGNER_CHUNK = 4096


@dataclass
class AnalysisReport:
    """Photon-number statistics of a field state."""

    amplitudes: np.ndarray
    n_av: float
    mandel_q: float
    parity: float


@dataclass
class WignerGrid:
    """Wigner function samples W(x + i p) on a Cartesian quadrature grid.

    ``values[i, j]`` is W at (x[i], p[j]). ``reliable`` is False when the
    grid reaches into the region where the truncated basis cannot represent
    the displaced state faithfully.
    """

    x: np.ndarray
    p: np.ndarray
    values: np.ndarray
    reliable: bool = True


def fock_statistics(state: np.ndarray) -> AnalysisReport:
    """Mean photon number, Mandel Q and photon-number parity of a state.

    Q = (<n^2> - <n>^2 - <n>) / <n>; it is reported as NaN for the vacuum,
    where the ratio is undefined.
    """
    state = np.asarray(state, dtype=complex)
    probs = np.abs(state) ** 2
    total = probs.sum()
    if not np.isclose(total, 1.0, atol=1e-6):
        raise ValueError(f"state is not normalized (norm^2 = {total})")
    n = np.arange(state.size)
    n_av = float(np.dot(n, probs))
    n2 = float(np.dot(n**2, probs))
    q = (n2 - n_av**2 - n_av) / n_av if n_av > 0 else float("nan")
    parity = float(np.dot((-1.0) ** n, probs))
    return AnalysisReport(
        amplitudes=state.copy(), n_av=n_av, mandel_q=q, parity=parity
    )


def poisson_reference(n_av: float, n_trunc: int) -> np.ndarray:
    """Poisson weights with the given mean on Fock levels 0..n_trunc."""
    if n_av < 0:
        raise ValueError(f"mean photon number must be >= 0, got {n_av}")
    n = np.arange(n_trunc + 1)
    if n_av == 0:
        out = np.zeros(n_trunc + 1)
        out[0] = 1.0
        return out
    return np.exp(n * np.log(n_av) - n_av - gammaln(n + 1.0))


def displacement_operator(space: FieldSpace, beta: complex) -> np.ndarray:
    """exp(beta a^dag - beta* a) in the truncated basis.

    Built by spectral decomposition of the Hermitian generator, so the result
    is exactly unitary on the kept levels.
    """
    a = annihilation_matrix(space)
    generator = 1j * (beta * a.conj().T - np.conj(beta) * a)
    return evolve_unitary(eigendecompose(generator), 1.0)


def wigner(state: np.ndarray, x, p) -> WignerGrid:
    """Displaced-parity Wigner function W(beta) over a quadrature grid.

    W(beta) = (2/pi) <psi| D(beta) Pi_parity D(beta)^dag |psi> with
    beta = x + i p. One spectral decomposition of the displacement generator
    serves every grid point: radial displacement is evolution under the
    momentum quadrature and the direction is a Fock-space phase ramp.
    """
    state = np.asarray(state, dtype=complex)
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    dim = state.size
    n_trunc = dim - 1
    if not np.isclose(np.linalg.norm(state), 1.0, atol=1e-6):
        raise ValueError("state must be normalized")

    space = FieldSpace(0, n_trunc)
    a = annihilation_matrix(space)
    radial = eigendecompose(1j * (a.conj().T - a))
    signs = (-1.0) ** np.arange(dim)
    fock = np.arange(dim)

    xs, ps = np.meshgrid(x, p, indexing="ij")
    betas = (xs + 1j * ps).ravel()
    values = np.empty(betas.size)
    for start in range(0, betas.size, _WIGNER_CHUNK):
        chunk = betas[start : start + _WIGNER_CHUNK]
        r = np.abs(chunk)
        # D(-beta) |psi| up to a final Fock-phase ramp that magnitudes ignore
        ramp = np.exp(-1j * np.outer(fock, np.angle(-chunk)))
        w = radial.states.conj().T @ (ramp * state[:, None])
        w *= np.exp(-1j * np.outer(radial.energies, r))
        amps = radial.states @ w
        values[start : start + chunk.size] = signs @ (np.abs(amps) ** 2)
    values *= 2.0 / np.pi

    reliable = bool(
        np.max(np.abs(betas) ** 2) <= WIGNER_RELIABLE_FRACTION * n_trunc
    )
    return WignerGrid(
        x=x, p=p, values=values.reshape(x.size, p.size), reliable=reliable
    )


# ---------------------------------------------------------------------------
# target states

def bloch_target(theta: float, phi: float = 0.0) -> np.ndarray:
    """cos(theta/2)|G> + e^{i phi} sin(theta/2)|E> for a single qubit."""
    return np.array(
        [np.cos(theta / 2.0), np.exp(1j * phi) * np.sin(theta / 2.0)],
        dtype=complex,
    )


NAMED_TARGETS = ("ghz", "w", "all_excited", "all_plus")


def named_target(name: str, n_atoms: int) -> np.ndarray:
    """Standard multi-qubit target states in the lexicographic qubit basis."""
    key = name.lower()
    if key not in NAMED_TARGETS:
        raise ValueError(f"unknown target {name!r}; choose from {NAMED_TARGETS}")
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    if key in ("ghz", "w") and n_atoms < 2:
        raise ValueError(f"target {name!r} needs at least 2 atoms")
    dim = 2**n_atoms
    v = np.zeros(dim, dtype=complex)
    if key == "ghz":
        v[0] = v[dim - 1] = 1.0 / np.sqrt(2.0)
    elif key == "w":
        for j in range(n_atoms):
            v[1 << (n_atoms - 1 - j)] = 1.0 / np.sqrt(n_atoms)
    elif key == "all_excited":
        v[dim - 1] = 1.0
    else:
        v[:] = 1.0 / np.sqrt(dim)
    return v


def jc_fock_resonance(
    g: float, control_time: float, k: int = 0, n_max: int = None
) -> int:
    """Fock level driving a resonant qubit from ground to excited in time T.

    Solves 2 sqrt(n) g T = pi (2k + 1) for n and rounds to the nearest
    integer; valid in the weak-coupling regime.
    """
    if g <= 0 or control_time <= 0:
        raise ValueError("coupling and control time must be positive")
    if k < 0:
        raise ValueError("k must be >= 0")
    n = int(round((np.pi * (2 * k + 1) / (2.0 * g * control_time)) ** 2))
    if n_max is not None and n > n_max:
        raise ValueError(
            f"resonant Fock level {n} exceeds the excitation cap {n_max}; "
            f"increase n_max"
        )
    return n


def entanglement_entropy(state: np.ndarray, atomic_dim: int) -> float:
    """Entropy (bits) of the field/atom split of a composite pure state."""
    state = np.asarray(state, dtype=complex)
    if state.size % atomic_dim != 0:
        raise ValueError(
            f"state size {state.size} is not a multiple of atomic dimension "
            f"{atomic_dim}"
        )
    sv = np.linalg.svd(state.reshape(-1, atomic_dim), compute_uv=False)
    probs = sv**2
    probs = probs[probs > 1e-300]
    probs = probs / probs.sum()
    return float(-np.sum(probs * np.log2(probs)))

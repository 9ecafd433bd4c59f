"""Optimal control of a target system through the initial field state.

The chain is: joint evolution -> transition operator on the field space ->
positive semidefinite control operator -> its top eigenpairs. The largest
eigenvalue is the achievable target-state fidelity and the eigenvector the
optimal initial field state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import ScenarioSpec, build_hamiltonian
from .operators import FieldSpace, coherent_state
from .propagator import SpectralDecomposition, eigendecompose, evolve_state

BASELINE_RADIAL_POINTS = 200
BASELINE_PHASE_POINTS = 128
BASELINE_REFINE_STEP = 1e-4
DEGENERACY_TOL = 1e-3
PARITY_PURITY_MIN = 0.99


@dataclass
class ControlSolution:
    """Eigen-solution of the control operator.

    ``spectrum`` holds the eigenvalues in descending order; ``states`` the
    matching field-space eigenvectors as columns, supported on Fock levels
    0..n_max. The best coherent state inside the excitation constraint is
    attached when the baseline has been evaluated.
    """

    spectrum: np.ndarray
    states: np.ndarray
    n_max: int
    coherent_fidelity: float = None
    coherent_alpha: complex = None

    @property
    def fidelity(self) -> float:
        return float(self.spectrum[0])

    @property
    def optimal_state(self) -> np.ndarray:
        return self.states[:, 0]


def transition_operator(
    u: np.ndarray, initial_atomic: np.ndarray, final_atomic: np.ndarray
) -> np.ndarray:
    """Field-space matrix <n, f| U |m, i> of a composite unitary U."""
    u = np.asarray(u, dtype=complex)
    i_vec = np.asarray(initial_atomic, dtype=complex)
    f_vec = np.asarray(final_atomic, dtype=complex)
    if i_vec.shape != f_vec.shape or i_vec.ndim != 1:
        raise ValueError("atomic states must be 1-d vectors of equal length")
    n_atomic = i_vec.size
    if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] % n_atomic != 0:
        raise ValueError(
            f"operator shape {u.shape} is not compatible with atomic dimension "
            f"{n_atomic}"
        )
    n_field = u.shape[0] // n_atomic
    u4 = u.reshape(n_field, n_atomic, n_field, n_atomic)
    return np.einsum("a,namb,b->nm", f_vec.conj(), u4, i_vec, optimize=True)


def transition_operator_at(
    decomp: SpectralDecomposition,
    t: float,
    initial_atomic: np.ndarray,
    final_atomic: np.ndarray,
) -> np.ndarray:
    """Transition operator at time t straight from the spectral decomposition.

    Avoids forming the full composite unitary: costs O(F D) to project the
    eigenvectors once per atomic state and O(F^2 D) per time.
    """
    i_vec = np.asarray(initial_atomic, dtype=complex)
    f_vec = np.asarray(final_atomic, dtype=complex)
    n_atomic = i_vec.size
    d = decomp.dim
    if d % n_atomic != 0:
        raise ValueError(
            f"decomposition dimension {d} is not a multiple of atomic dimension "
            f"{n_atomic}"
        )
    n_field = d // n_atomic
    v3 = decomp.states.reshape(n_field, n_atomic, d)
    left = np.einsum("a,nad->nd", f_vec.conj(), v3)
    right = np.einsum("mad,a->dm", v3.conj(), i_vec)
    phases = np.exp(-1j * decomp.energies * t)
    return left @ (phases[:, None] * right)


def control_operator(trans: np.ndarray, n_max: int) -> np.ndarray:
    """T^dag P T with P projecting on Fock levels 0..n_max (full field space)."""
    trans = np.asarray(trans, dtype=complex)
    dim = trans.shape[0]
    if not 0 <= n_max < dim:
        raise ValueError(f"n_max {n_max} out of range for field dimension {dim}")
    rows = trans[: n_max + 1, :]
    return rows.conj().T @ rows


def _fix_phases(states: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude amplitude is real positive."""
    out = states.copy()
    for k in range(out.shape[1]):
        idx = int(np.argmax(np.abs(out[:, k])))
        ref = out[idx, k]
        if np.abs(ref) > 0:
            out[:, k] *= np.abs(ref) / ref
    return out


def solve_optimal(
    ctrl: np.ndarray, n_max: int, count: int = None, restrict: bool = True
) -> ControlSolution:
    """Top eigenpairs of the control operator.

    With ``restrict`` (the default) the eigenproblem is posed on the span of
    Fock levels 0..n_max, so returned states respect the excitation cap.
    ``restrict=False`` diagonalizes on the whole truncated space instead,
    for comparison; states may then exceed the cap.
    """
    ctrl = np.asarray(ctrl, dtype=complex)
    dim = ctrl.shape[0]
    if not 0 <= n_max < dim:
        raise ValueError(f"n_max {n_max} out of range for field dimension {dim}")
    if restrict:
        block = ctrl[: n_max + 1, : n_max + 1]
        vals, vecs = scipy.linalg.eigh(block)
        states = np.zeros((dim, vecs.shape[1]), dtype=complex)
        states[: n_max + 1, :] = vecs
    else:
        vals, states = scipy.linalg.eigh(ctrl)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    states = states[:, order]
    # eigh of a PSD matrix may return eigenvalues a few ulp below zero
    vals[(vals < 0) & (vals > -1e-12)] = 0.0
    if count is not None:
        vals = vals[:count]
        states = states[:, :count]
    return ControlSolution(
        spectrum=vals, states=_fix_phases(states), n_max=n_max
    )


# ---------------------------------------------------------------------------
# coherent-state baseline

_GRID_CACHE = {}


def _coherent_grid(dim: int, n_max: int, radial: int, phases: int):
    """Polar grid of truncated coherent states covering |alpha|^2 <= n_max."""
    key = (dim, n_max, radial, phases)
    if key not in _GRID_CACHE:
        radii = np.linspace(0.0, np.sqrt(n_max), radial)
        angles = np.linspace(0.0, 2 * np.pi, phases, endpoint=False)
        alphas = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
        space = FieldSpace(n_max, dim - 1)
        states = np.empty((alphas.size, dim), dtype=complex)
        for i, alpha in enumerate(alphas):
            states[i] = coherent_state(space, alpha)
        _GRID_CACHE[key] = (alphas, states)
    return _GRID_CACHE[key]


def coherent_baseline(
    ctrl: np.ndarray,
    n_max: int,
    radial: int = BASELINE_RADIAL_POINTS,
    phases: int = BASELINE_PHASE_POINTS,
    refine_step: float = BASELINE_REFINE_STEP,
) -> tuple:
    """Best fidelity <alpha| M |alpha> over the disk |alpha|^2 <= n_max.

    A coarse polar scan locates the basin; a compass pattern search then
    refines the maximizer until the step drops below ``refine_step``.
    Returns (fidelity, alpha).
    """
    ctrl = np.asarray(ctrl, dtype=complex)
    dim = ctrl.shape[0]
    space = FieldSpace(n_max, dim - 1)
    radius = np.sqrt(n_max)

    alphas, grid = _coherent_grid(dim, n_max, radial, phases)
    vals = np.einsum("gd,gd->g", grid.conj(), grid @ ctrl.T).real
    best = int(np.argmax(vals))
    alpha, value = alphas[best], vals[best]

    def objective(a: complex) -> float:
        v = coherent_state(space, a)
        return float(np.real(v.conj() @ (ctrl @ v)))

    step = max(radius / max(radial - 1, 1), 2 * np.pi * radius / phases)
    while step > refine_step:
        moved = False
        for delta in (step, -step, 1j * step, -1j * step):
            cand = alpha + delta
            if np.abs(cand) > radius:
                cand = cand * radius / np.abs(cand)
            cand_val = objective(cand)
            if cand_val > value:
                alpha, value = cand, cand_val
                moved = True
        if not moved:
            step /= 2.0
    return value, complex(alpha)


def coherent_approximation(state: np.ndarray) -> complex:
    """<X> + i <P> of a field state, i.e. its mean complex amplitude <a>."""
    state = np.asarray(state, dtype=complex)
    n = np.arange(state.size - 1)
    return complex(np.sum(np.sqrt(n + 1) * state[:-1].conj() * state[1:]))


# ---------------------------------------------------------------------------
# parity superposition post-processing

def _parity_expectation(state: np.ndarray) -> float:
    signs = (-1.0) ** np.arange(state.size)
    return float(np.sum(signs * np.abs(state) ** 2))


def parity_superposition(
    solution: ControlSolution,
    degeneracy_tol: float = DEGENERACY_TOL,
    n_phases: int = 64,
) -> tuple:
    """Combine a nearly degenerate opposite-parity pair into a localized state.

    When the top two eigenvalues are within ``degeneracy_tol`` and the states
    carry well-defined opposite Fock parity, returns the relative-phase
    superposition maximizing the best coherent-state overlap, together with
    ``True``. Otherwise returns the leading state unchanged with ``False``.
    """
    if solution.states.shape[1] < 2:
        return solution.optimal_state, False
    lam0, lam1 = solution.spectrum[0], solution.spectrum[1]
    s0 = solution.states[:, 0]
    s1 = solution.states[:, 1]
    p0 = _parity_expectation(s0)
    p1 = _parity_expectation(s1)
    if (
        lam0 - lam1 >= degeneracy_tol
        or np.abs(p0) < PARITY_PURITY_MIN
        or np.abs(p1) < PARITY_PURITY_MIN
        or np.sign(p0) == np.sign(p1)
    ):
        return solution.optimal_state, False

    _, grid = _coherent_grid(
        s0.size, solution.n_max, BASELINE_RADIAL_POINTS, BASELINE_PHASE_POINTS
    )
    c0 = grid.conj() @ s0
    c1 = grid.conj() @ s1
    chis = np.linspace(0.0, 2 * np.pi, n_phases, endpoint=False)
    best_state, best_score = None, -1.0
    for chi in chis:
        overlaps = np.abs(c0 + np.exp(1j * chi) * c1) ** 2 / 2.0
        score = float(np.max(overlaps))
        if score > best_score:
            best_score = score
            best_state = (s0 + np.exp(1j * chi) * s1) / np.sqrt(2.0)
    return best_state, True


def localization_score(state: np.ndarray, n_max: int) -> float:
    """Best coherent-state overlap |<alpha|psi>|^2 over the baseline grid."""
    _, grid = _coherent_grid(
        state.size, n_max, BASELINE_RADIAL_POINTS, BASELINE_PHASE_POINTS
    )
    return float(np.max(np.abs(grid.conj() @ state) ** 2))


# ---------------------------------------------------------------------------
# end-to-end helpers

def forward_population(
    decomp: SpectralDecomposition,
    t: float,
    field_state: np.ndarray,
    initial_atomic: np.ndarray,
    target_atomic: np.ndarray,
    n_max: int = None,
) -> float:
    """Propagate |field> x |i> for time t, then project on (Fock <= n_max) x |f>.

    This closes the loop on the eigenvalue route: for the optimal state the
    result reproduces the fidelity. ``n_max=None`` drops the excitation cap
    and measures the bare target-state population.
    """
    field_state = np.asarray(field_state, dtype=complex)
    i_vec = np.asarray(initial_atomic, dtype=complex)
    f_vec = np.asarray(target_atomic, dtype=complex)
    psi0 = np.kron(field_state, i_vec)
    psi_t = evolve_state(decomp, psi0, t)
    amps = psi_t.reshape(field_state.size, i_vec.size) @ f_vec.conj()
    if n_max is not None:
        amps = amps[: n_max + 1]
    return float(np.sum(np.abs(amps) ** 2))


def solve_scenario(
    spec: ScenarioSpec,
    count: int = None,
    baseline: bool = False,
    restrict: bool = True,
    decomp: SpectralDecomposition = None,
) -> ControlSolution:
    """Assemble, diagonalize and solve a scenario in one call.

    A precomputed spectral decomposition of the scenario Hamiltonian can be
    passed to amortize sweeps over control time or target state.
    """
    if decomp is None:
        decomp = eigendecompose(build_hamiltonian(spec))
    trans = transition_operator_at(
        decomp, spec.control_time, spec.initial_atomic, spec.target_atomic
    )
    ctrl = control_operator(trans, spec.field.n_max)
    solution = solve_optimal(ctrl, spec.field.n_max, count=count, restrict=restrict)
    if baseline:
        value, alpha = coherent_baseline(ctrl, spec.field.n_max)
        solution.coherent_fidelity = value
        solution.coherent_alpha = alpha
    return solution

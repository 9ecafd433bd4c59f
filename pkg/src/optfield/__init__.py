"""Optimal initial states of a bosonic control mode.

Given a target system coupled linearly to one field mode, the package
assembles the joint Hamiltonian, propagates it exactly, and solves the
eigenvalue problem whose top eigenpair gives the best achievable
target-state fidelity and the field state achieving it, at any coupling
strength.
"""

from .operators import (
    AtomicSystem,
    CompositeSpace,
    FieldSpace,
    annihilation_matrix,
    atomic_basis_state,
    atomic_ground_state,
    coherent_state,
    creation_matrix,
    embed_atomic_operator,
    embed_field_operator,
    field_parity_operator,
    fock_state,
    joint_parity_operator,
    number_operator,
    quadratures,
    qubit_system,
    transition_operator_matrix,
)
from .model import (
    ScenarioSpec,
    build_hamiltonian,
    multilevel,
    multiqubit,
    preset,
    rabi_resonant,
)
from .propagator import (
    SpectralDecomposition,
    eigendecompose,
    evolve_state,
    evolve_unitary,
    population_timeseries,
    trajectory,
)
from .control import (
    ControlSolution,
    coherent_approximation,
    coherent_baseline,
    control_operator,
    forward_population,
    localization_score,
    parity_superposition,
    solve_optimal,
    solve_scenario,
    transition_operator,
    transition_operator_at,
)
from .analysis import (
    AnalysisReport,
    WignerGrid,
    bloch_target,
    displacement_operator,
    entanglement_entropy,
    fock_statistics,
    jc_fock_resonance,
    named_target,
    poisson_reference,
    wigner,
)

__version__ = "0.1.0"

import numpy as np
import pytest
import scipy.stats

from optfield.analysis import (
    bloch_target,
    displacement_operator,
    entanglement_entropy,
    fock_statistics,
    jc_fock_resonance,
    named_target,
    poisson_reference,
    wigner,
)
from optfield.control import forward_population, solve_scenario
from optfield.model import build_hamiltonian, rabi_resonant
from optfield.operators import FieldSpace, coherent_state, fock_state
from optfield.propagator import eigendecompose

from conftest import random_state


def test_fock_statistics_fock_state():
    space = FieldSpace(8, 16)
    report = fock_statistics(fock_state(space, 5))
    assert report.n_av == pytest.approx(5.0)
    assert report.mandel_q == pytest.approx(-1.0)
    assert report.parity == pytest.approx(-1.0)


def test_fock_statistics_coherent_is_poissonian():
    space = FieldSpace(40, 80)
    report = fock_statistics(coherent_state(space, 2.0))
    assert report.mandel_q == pytest.approx(0.0, abs=1e-6)
    assert report.n_av == pytest.approx(4.0, abs=1e-6)


def test_fock_statistics_vacuum_q_undefined():
    space = FieldSpace(4)
    report = fock_statistics(fock_state(space, 0))
    assert np.isnan(report.mandel_q)
    assert report.parity == pytest.approx(1.0)


def test_poisson_reference_small_means():
    assert np.allclose(poisson_reference(0.0, 4), [1, 0, 0, 0, 0])
    ref = poisson_reference(1.0, 6)
    assert ref[0] == pytest.approx(np.exp(-1.0))
    assert ref[1] == pytest.approx(np.exp(-1.0))
    with pytest.raises(ValueError):
        poisson_reference(-0.5, 4)


@pytest.mark.parametrize("n_av", [0.5, 1.0, 2.0, 5.0, 25.0])
def test_poisson_reference_tail_bound(n_av):
    n_trunc = int(np.ceil(n_av + 10 * np.sqrt(n_av)))
    ref = poisson_reference(n_av, n_trunc)
    assert ref.sum() >= 1 - 1e-8
    # agrees with an independent distribution implementation
    assert ref.sum() == pytest.approx(
        scipy.stats.poisson.cdf(n_trunc, n_av), abs=1e-12
    )


def test_displacement_operator_builds_coherent_state():
    space = FieldSpace(10, 40)
    beta = 0.9 + 0.4j
    d = displacement_operator(space, beta)
    assert np.max(np.abs(d @ d.conj().T - np.eye(space.dim))) < 1e-9
    displaced = d @ fock_state(space, 0)
    assert np.max(np.abs(displaced - coherent_state(space, beta))) < 1e-8


def test_wigner_vacuum_gaussian():
    x = np.linspace(-3, 3, 61)
    grid = wigner(fock_state(FieldSpace(0, 60), 0), x, x)
    xs, ps = np.meshgrid(x, x, indexing="ij")
    reference = (2 / np.pi) * np.exp(-2 * (xs**2 + ps**2))
    assert np.max(np.abs(grid.values - reference)) < 1e-6
    assert grid.values[30, 30] == pytest.approx(2 / np.pi, abs=1e-9)
    assert grid.reliable


def test_wigner_fock_one_negative_at_origin():
    x = np.array([0.0])
    grid = wigner(fock_state(FieldSpace(0, 40), 1), x, x)
    assert grid.values[0, 0] == pytest.approx(-2 / np.pi, abs=1e-9)


def test_wigner_displaced_vacuum():
    space = FieldSpace(0, 80)
    beta = 1.1 - 0.6j
    x = np.linspace(-3, 3, 41)
    grid = wigner(coherent_state(space, beta), x, x)
    xs, ps = np.meshgrid(x, x, indexing="ij")
    reference = (2 / np.pi) * np.exp(
        -2 * ((xs - beta.real) ** 2 + (ps - beta.imag) ** 2)
    )
    assert np.max(np.abs(grid.values - reference)) < 1e-6


def test_wigner_quadrature_normalization(rng):
    x = np.linspace(-5, 5, 101)
    v = np.zeros(121, dtype=complex)
    raw = random_state(rng, 12) * np.exp(-0.2 * np.arange(12))
    v[:12] = raw / np.linalg.norm(raw)
    grid = wigner(v, x, x)
    integral = grid.values.sum() * (x[1] - x[0]) ** 2
    assert integral == pytest.approx(1.0, abs=1e-3)


def test_wigner_reliability_flag():
    x = np.linspace(-6, 6, 5)
    grid = wigner(fock_state(FieldSpace(0, 30), 0), x, x)
    assert not grid.reliable


def test_named_targets():
    ghz2 = named_target("ghz", 2)
    assert np.allclose(ghz2, np.array([1, 0, 0, 1]) / np.sqrt(2))
    w3 = named_target("w", 3)
    expected = np.zeros(8)
    expected[[4, 2, 1]] = 1 / np.sqrt(3)
    assert np.allclose(w3, expected)
    assert np.allclose(named_target("all_excited", 2), [0, 0, 0, 1])
    assert np.allclose(named_target("all_plus", 2), 0.5 * np.ones(4))
    for name in ("ghz", "w", "all_plus"):
        assert np.linalg.norm(named_target(name, 4)) == pytest.approx(1.0)


def test_named_target_permutation_symmetry():
    for name in ("ghz", "w"):
        v = named_target(name, 3)
        tensor = v.reshape(2, 2, 2)
        assert np.allclose(tensor, tensor.transpose(1, 0, 2))
        assert np.allclose(tensor, tensor.transpose(0, 2, 1))


def test_named_target_errors():
    with pytest.raises(ValueError, match="unknown target"):
        named_target("bell", 2)
    with pytest.raises(ValueError, match="at least 2"):
        named_target("w", 1)


def test_bloch_target():
    assert np.allclose(bloch_target(0.0), [1, 0])
    e = bloch_target(np.pi)
    assert abs(e[1]) == pytest.approx(1.0)
    assert abs(e[0]) < 1e-12
    v = bloch_target(np.pi / 2, 0.7)
    assert abs(v[0]) == pytest.approx(abs(v[1]))
    assert np.angle(v[1]) == pytest.approx(0.7)


def test_jc_fock_resonance_exact_points():
    assert jc_fock_resonance(1.0, np.pi / 2) == 1
    assert jc_fock_resonance(1.0, np.pi / 4) == 4
    assert jc_fock_resonance(0.5, np.pi / 2, k=1) == 36
    with pytest.raises(ValueError, match="increase n_max"):
        jc_fock_resonance(0.001, 10.0, n_max=80)
    with pytest.raises(ValueError):
        jc_fock_resonance(-1.0, 1.0)


def test_jc_fock_resonance_forward_oracle():
    g = 0.001
    t = np.pi / (4 * g)  # 2 sqrt(4) g T = pi
    n = jc_fock_resonance(g, t)
    assert n == 4
    spec = rabi_resonant(g=g, control_time=t, theta=np.pi, n_max=10)
    dec = eigendecompose(build_hamiltonian(spec))
    p = forward_population(
        dec, t, fock_state(spec.field, n), spec.initial_atomic, spec.target_atomic, None
    )
    assert p > 0.999


def test_parity_definite_eigenstates_for_parity_definite_target():
    spec = rabi_resonant(g=0.2, control_time=25.0, theta=np.pi, n_max=40)
    sol = solve_scenario(spec)
    for k in range(4):
        parity = fock_statistics(sol.states[:, k]).parity
        assert abs(parity) == pytest.approx(1.0, abs=1e-6)


def test_entanglement_entropy_reference_states():
    product = np.kron(np.array([1, 0, 0], complex), np.array([1, 1], complex) / np.sqrt(2))
    assert entanglement_entropy(product, 2) == pytest.approx(0.0, abs=1e-12)
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1 / np.sqrt(2)
    assert entanglement_entropy(bell, 2) == pytest.approx(1.0, abs=1e-12)

import numpy as np
import pytest

from optfield.model import build_hamiltonian, rabi_resonant
from optfield.operators import embed_atomic_operator, fock_state
from optfield.propagator import (
    eigendecompose,
    evolve_state,
    evolve_unitary,
    population_timeseries,
    trajectory,
)

from conftest import random_hermitian, random_state


def test_eigendecompose_diagonal():
    h = np.diag([3.0, -1.0, 2.0]).astype(complex)
    dec = eigendecompose(h)
    assert np.allclose(dec.energies, [-1.0, 2.0, 3.0])
    # columns are permuted identity vectors
    assert np.allclose(np.abs(dec.states), np.eye(3)[:, [1, 2, 0]])


def test_eigendecompose_sigma_x():
    sigma_x = np.array([[0, 1], [1, 0]], dtype=complex)
    dec = eigendecompose(sigma_x)
    assert np.allclose(dec.energies, [-1.0, 1.0])


def test_eigendecompose_rejects_non_hermitian():
    with pytest.raises(ValueError, match="not Hermitian"):
        eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_reconstruction_and_orthonormality(rng):
    h = random_hermitian(rng, 40)
    dec = eigendecompose(h)
    recon = (dec.states * dec.energies[None, :]) @ dec.states.conj().T
    assert np.max(np.abs(recon - h)) < 1e-9 * np.max(np.abs(h))
    gram = dec.states.conj().T @ dec.states
    assert np.max(np.abs(gram - np.eye(40))) < 1e-10


def test_jc_manifold_splitting():
    # weak resonant coupling: the n-excitation doublet splits by 2 sqrt(n) g
    g = 0.001
    spec = rabi_resonant(g=g, control_time=1.0, theta=np.pi, n_max=8, n_trunc=16)
    dec = eigendecompose(build_hamiltonian(spec))
    for n in (1, 2, 5):
        doublet = np.sort(np.abs(dec.energies - n))[:2]
        pair = dec.energies[np.argsort(np.abs(dec.energies - n))[:2]]
        splitting = np.abs(pair[0] - pair[1])
        assert splitting == pytest.approx(2 * np.sqrt(n) * g, rel=0.01)
        assert np.max(doublet) < 0.01


def test_unitary_at_zero_and_group_property(rng):
    h = random_hermitian(rng, 12)
    dec = eigendecompose(h)
    assert np.max(np.abs(evolve_unitary(dec, 0.0) - np.eye(12))) < 1e-12
    u1 = evolve_unitary(dec, 0.7)
    u2 = evolve_unitary(dec, 1.9)
    u12 = evolve_unitary(dec, 2.6)
    assert np.max(np.abs(u1 @ u2 - u12)) < 1e-9
    assert np.max(np.abs(u1 @ u1.conj().T - np.eye(12))) < 1e-9


def test_decoupled_phase_evolution():
    spec = rabi_resonant(g=0.0, control_time=1.0, theta=np.pi, n_max=4, n_trunc=8)
    dec = eigendecompose(build_hamiltonian(spec))
    t = 1.37
    u = evolve_unitary(dec, t)
    for n in (0, 2, 5):
        idx = spec.composite.flatten(n, 1)  # |E, n>
        assert u[idx, idx] == pytest.approx(np.exp(-1j * (1.0 + n) * t), abs=1e-10)


def test_population_timeseries_basics(rng):
    h = random_hermitian(rng, 10)
    dec = eigendecompose(h)
    psi0 = random_state(rng, 10)
    times = np.linspace(0, 3, 7)
    proj = np.outer(psi0, psi0.conj())
    p = population_timeseries(dec, psi0, times, proj)
    assert p[0] == pytest.approx(1.0, abs=1e-10)
    norm_series = population_timeseries(dec, psi0, times, np.eye(10))
    assert np.max(np.abs(norm_series - 1.0)) < 1e-9


def test_jc_rabi_oscillation_closed_form():
    g = 0.001
    n = 4
    spec = rabi_resonant(g=g, control_time=1.0, theta=np.pi, n_max=8, n_trunc=16)
    dec = eigendecompose(build_hamiltonian(spec))
    psi0 = np.kron(fock_state(spec.field, n), np.array([1, 0], dtype=complex))
    proj_e = embed_atomic_operator(np.diag([0.0, 1.0]), spec.composite)
    times = np.linspace(0, np.pi / (np.sqrt(n) * g), 9)
    p = population_timeseries(dec, psi0, times, proj_e)
    expected = np.sin(np.sqrt(n) * g * times) ** 2
    assert np.max(np.abs(p - expected)) < 0.01


def test_energy_conservation(rng):
    h = random_hermitian(rng, 30)
    dec = eigendecompose(h)
    psi0 = random_state(rng, 30)
    times = np.linspace(0, 10, 11)
    psi = trajectory(dec, psi0, times)
    energies = np.einsum("dk,dk->k", psi.conj(), h @ psi).real
    assert np.max(np.abs(energies - energies[0])) < 1e-9 * max(1.0, abs(energies[0]))


def test_against_runge_kutta_integrator(rng):
    # independent fixed-step oracle on a random 50-dimensional instance
    h = random_hermitian(rng, 50)
    h *= 1.0 / np.max(np.abs(eigendecompose(h).energies))
    dec = eigendecompose(h)
    psi0 = random_state(rng, 50)
    dt = 1e-3
    steps = 1000
    sample_every = 100

    def rhs(v):
        return -1j * (h @ v)

    psi = psi0.copy()
    max_dev = 0.0
    for step in range(1, steps + 1):
        k1 = rhs(psi)
        k2 = rhs(psi + 0.5 * dt * k1)
        k3 = rhs(psi + 0.5 * dt * k2)
        k4 = rhs(psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if step % sample_every == 0:
            exact = evolve_state(dec, psi0, step * dt)
            max_dev = max(max_dev, float(np.max(np.abs(psi - exact))))
    assert max_dev < 1e-6


def test_dimension_mismatch_errors(rng):
    dec = eigendecompose(random_hermitian(rng, 5))
    with pytest.raises(ValueError):
        evolve_state(dec, np.zeros(4), 1.0)
    with pytest.raises(ValueError):
        population_timeseries(dec, np.eye(5)[0], [0.0], np.eye(4))

import math

import numpy as np
import pytest

from udw_coherence.channel import (
    ChannelKernel,
    MaxCoherentQubit,
    QubitState,
    apply_channel,
    choi_matrix,
    cohering_power,
    decohering_power,
    dephase,
    l1_coherence,
    monopole_matrix,
    remaining_coherence,
)


def random_kernel(rng):
    z = math.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
    return ChannelKernel(complex(z), rng.uniform(0.0, 2.0 * math.pi))


def random_state(rng):
    raw = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    mat = raw @ raw.conj().T
    return QubitState.from_matrix(mat / np.trace(mat).real)


def test_state_validation_rejects_bad_matrices():
    with pytest.raises(ValueError):
        QubitState(0.5, 0.1, 0.3, 0.5)  # not hermitian
    with pytest.raises(ValueError):
        QubitState(0.6, 0.0, 0.0, 0.6)  # trace 1.2
    with pytest.raises(ValueError):
        QubitState(0.8, 0.6, 0.6, 0.2)  # negative eigenvalue
    with pytest.raises(ValueError):
        QubitState(0.5 + 0.1j, 0.0, 0.0, 0.5)  # complex diagonal
    with pytest.raises(ValueError):
        QubitState.from_matrix(np.eye(3))


def test_basis_and_max_coherent_states():
    assert l1_coherence(QubitState.ground()) == 0.0
    assert l1_coherence(QubitState.excited()) == 0.0
    psi = MaxCoherentQubit(0.7).state()
    assert abs(l1_coherence(psi) - 1.0) < 1e-15
    assert abs(psi.rho_ge - 0.5 * np.exp(-0.7j)) < 1e-15


def test_dephase_strips_coherence():
    psi = MaxCoherentQubit(1.3).state()
    flat = dephase(psi)
    assert l1_coherence(flat) == 0.0
    assert flat.rho_gg == psi.rho_gg and flat.rho_ee == psi.rho_ee


def test_monopole_matrix_properties():
    rng = np.random.default_rng(11)
    for phase in rng.uniform(0.0, 2.0 * math.pi, 10):
        mu = monopole_matrix(phase)
        assert np.allclose(mu, mu.conj().T)
        assert np.allclose(mu @ mu, np.eye(2))
        assert np.allclose(sorted(np.linalg.eigvalsh(mu)), [-1.0, 1.0])
    assert np.allclose(monopole_matrix(0.0), [[0, 1], [1, 0]])


def test_kernel_validation():
    with pytest.raises(ValueError):
        ChannelKernel(1.2 + 0.0j)
    nudged = ChannelKernel((1.0 + 5e-13) * np.exp(0.4j))
    assert abs(abs(nudged.z) - 1.0) < 1e-15  # round-off pulled back to the disc
    assert ChannelKernel(0.5j, 0.3).phase == 0.3


def test_identity_kernel_is_identity_channel():
    rng = np.random.default_rng(3)
    for _ in range(20):
        rho = random_state(rng)
        out = apply_channel(ChannelKernel(1.0 + 0.0j, rng.uniform(0, 7)), rho)
        assert np.allclose(out.matrix, rho.matrix, atol=1e-14)


def test_vanishing_kernel_scrambles_basis_states():
    out = apply_channel(ChannelKernel(0.0j, 0.9), QubitState.ground())
    assert np.allclose(out.matrix, np.eye(2) / 2, atol=1e-15)


def test_channel_preserves_physicality():
    rng = np.random.default_rng(5)
    for _ in range(50):
        out = apply_channel(random_kernel(rng), random_state(rng)).matrix
        assert abs(np.trace(out).real - 1.0) < 1e-12
        assert np.max(np.abs(out - out.conj().T)) < 1e-12
        assert np.min(np.linalg.eigvalsh(out)) > -1e-12


def test_channel_is_unital():
    rng = np.random.default_rng(6)
    half = QubitState(0.5, 0.0, 0.0, 0.5)
    for _ in range(10):
        out = apply_channel(random_kernel(rng), half)
        assert np.allclose(out.matrix, np.eye(2) / 2, atol=1e-14)


def test_choi_extreme_kernels():
    eigs = np.linalg.eigvalsh(choi_matrix(ChannelKernel(1.0 + 0.0j, 0.3)))
    assert np.allclose(eigs, [0.0, 0.0, 0.0, 2.0], atol=1e-12)
    eigs = np.linalg.eigvalsh(choi_matrix(ChannelKernel(0.0j, 0.3)))
    assert np.allclose(eigs, [0.0, 0.0, 1.0, 1.0], atol=1e-12)


def test_choi_cptp_for_random_kernels():
    rng = np.random.default_rng(8)
    for _ in range(50):
        choi = choi_matrix(random_kernel(rng))
        assert np.min(np.linalg.eigvalsh(choi)) > -1e-12
        assert abs(np.trace(choi).real - 2.0) < 1e-12
        ptrace = choi.reshape(2, 2, 2, 2).trace(axis1=1, axis2=3)
        assert np.allclose(ptrace, np.eye(2), atol=1e-12)


def test_remaining_coherence_special_angles():
    rng = np.random.default_rng(9)
    for _ in range(30):
        kernel = random_kernel(rng)
        assert abs(remaining_coherence(kernel, kernel.phase) - 1.0) < 1e-12
        opposite = remaining_coherence(kernel, kernel.phase + math.pi)
        assert abs(opposite - 1.0) < 1e-12
        for quarter in (0.5 * math.pi, -0.5 * math.pi):
            worst = remaining_coherence(kernel, kernel.phase + quarter)
            assert abs(worst - abs(kernel.z.real)) < 1e-12


def test_remaining_coherence_matches_channel():
    rng = np.random.default_rng(10)
    for _ in range(50):
        kernel = random_kernel(rng)
        theta = rng.uniform(0.0, 2.0 * math.pi)
        survived = l1_coherence(apply_channel(kernel, MaxCoherentQubit(theta).state()))
        assert abs(survived - remaining_coherence(kernel, theta)) < 1e-12


def test_powers_from_kernel():
    kernel = ChannelKernel(0.3 + 0.4j, 0.2)
    assert abs(cohering_power(kernel) - 0.4) < 1e-15
    assert abs(decohering_power(kernel) - 0.7) < 1e-15
    assert cohering_power(ChannelKernel(-0.8 + 0.0j)) == 0.0


def test_cohering_power_attained_on_basis_states():
    rng = np.random.default_rng(12)
    for _ in range(30):
        kernel = random_kernel(rng)
        for state in (QubitState.ground(), QubitState.excited()):
            gained = l1_coherence(apply_channel(kernel, state))
            assert abs(gained - cohering_power(kernel)) < 1e-12

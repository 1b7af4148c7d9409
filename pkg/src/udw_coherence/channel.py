"""Qubit states, l1 coherence, and the channel induced by a kicked field mode.

A pointlike interaction switched on for a single instant leaves the qubit
coupled to one field degree of freedom through its monopole operator.
Tracing the field out compresses everything the field does to the qubit
into one complex number of modulus at most one -- the overlap between the
two field states conditioned on the qubit's monopole eigenvalue.  The
resulting map mixes the identity, conjugation by the monopole operator,
and a commutator term weighted by the imaginary part of that overlap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "QubitState",
    "ChannelKernel",
    "MaxCoherentQubit",
    "l1_coherence",
    "dephase",
    "monopole_matrix",
    "apply_channel",
    "choi_matrix",
    "remaining_coherence",
    "cohering_power",
    "decohering_power",
]

_ATOL = 1e-12


@dataclass(frozen=True)
class QubitState:
    """Physical qubit density matrix in the energy eigenbasis (g, e).

    Validates hermiticity, unit trace and positivity on construction so that
    channel outputs are checked the moment they are built.
    """

    rho_gg: complex
    rho_ge: complex
    rho_eg: complex
    rho_ee: complex

    def __post_init__(self) -> None:
        if abs(self.rho_gg.imag) > _ATOL or abs(self.rho_ee.imag) > _ATOL:
            raise ValueError("diagonal entries must be real")
        if abs(self.rho_eg - self.rho_ge.conjugate()) > _ATOL:
            raise ValueError("matrix is not hermitian")
        trace = self.rho_gg.real + self.rho_ee.real
        if abs(trace - 1.0) > _ATOL:
            raise ValueError(f"trace is {trace}, expected 1")
        det = self.rho_gg.real * self.rho_ee.real - (self.rho_ge * self.rho_eg).real
        if det < -_ATOL or self.rho_gg.real < -_ATOL or self.rho_ee.real < -_ATOL:
            raise ValueError("matrix is not positive semidefinite")

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.rho_gg, self.rho_ge], [self.rho_eg, self.rho_ee]], dtype=complex
        )

    @classmethod
    def from_matrix(cls, mat: np.ndarray) -> "QubitState":
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {mat.shape}")
        return cls(mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1])

    @classmethod
    def ground(cls) -> "QubitState":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def excited(cls) -> "QubitState":
        return cls(0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class MaxCoherentQubit:
    """Equal-weight pure state (|g> + e^{i theta} |e>) / sqrt(2)."""

    theta: float

    def state(self) -> QubitState:
        off = 0.5 * np.exp(-1j * self.theta)
        return QubitState(0.5, off, off.conjugate(), 0.5)


@dataclass(frozen=True)
class ChannelKernel:
    """Field-side data of the induced channel.

    ``z`` is the field-state overlap and must lie in the closed unit disc;
    values that stick out by no more than the validation tolerance are pulled
    back onto the boundary (pure quadrature round-off), anything larger is an
    error in the caller's field model.  ``phase`` is the energy gap times the
    interaction time and fixes the monopole operator's orientation.
    """

    z: complex
    phase: float = 0.0

    def __post_init__(self) -> None:
        mag = abs(self.z)
        if mag > 1.0 + _ATOL:
            raise ValueError(f"|z| = {mag} exceeds 1: not a state overlap")
        if mag > 1.0:
            object.__setattr__(self, "z", self.z / mag)


def monopole_matrix(phase: float) -> np.ndarray:
    """Detector monopole operator at the interaction instant."""
    return np.array(
        [[0.0, np.exp(-1j * phase)], [np.exp(1j * phase), 0.0]], dtype=complex
    )


def _channel_action(z: complex, phase: float, mat: np.ndarray) -> np.ndarray:
    mu = monopole_matrix(phase)
    x, y = z.real, z.imag
    return (
        0.5 * (1.0 + x) * mat
        + 0.5 * (1.0 - x) * (mu @ mat @ mu)
        + 0.5j * y * (mat @ mu - mu @ mat)
    )


def l1_coherence(rho: QubitState) -> float:
    """Sum of the moduli of the off-diagonal entries, 2|rho_ge| for a qubit."""
    return 2.0 * abs(rho.rho_ge)


def dephase(rho: QubitState) -> QubitState:
    """Project onto the energy-diagonal (drop the coherences)."""
    return QubitState(rho.rho_gg, 0.0, 0.0, rho.rho_ee)


def apply_channel(kernel: ChannelKernel, rho: QubitState) -> QubitState:
    return QubitState.from_matrix(_channel_action(kernel.z, kernel.phase, rho.matrix))


def choi_matrix(kernel: ChannelKernel) -> np.ndarray:
    """Unnormalised Choi matrix sum_ij E_ij (x) Phi(E_ij); trace 2, PSD iff CP."""
    out = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            basis = np.zeros((2, 2), dtype=complex)
            basis[i, j] = 1.0
            out += np.kron(basis, _channel_action(kernel.z, kernel.phase, basis))
    return out


def remaining_coherence(kernel: ChannelKernel, theta: float) -> float:
    """l1 coherence left in an equal-weight state of relative phase ``theta``.

    Both monopole eigenstates (theta at the channel phase and at phase +
    pi) are fixed points with coherence frozen at 1; the equatorial
    component halfway between them is scaled by Re z, so the minimum
    |Re z| sits at phase +/- pi/2.  Follows from conjugating the input by
    the monopole projectors, and is checked against apply_channel
    directly.
    """
    angle = theta - kernel.phase
    return float(np.hypot(np.cos(angle), kernel.z.real * np.sin(angle)))


def cohering_power(kernel: ChannelKernel) -> float:
    """Largest coherence the channel creates from any incoherent input."""
    return abs(kernel.z.imag)


def decohering_power(kernel: ChannelKernel) -> float:
    """Largest coherence loss over equal-weight pure inputs."""
    return 1.0 - abs(kernel.z.real)

"""Self-verification battery behind the ``verify`` subcommand.

Each check measures a worst-case deviation of an invariant the package
relies on -- channel physicality, dual-route integral agreement, oracle
cross-checks -- and compares it against a pinned tolerance.  The battery
never fabricates expected values: every reference is either an analytic
closed form or an independent evaluation route.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from . import channel as ch
from . import field as fd
from . import oracle as orc

__all__ = ["CheckResult", "run_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    tolerance: float
    seconds: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance


def _random_kernels(rng: np.random.Generator, n: int) -> Iterator[ch.ChannelKernel]:
    for _ in range(n):
        radius = math.sqrt(rng.uniform())  # area-uniform over the disc
        angle = rng.uniform(0.0, 2.0 * math.pi)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        yield ch.ChannelKernel(radius * np.exp(1j * angle), phase)


def _random_state(rng: np.random.Generator) -> ch.QubitState:
    raw = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    mat = raw @ raw.conj().T
    return ch.QubitState.from_matrix(mat / np.trace(mat).real)


def _check_channel_preserves_states(rng: np.random.Generator, full: bool) -> float:
    worst = 0.0
    for kernel in _random_kernels(rng, 200 if full else 100):
        rho = _random_state(rng)
        out = ch.apply_channel(kernel, rho).matrix
        worst = max(
            worst,
            abs(np.trace(out).real - 1.0),
            float(np.max(np.abs(out - out.conj().T))),
            max(0.0, -float(np.min(np.linalg.eigvalsh(0.5 * (out + out.conj().T))))),
        )
    return worst


def _check_choi_cptp(rng: np.random.Generator, full: bool) -> float:
    worst = 0.0
    radii = np.linspace(0.0, 1.0, 10)
    angles = np.linspace(0.0, 2.0 * math.pi, 10, endpoint=False)
    for r in radii:
        for a in angles:
            kernel = ch.ChannelKernel(r * np.exp(1j * a), rng.uniform(0.0, 2.0 * math.pi))
            choi = ch.choi_matrix(kernel)
            eigs = np.linalg.eigvalsh(choi)
            ptrace = choi.reshape(2, 2, 2, 2).trace(axis1=1, axis2=3)
            worst = max(
                worst,
                max(0.0, -float(eigs[0])),
                abs(float(np.trace(choi).real) - 2.0),
                float(np.max(np.abs(ptrace - np.eye(2)))),
            )
    return worst


def _check_frozen_coherence(rng: np.random.Generator, full: bool) -> float:
    worst = 0.0
    for kernel in _random_kernels(rng, 100):
        fixed = ch.MaxCoherentQubit(kernel.phase).state()
        moved = ch.apply_channel(kernel, fixed)
        worst = max(
            worst,
            float(np.max(np.abs(moved.matrix - fixed.matrix))),
            abs(ch.remaining_coherence(kernel, kernel.phase) - 1.0),
        )
    return worst


def _check_cohering_attained_on_basis(rng: np.random.Generator, full: bool) -> float:
    worst = 0.0
    for kernel in _random_kernels(rng, 100):
        power = ch.cohering_power(kernel)
        for state in (ch.QubitState.ground(), ch.QubitState.excited()):
            gained = ch.l1_coherence(ch.apply_channel(kernel, state))
            worst = max(worst, abs(gained - power))
    return worst


def _check_remaining_matches_channel(rng: np.random.Generator, full: bool) -> float:
    worst = 0.0
    for kernel in _random_kernels(rng, 100):
        theta = rng.uniform(0.0, 2.0 * math.pi)
        direct = ch.l1_coherence(ch.apply_channel(kernel, ch.MaxCoherentQubit(theta).state()))
        worst = max(worst, abs(direct - ch.remaining_coherence(kernel, theta)))
    return worst


_DUAL_R_OVER_COMPTON = np.geomspace(0.1, 5.0, 5)
_DUAL_MASSES = np.geomspace(0.2, 5.0, 5)


def _check_commutator_dual_path(rng: np.random.Generator, full: bool) -> float:
    worst = 0.0
    for r_c in _DUAL_R_OVER_COMPTON:
        for mass in _DUAL_MASSES:
            radius = r_c * 2.0 * math.pi / mass
            direct = fd.mode_commutator(radius, mass)
            closed = fd.mode_commutator_hypergeometric(radius, mass)
            worst = max(worst, abs(direct - closed) / abs(direct))
    return worst


def _check_overlap_dual_path(rng: np.random.Generator, full: bool) -> float:
    worst = 0.0
    for r_c in _DUAL_R_OVER_COMPTON:
        for mass in _DUAL_MASSES:
            radius = r_c * 2.0 * math.pi / mass
            direct = fd.coherent_overlap(radius, mass, mass)  # E = m slice
            closed = fd.coherent_overlap_hypergeometric(radius, mass, mass)
            worst = max(worst, abs(direct - closed) / abs(direct))
    return worst


def _check_massless_anchor(rng: np.random.Generator, full: bool) -> float:
    worst = 0.0
    for radius in (0.2, 1.0, 5.0):
        value = fd.mode_commutator(radius, 0.0)
        worst = max(worst, abs(value * math.pi**3 * radius**2 - 1.0))
    return worst


def _check_thermal_cold_limit(rng: np.random.Generator, full: bool) -> float:
    worst = 0.0
    for radius in (0.5, 2.0):
        for mass in (0.0, 1.0):
            cold = fd.thermal_integral(radius, mass, 1e8)
            target = 2.0 * fd.mode_commutator(radius, mass)
            worst = max(worst, abs(cold - target) / target)
    return worst


def _check_kernel_physicality(rng: np.random.Generator, full: bool) -> float:
    worst = 0.0
    for _ in range(20 if full else 10):
        det = fd.DetectorConfig(
            omega=1.0,
            radius=rng.uniform(0.2, 3.0),
            lam=rng.uniform(0.0, 3.0),
            t0=rng.uniform(-2.0, 2.0),
        )
        mass = rng.uniform(0.0, 3.0)
        coherent = fd.kernel_coherent(det, fd.FieldConfig(mass, fd.Coherent(rng.uniform(0.3, 3.0))))
        envelope = math.exp(-2.0 * det.lam**2 * fd.mode_commutator(det.radius, mass))
        thermal = fd.kernel_thermal(det, fd.FieldConfig(mass, fd.Thermal(rng.uniform(0.2, 5.0))))
        worst = max(
            worst,
            max(0.0, abs(coherent.z) - 1.0),
            abs(abs(coherent.z) - envelope),
            max(0.0, abs(thermal.z) - 1.0),
            abs(thermal.z.imag),
            max(0.0, -thermal.z.real),
        )
    return worst


_BCH_S = np.linspace(0.2, 1.0, 5)
_BCH_ALPHAS = (0.0 + 0.0j, 1.0 + 0.0j, -1.5 + 0.0j, 1.2 + 1.2j, -0.3 - 1.9j)
_BCH_NBARS = (0.0, 0.3, 0.7, 1.2, 2.0)


def _check_bch_coherent(rng: np.random.Generator, full: bool) -> float:
    worst = 0.0
    for s in _BCH_S:
        for alpha in _BCH_ALPHAS:
            got = orc.displacement_expectation(
                orc.CoherentVec(alpha), float(s), check_convergence=full
            )
            want = np.exp(-0.5 * s * s) * np.exp(2j * s * alpha.real)
            worst = max(worst, abs(got - want))
    return worst


def _check_bch_thermal(rng: np.random.Generator, full: bool) -> float:
    worst = 0.0
    for s in _BCH_S:
        for nbar in _BCH_NBARS:
            got = orc.displacement_expectation(
                orc.ThermalDiag(nbar), float(s), check_convergence=full
            )
            want = math.exp(-0.5 * s * s * (2.0 * nbar + 1.0))
            worst = max(worst, abs(got - want))
    return worst


def _check_thermal_moments(rng: np.random.Generator, full: bool) -> float:
    worst = 0.0
    for nbar in (0.3, 0.7, 1.5):
        for m in range(1, 5):
            got = orc.thermal_moment(nbar, m, check_convergence=full)
            worst = max(worst, abs(got - math.factorial(m) * nbar**m))
    return worst


def _check_joint_vs_channel(rng: np.random.Generator, full: bool) -> float:
    worst = 0.0
    for _ in range(50 if full else 20):
        rho = _random_state(rng)
        alpha = complex(rng.uniform(-1.4, 1.4), rng.uniform(-1.4, 1.4))
        lambda_eff = rng.uniform(0.05, 0.5)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        state = orc.CoherentVec(alpha)
        joint = orc.joint_evolution(rho, state, lambda_eff, phase, check_convergence=full)
        z = orc.displacement_expectation(state, 2.0 * lambda_eff, check_convergence=full)
        direct = ch.apply_channel(ch.ChannelKernel(z, phase), rho)
        worst = max(worst, float(np.max(np.abs(joint.matrix - direct.matrix))))
    return worst


def _check_brute_force_powers(rng: np.random.Generator, full: bool) -> float:
    worst = 0.0
    for kernel in _random_kernels(rng, 20 if full else 5):
        cohering, decohering = orc.brute_force_powers(
            kernel, seed=int(rng.integers(0, 2**63))
        )
        power = ch.cohering_power(kernel)
        worst = max(
            worst,
            max(0.0, cohering - power),  # sampled gain may never exceed the analytic max
            power - cohering,  # and the basis states in the sample attain it
            abs(decohering - ch.decohering_power(kernel)),
        )
    return worst


def _check_thermal_monotone_slopes(rng: np.random.Generator, full: bool) -> float:
    worst = -math.inf
    for _ in range(20 if full else 8):
        radius = math.exp(rng.uniform(math.log(0.3), math.log(3.0)))
        mass = math.exp(rng.uniform(math.log(0.1), math.log(3.0)))
        beta = math.exp(rng.uniform(math.log(0.3), math.log(5.0)))
        base = (radius, mass, beta)
        for index in range(3):
            step = 0.01 * base[index]
            lo = list(base)
            hi = list(base)
            lo[index] -= step
            hi[index] += step
            slope = (fd.thermal_integral(*hi) - fd.thermal_integral(*lo)) / (2.0 * step)
            worst = max(worst, slope)  # every slope must come out negative
    return worst


def _check_mass_monotone_curves(rng: np.random.Generator, full: bool) -> float:
    worst = -math.inf
    masses = np.geomspace(0.1, 10.0, 50)
    for lam in (0.2, 1.0):
        det = fd.DetectorConfig(omega=1.0, radius=1.0, lam=lam)
        values = [
            ch.cohering_power(fd.kernel_coherent(det, fd.FieldConfig(m, fd.Coherent(1.0))))
            for m in masses
        ]
        worst = max(worst, float(np.max(np.diff(values))))  # strictly decreasing
    return worst


_CHECKS: tuple[tuple[str, Callable[[np.random.Generator, bool], float], float], ...] = (
    ("channel-preserves-states", _check_channel_preserves_states, 1e-12),
    ("choi-cptp", _check_choi_cptp, 1e-12),
    ("frozen-coherence", _check_frozen_coherence, 1e-12),
    ("cohering-attained-on-basis", _check_cohering_attained_on_basis, 1e-12),
    ("remaining-matches-channel", _check_remaining_matches_channel, 1e-12),
    ("commutator-dual-path", _check_commutator_dual_path, 1e-8),
    ("overlap-dual-path", _check_overlap_dual_path, 1e-6),
    ("massless-anchor", _check_massless_anchor, 1e-10),
    ("thermal-cold-limit", _check_thermal_cold_limit, 1e-8),
    ("kernel-physicality", _check_kernel_physicality, 1e-12),
    ("bch-coherent", _check_bch_coherent, 1e-8),
    ("bch-thermal", _check_bch_thermal, 1e-8),
    ("thermal-moments", _check_thermal_moments, 1e-8),
    ("joint-vs-channel", _check_joint_vs_channel, 1e-9),
    ("brute-force-powers", _check_brute_force_powers, 1e-6),
    ("thermal-monotone-slopes", _check_thermal_monotone_slopes, 0.0),
    ("mass-monotone-curves", _check_mass_monotone_curves, 0.0),
)


def run_checks(
    level: str = "fast", seed: int = orc.DEFAULT_SEED, tol_scale: float = 1.0
) -> list[CheckResult]:
    """Run the invariant battery and return one result per check.

    ``full`` turns on the dimension-doubling convergence protocol in the
    oracle checks and enlarges the sampled families; ``tol_scale``
    rescales every tolerance and exists so the failure path can be
    exercised deliberately.
    """
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    full = level == "full"
    rng = np.random.default_rng(seed)
    results = []
    for name, check, tolerance in _CHECKS:
        start = time.perf_counter()
        deviation = check(rng, full)
        results.append(
            CheckResult(name, deviation, tolerance * tol_scale, time.perf_counter() - start)
        )
    return results

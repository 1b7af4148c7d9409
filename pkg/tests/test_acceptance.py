"""Acceptance gate: ten end-to-end checks, one test and one report line each.

Every test measures the deviation it cares about, prints a single
``ACCEPTANCE <n>: PASS/FAIL`` line with the numbers, and asserts the
pinned tolerance together with its runtime budget.
"""

import csv
import io
import json
import math
import time

import numpy as np

from udw_coherence.channel import (
    ChannelKernel,
    QubitState,
    apply_channel,
    cohering_power,
    l1_coherence,
    remaining_coherence,
)
from udw_coherence.cli import main
from udw_coherence.field import (
    Coherent,
    DetectorConfig,
    FieldConfig,
    coherent_overlap,
    coherent_overlap_hypergeometric,
    find_cohering_zero,
    infer_mass,
    kernel_coherent,
    mode_commutator,
    mode_commutator_hypergeometric,
    thermal_integral,
)
from udw_coherence.oracle import (
    DEFAULT_SEED,
    CoherentVec,
    ThermalDiag,
    brute_force_powers,
    displacement_expectation,
    joint_evolution,
    thermal_moment,
)

_TWO_PI = 2.0 * math.pi


def _report(number: int, ok: bool, details: str) -> None:
    print(f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} — {details}")


def _random_density(rng: np.random.Generator) -> QubitState:
    raw = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    mat = raw @ raw.conj().T
    return QubitState.from_matrix(mat / np.trace(mat).real)


def _random_kernel(rng: np.random.Generator) -> ChannelKernel:
    radius = float(rng.uniform(0.0, 1.0))
    angle = float(rng.uniform(0.0, _TWO_PI))
    phase = float(rng.uniform(0.0, _TWO_PI))
    return ChannelKernel(radius * complex(math.cos(angle), math.sin(angle)), phase)


def test_criterion_01_channel_exactness():
    budget, tol = 30.0, 1e-9
    start = time.perf_counter()
    rng = np.random.default_rng(DEFAULT_SEED)
    worst = 0.0
    for _ in range(100):
        rho = _random_density(rng)
        alpha = complex(rng.uniform(-1.4, 1.4), rng.uniform(-1.4, 1.4))  # |alpha| <= 2
        coupling = float(rng.uniform(0.05, 1.0))
        phase = float(rng.uniform(0.0, _TWO_PI))
        state = CoherentVec(alpha)
        evolved = joint_evolution(rho, state, coupling, phase, dim=128, check_convergence=False)
        z = displacement_expectation(state, 2.0 * coupling, dim=128, check_convergence=False)
        predicted = apply_channel(ChannelKernel(z, phase), rho)
        worst = max(worst, float(np.max(np.abs(evolved.matrix - predicted.matrix))))
    elapsed = time.perf_counter() - start
    ok = worst < tol and elapsed < budget
    _report(
        1,
        ok,
        f"joint evolution vs analytic channel: max entrywise deviation {worst:.3e} "
        f"(tol {tol:g}) over 100 random triples in {elapsed:.1f}s (budget {budget:g}s)",
    )
    assert worst < tol
    assert elapsed < budget


def test_criterion_02_displacement_identities():
    budget, tol = 20.0, 1e-8
    start = time.perf_counter()
    couplings = np.linspace(0.2, 1.0, 5)
    alphas = [0.3 + 0.0j, 0.8 + 0.2j, -0.5 + 0.6j, 1.2 - 0.4j, 0.0 + 1.8j]
    worst_coherent = 0.0
    for s in couplings:
        for alpha in alphas:
            value = displacement_expectation(CoherentVec(alpha), float(s), dim=128)
            exact = np.exp(-0.5 * s * s) * np.exp(2j * s * alpha.real)
            worst_coherent = max(worst_coherent, abs(value - exact))
    nbars = [0.1, 0.3, 0.7, 1.5, 3.0]
    worst_thermal = 0.0
    for s in couplings:
        for nbar in nbars:
            value = displacement_expectation(ThermalDiag(nbar), float(s), dim=128)
            exact = math.exp(-0.5 * s * s * (2.0 * nbar + 1.0))
            worst_thermal = max(worst_thermal, abs(value - exact))
    elapsed = time.perf_counter() - start
    worst = max(worst_coherent, worst_thermal)
    ok = worst < tol and elapsed < budget
    _report(
        2,
        ok,
        f"Gaussian displacement identities: coherent deviation {worst_coherent:.3e}, "
        f"thermal deviation {worst_thermal:.3e} (tol {tol:g}) on 5x5 grids in "
        f"{elapsed:.1f}s (budget {budget:g}s)",
    )
    assert worst < tol
    assert elapsed < budget


def test_criterion_03_thermal_moments():
    budget, tol = 10.0, 1e-8
    start = time.perf_counter()
    worst = 0.0
    for nbar in (0.3, 0.7, 1.5):
        for order in range(0, 5):
            value = thermal_moment(nbar, order, dim=128)
            exact = math.factorial(order) * nbar**order
            worst = max(worst, abs(value - exact) / max(1.0, exact))
    elapsed = time.perf_counter() - start
    ok = worst < tol and elapsed < budget
    _report(
        3,
        ok,
        f"thermal moment ladder vs m! nbar^m: worst relative deviation {worst:.3e} "
        f"(tol {tol:g}) for m<=4, nbar in {{0.3, 0.7, 1.5}} in {elapsed:.1f}s "
        f"(budget {budget:g}s)",
    )
    assert worst < tol
    assert elapsed < budget


def test_criterion_04_dual_route_integrals():
    budget, tol, anchor_tol = 10.0, 1e-6, 1e-10
    start = time.perf_counter()
    worst_comm = 0.0
    worst_overlap = 0.0
    for r_over_compton in np.geomspace(0.1, 5.0, 5):
        for mass in np.geomspace(0.2, 5.0, 5):
            radius = float(r_over_compton) * _TWO_PI / float(mass)
            quad = mode_commutator(radius, float(mass))
            closed = mode_commutator_hypergeometric(radius, float(mass))
            worst_comm = max(worst_comm, abs(closed - quad) / quad)
            energy = float(mass)
            quad_a = coherent_overlap(radius, energy, float(mass))
            closed_a = coherent_overlap_hypergeometric(radius, energy, float(mass))
            worst_overlap = max(worst_overlap, abs(closed_a - quad_a) / quad_a)
    worst_anchor = 0.0
    for radius in (0.2, 1.0, 5.0):
        exact = 1.0 / (math.pi**3 * radius**2)
        worst_anchor = max(worst_anchor, abs(mode_commutator(radius, 0.0) - exact) / exact)
    elapsed = time.perf_counter() - start
    ok = worst_comm < tol and worst_overlap < tol and worst_anchor < anchor_tol
    ok = ok and elapsed < budget
    _report(
        4,
        ok,
        f"quadrature vs closed-form routes: commutator {worst_comm:.3e}, overlap "
        f"{worst_overlap:.3e} (tol {tol:g}) on 5x5 grids; massless anchor "
        f"{worst_anchor:.3e} (tol {anchor_tol:g}); {elapsed:.1f}s (budget {budget:g}s)",
    )
    assert worst_comm < tol
    assert worst_overlap < tol
    assert worst_anchor < anchor_tol
    assert elapsed < budget


def test_criterion_05_cohering_power_bound():
    budget, slack = 30.0, 1e-6
    start = time.perf_counter()
    rng = np.random.default_rng(DEFAULT_SEED)
    worst_excess = -math.inf
    worst_attain = 0.0
    for _ in range(20):
        kernel = _random_kernel(rng)
        bound = abs(kernel.z.imag)
        estimate, _ = brute_force_powers(kernel, n_samples=10_000)
        worst_excess = max(worst_excess, estimate - bound)
        for basis in (QubitState.ground(), QubitState.excited()):
            attained = l1_coherence(apply_channel(kernel, basis))
            worst_attain = max(worst_attain, abs(attained - bound))
    elapsed = time.perf_counter() - start
    ok = worst_excess < slack and worst_attain < 1e-12 and elapsed < budget
    _report(
        5,
        ok,
        f"sampled cohering power never beats |Im z|: worst excess {worst_excess:.3e} "
        f"(slack {slack:g}) over 20 kernels x 10^4 samples; basis states attain the "
        f"bound to {worst_attain:.3e}; {elapsed:.1f}s (budget {budget:g}s)",
    )
    assert worst_excess < slack
    assert worst_attain < 1e-12
    assert elapsed < budget


def test_criterion_06_frozen_coherence():
    budget, tol = 1.0, 1e-12
    start = time.perf_counter()
    rng = np.random.default_rng(DEFAULT_SEED)
    worst = 0.0
    for _ in range(100):
        kernel = _random_kernel(rng)
        worst = max(worst, abs(remaining_coherence(kernel, kernel.phase) - 1.0))
    elapsed = time.perf_counter() - start
    ok = worst < tol and elapsed < budget
    _report(
        6,
        ok,
        f"coherence frozen at the channel phase: worst deviation from 1 is "
        f"{worst:.3e} (tol {tol:g}) over 100 kernels in {elapsed:.2f}s "
        f"(budget {budget:g}s)",
    )
    assert worst < tol
    assert elapsed < budget


def test_criterion_07_monotonicity():
    budget = 60.0
    start = time.perf_counter()
    rng = np.random.default_rng(DEFAULT_SEED)
    worst_slope = -math.inf
    for _ in range(20):
        radius = float(rng.uniform(0.4, 3.0))
        mass = float(rng.uniform(0.1, 3.0))
        beta = float(rng.uniform(0.3, 5.0))
        for which, at in (("radius", radius), ("mass", mass), ("beta", beta)):
            h = 0.01 * at
            if which == "radius":
                hi = thermal_integral(at + h, mass, beta)
                lo = thermal_integral(at - h, mass, beta)
            elif which == "mass":
                hi = thermal_integral(radius, at + h, beta)
                lo = thermal_integral(radius, at - h, beta)
            else:
                hi = thermal_integral(radius, mass, at + h)
                lo = thermal_integral(radius, mass, at - h)
            worst_slope = max(worst_slope, (hi - lo) / (2.0 * h))
    worst_diff = -math.inf
    for lam in (0.2, 1.0):
        det = DetectorConfig(omega=1.0, radius=1.0, lam=lam)
        masses = np.geomspace(0.1, 10.0, 50)
        values = [
            cohering_power(kernel_coherent(det, FieldConfig(float(m), Coherent(1.0))))
            for m in masses
        ]
        worst_diff = max(worst_diff, float(np.max(np.diff(values))))
    elapsed = time.perf_counter() - start
    ok = worst_slope < 0.0 and worst_diff < 0.0 and elapsed < budget
    _report(
        7,
        ok,
        f"monotonicity: dephasing integral slopes all negative (max {worst_slope:.3e}) "
        f"at 20 random points; cohering power strictly decreasing in mass at weak "
        f"coupling (max step {worst_diff:.3e}); {elapsed:.1f}s (budget {budget:g}s)",
    )
    assert worst_slope < 0.0
    assert worst_diff < 0.0
    assert elapsed < budget


def test_criterion_08_zero_crossing():
    budget, power_tol, residue_tol = 10.0, 1e-10, 1e-8
    start = time.perf_counter()
    compton = _TWO_PI  # mass 1
    det = DetectorConfig(omega=1.0, radius=1.0, lam=compton)
    field = FieldConfig(1.0, Coherent(1.0))
    root = find_cohering_zero(det, field, 0.1 * compton, 0.3 * compton)
    at_root = DetectorConfig(omega=1.0, radius=root, lam=compton)
    power = cohering_power(kernel_coherent(at_root, field))
    turns = 4.0 * compton * coherent_overlap(root, 1.0, 1.0)
    residue = abs(turns - round(turns / math.pi) * math.pi)
    elapsed = time.perf_counter() - start
    ok = power < power_tol and residue < residue_tol and elapsed < budget
    _report(
        8,
        ok,
        f"oscillation node located at R = {root:.9g}: cohering power {power:.3e} "
        f"(tol {power_tol:g}), phase residue {residue:.3e} (tol {residue_tol:g}); "
        f"{elapsed:.1f}s (budget {budget:g}s)",
    )
    assert power < power_tol
    assert residue < residue_tol
    assert elapsed < budget


def test_criterion_09_surface_shapes(tmp_path):
    budget = 300.0
    start = time.perf_counter()
    lam_values = (0.2, 1.0, 5.0)
    surfaces = {}
    for lam_over_compton in lam_values:
        spec_path = tmp_path / f"surface_{lam_over_compton}.json"
        out_path = tmp_path / f"surface_{lam_over_compton}.csv"
        spec_path.write_text(
            json.dumps(
                {
                    "quantity": "cohering-coherent",
                    "axes": [
                        {"group": "e_over_m", "min": 0.1, "max": 10.0, "steps": 50,
                         "scale": "log"},
                        {"group": "r_over_compton", "min": 0.01, "max": 5.0, "steps": 50},
                    ],
                    "fixed": {"lam_over_compton": lam_over_compton},
                }
            )
        )
        code = main(["sweep", "--spec", str(spec_path), "--out", str(out_path)])
        assert code == 0
        lines = out_path.read_text().splitlines()
        rows = list(csv.reader(io.StringIO("\n".join(lines[2:]))))
        assert all(row[3] == "" for row in rows)
        values = np.array([float(row[2]) for row in rows]).reshape(50, 50)
        surfaces[lam_over_compton] = values

    # (i) the damping envelope exp(-2 lam^2 K) is pointwise smaller at the
    # strongest coupling than at the weakest, on the swept radii
    radii = np.linspace(0.01, 5.0, 50) * _TWO_PI
    commutators = np.array([mode_commutator(float(r), 1.0) for r in radii])
    envelope_weak = np.exp(-2.0 * (0.2 * _TWO_PI) ** 2 * commutators)
    envelope_strong = np.exp(-2.0 * (5.0 * _TWO_PI) ** 2 * commutators)
    envelope_gap = float(np.max(envelope_strong - envelope_weak))

    # (ii) decay in the joint large-radius, large-energy regime: the far
    # radius row must sit far below the global maximum.  (The far energy
    # row alone cannot decay: toward the pointlike corner the kernel phase
    # grows with energy and keeps oscillating at full amplitude.)
    ratios = {}
    energy_row_ratios = {}
    for lam_over_compton, values in surfaces.items():
        global_max = float(values.max())
        ratios[lam_over_compton] = float(values[:, -1].max()) / global_max
        energy_row_ratios[lam_over_compton] = float(values[-1, :].max()) / global_max
    worst_ratio = max(ratios.values())
    elapsed = time.perf_counter() - start
    ok = envelope_gap <= 0.0 and worst_ratio < 0.10 and elapsed < budget
    pct = {k: f"{100*v:.2f}%" for k, v in ratios.items()}
    pct_e = {k: f"{100*v:.2f}%" for k, v in energy_row_ratios.items()}
    _report(
        9,
        ok,
        f"three 50x50 surfaces via the CLI: envelope(strong)-envelope(weak) max gap "
        f"{envelope_gap:.3e} (must be <= 0); far-radius row / global max {pct} "
        f"(tol 10%); far-energy row for reference {pct_e}; {elapsed:.1f}s "
        f"(budget {budget:g}s)",
    )
    assert envelope_gap <= 0.0
    assert worst_ratio < 0.10
    assert elapsed < budget


def test_criterion_10_mass_round_trip():
    budget, tol = 30.0, 1e-6
    start = time.perf_counter()
    det = DetectorConfig(omega=1.0, radius=1.0, lam=1.0)
    worst = 0.0
    for true_mass in (0.5, 1.0, 2.0):
        target = cohering_power(
            kernel_coherent(det, FieldConfig(true_mass, Coherent(1.0)))
        )
        recovered = infer_mass(target, det, 1.0, 0.5 * true_mass, 2.0 * true_mass)
        worst = max(worst, abs(recovered - true_mass) / true_mass)
    elapsed = time.perf_counter() - start
    ok = worst < tol and elapsed < budget
    _report(
        10,
        ok,
        f"mass recovered from its own cohering power: worst relative error "
        f"{worst:.3e} (tol {tol:g}) for masses {{0.5, 1, 2}} in {elapsed:.1f}s "
        f"(budget {budget:g}s)",
    )
    assert worst < tol
    assert elapsed < budget

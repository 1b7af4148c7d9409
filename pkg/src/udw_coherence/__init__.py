"""Coherence generated and destroyed in a qubit by a kicked scalar field.

A two-level system coupled for a single instant to a massive scalar
field undergoes an exactly solvable channel parameterized by one complex
number.  This package computes that kernel for coherent and thermal
field states, the resulting cohering and decohering powers, inverts the
power-mass relation, and cross-checks everything against a truncated
number-basis oracle.
"""

__version__ = "0.1.0"

from .channel import (
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
from .field import (
    Coherent,
    DerivedScales,
    DetectorConfig,
    FieldConfig,
    NonMonotoneError,
    SurfacePoint,
    TargetOutOfRangeError,
    Thermal,
    cohering_power_surface,
    coherent_overlap,
    coherent_overlap_hypergeometric,
    find_cohering_zero,
    infer_mass,
    kernel_coherent,
    kernel_thermal,
    mode_commutator,
    mode_commutator_hypergeometric,
    smearing_fourier,
    smearing_profile,
    thermal_integral,
)
from .numerics import (
    BracketError,
    QuadratureError,
    QuadratureResult,
    bisect_monotone,
    coth_stable,
    gamma_fn,
    integrate_semi_infinite,
    tricomi_u,
)
from .oracle import (
    CoherentVec,
    FockWorkspace,
    ThermalDiag,
    TruncationError,
    brute_force_powers,
    displacement_expectation,
    fock_workspace,
    joint_evolution,
    mode_density,
    thermal_moment,
)

__all__ = [
    "__version__",
    "ChannelKernel",
    "MaxCoherentQubit",
    "QubitState",
    "apply_channel",
    "choi_matrix",
    "cohering_power",
    "decohering_power",
    "dephase",
    "l1_coherence",
    "monopole_matrix",
    "remaining_coherence",
    "Coherent",
    "DerivedScales",
    "DetectorConfig",
    "FieldConfig",
    "NonMonotoneError",
    "SurfacePoint",
    "TargetOutOfRangeError",
    "Thermal",
    "cohering_power_surface",
    "coherent_overlap",
    "coherent_overlap_hypergeometric",
    "find_cohering_zero",
    "infer_mass",
    "kernel_coherent",
    "kernel_thermal",
    "mode_commutator",
    "mode_commutator_hypergeometric",
    "smearing_fourier",
    "smearing_profile",
    "thermal_integral",
    "BracketError",
    "QuadratureError",
    "QuadratureResult",
    "bisect_monotone",
    "coth_stable",
    "gamma_fn",
    "integrate_semi_infinite",
    "tricomi_u",
    "CoherentVec",
    "FockWorkspace",
    "ThermalDiag",
    "TruncationError",
    "brute_force_powers",
    "displacement_expectation",
    "fock_workspace",
    "joint_evolution",
    "mode_density",
    "thermal_moment",
]

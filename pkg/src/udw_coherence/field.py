"""Scalar-field model: physical parameters to channel kernel and powers.

A Gaussian-smeared detector kicked once couples to a single effective
field mode.  Everything downstream (cohering power, decohering power,
mass inference) reduces to three radial integrals over the mode label:
the effective mode's commutator normalization, the real part of the
coherent amplitude it sees, and a thermal two-point function.  Each
integral has a direct quadrature route and, for massive fields, a closed
form in terms of the Tricomi function; the quadrature route is ground
truth and the closed form is kept as an independent cross-check.

All quantities are in natural units.  The detector's energy gap sets the
scale (omega = 1 in the CLI); masses, radii and couplings are plain
numbers in those units here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .channel import ChannelKernel, cohering_power
from .numerics import (
    BracketError,
    bisect_monotone,
    coth_stable,
    gamma_fn,
    integrate_semi_infinite,
    QuadratureError,
    tricomi_u,
)

__all__ = [
    "DetectorConfig",
    "Coherent",
    "Thermal",
    "FieldConfig",
    "DerivedScales",
    "SurfacePoint",
    "NonMonotoneError",
    "TargetOutOfRangeError",
    "smearing_profile",
    "smearing_fourier",
    "mode_commutator",
    "mode_commutator_hypergeometric",
    "coherent_overlap",
    "coherent_overlap_hypergeometric",
    "kernel_coherent",
    "thermal_integral",
    "kernel_thermal",
    "cohering_power_surface",
    "find_cohering_zero",
    "infer_mass",
]

_TWO_PI = 2.0 * math.pi


class NonMonotoneError(ValueError):
    """The cohering-power curve is not monotone on the requested bracket."""


class TargetOutOfRangeError(ValueError):
    """The target value lies outside the curve's range on the bracket."""


@dataclass(frozen=True)
class DetectorConfig:
    """Two-level detector: gap ``omega``, smearing radius, coupling, kick time."""

    omega: float
    radius: float
    lam: float
    t0: float = 0.0

    def __post_init__(self) -> None:
        if self.omega <= 0.0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.radius < 0.0:
            raise ValueError(f"radius must be non-negative, got {self.radius}")
        if self.lam < 0.0:
            raise ValueError(f"lam must be non-negative, got {self.lam}")

    @property
    def phase(self) -> float:
        return self.omega * self.t0


@dataclass(frozen=True)
class Coherent:
    """Coherent field state with Gaussian amplitude profile of mean energy E."""

    mean_energy: float

    def __post_init__(self) -> None:
        if self.mean_energy <= 0.0:
            raise ValueError(f"mean_energy must be positive, got {self.mean_energy}")


@dataclass(frozen=True)
class Thermal:
    """Thermal field state at inverse temperature beta."""

    inverse_temperature: float

    def __post_init__(self) -> None:
        if self.inverse_temperature <= 0.0:
            raise ValueError(
                f"inverse_temperature must be positive, got {self.inverse_temperature}"
            )


@dataclass(frozen=True)
class FieldConfig:
    mass: float
    state: Union[Coherent, Thermal]

    def __post_init__(self) -> None:
        if self.mass < 0.0:
            raise ValueError(f"mass must be non-negative, got {self.mass}")


@dataclass(frozen=True)
class DerivedScales:
    """Compton wavelength and the width of the coherent amplitude profile."""

    compton: float
    sigma: float

    @classmethod
    def for_parameters(cls, mass: float, energy: float, radius: float) -> "DerivedScales":
        compton = math.inf if mass == 0.0 else _TWO_PI / mass
        inv_sq = 4.0 / (math.pi * energy**2) + math.pi * radius**2 / 8.0
        return cls(compton, 1.0 / math.sqrt(inv_sq))


def smearing_profile(r: float, radius: float) -> float:
    """Normalised spatial smearing profile at distance ``r`` from the detector."""
    norm = (math.pi * radius / 2.0) ** 3
    return math.exp(-4.0 * r * r / (math.pi * radius * radius)) / norm


def smearing_fourier(k: float, radius: float) -> float:
    """Fourier transform of the smearing profile, exp(-pi k^2 R^2 / 16)."""
    return math.exp(-math.pi * k * k * radius * radius / 16.0)


@lru_cache(maxsize=None)
def _mode_commutator_cached(radius: float, mass: float, rel_tol: float) -> float:
    scale = math.sqrt(8.0 / math.pi) / radius

    def integrand(k: float) -> float:
        return k * k * math.exp(-math.pi * k * k * radius * radius / 8.0) / math.hypot(k, mass)

    res = integrate_semi_infinite(integrand, rel_tol, gaussian_scale=scale)
    return res.value / (4.0 * math.pi**2)


def mode_commutator(radius: float, mass: float, rel_tol: float = 1e-10) -> float:
    """Commutator normalisation of the effective mode seen by the detector.

    Radial integral of k^2 |F(k)|^2 / omega(k) over the mode label with the
    squared smearing transform as the weight; positive, and divergent in
    the pointlike limit, which is why radius = 0 is rejected.
    """
    if radius <= 0.0:
        raise ValueError(
            "mode_commutator diverges for a pointlike detector; radius must be > 0"
        )
    if mass < 0.0:
        raise ValueError(f"mass must be non-negative, got {mass}")
    return _mode_commutator_cached(radius, mass, rel_tol)


def mode_commutator_hypergeometric(radius: float, mass: float) -> float:
    """Closed form of :func:`mode_commutator` for massive fields.

    (sqrt(pi)/4 lambda_C^2) U(3/2, 2, pi^3 R^2 / 2 lambda_C^2) with
    lambda_C the Compton wavelength; independent evaluation route used to
    cross-check the quadrature.
    """
    if radius <= 0.0:
        raise ValueError("radius must be > 0")
    if mass <= 0.0:
        raise ValueError("the closed form requires mass > 0; use mode_commutator")
    compton_sq = (_TWO_PI / mass) ** 2
    zarg = math.pi**3 * radius**2 / (2.0 * compton_sq)
    return math.sqrt(math.pi) / (4.0 * compton_sq) * tricomi_u(1.5, 2.0, zarg)


@lru_cache(maxsize=None)
def _coherent_overlap_cached(
    radius: float, energy: float, mass: float, rel_tol: float
) -> float:
    sigma = DerivedScales.for_parameters(mass, energy, radius).sigma
    prefactor = math.sqrt(8.0 / (math.pi**4 * energy**3))
    inv_two_sigma_sq = 0.5 / (sigma * sigma)

    def integrand(k: float) -> float:
        return k**2.5 * math.exp(-k * k * inv_two_sigma_sq) / math.hypot(k, mass)

    res = integrate_semi_infinite(integrand, rel_tol, gaussian_scale=sigma * math.sqrt(2.0))
    return prefactor * res.value


def coherent_overlap(
    radius: float, energy: float, mass: float, rel_tol: float = 1e-10
) -> float:
    """Mean real amplitude of the effective mode in the coherent field state.

    Finite for every radius (including zero) because the amplitude profile
    itself cuts the integrand off; grows with the field energy at fixed
    mass and drives the oscillatory part of the kernel.
    """
    if energy <= 0.0:
        raise ValueError(f"energy must be positive, got {energy}")
    if mass < 0.0 or radius < 0.0:
        raise ValueError("mass and radius must be non-negative")
    return _coherent_overlap_cached(radius, energy, mass, rel_tol)


def coherent_overlap_hypergeometric(radius: float, energy: float, mass: float) -> float:
    """Closed form of :func:`coherent_overlap` for massive fields.

    m sqrt(2 m^3 / pi^4 E^3) Gamma(7/4) U(7/4, 9/4, m^2/2 sigma^2).  The
    overall factor of m makes this route unusable at mass = 0 even though
    the integral itself stays finite there (the U function compensates
    with a power divergence as its argument vanishes); the quadrature
    route is authoritative.
    """
    if mass <= 0.0:
        raise ValueError("the closed form requires mass > 0; use coherent_overlap")
    if energy <= 0.0:
        raise ValueError(f"energy must be positive, got {energy}")
    sigma = DerivedScales.for_parameters(mass, energy, radius).sigma
    zarg = mass * mass / (2.0 * sigma * sigma)
    pref = mass * math.sqrt(2.0 * mass**3 / (math.pi**4 * energy**3))
    return pref * gamma_fn(1.75) * tricomi_u(1.75, 2.25, zarg)


def kernel_coherent(
    det: DetectorConfig, field: FieldConfig, rel_tol: float = 1e-10
) -> ChannelKernel:
    """Channel kernel for a coherent field state.

    z = exp(-2 lam^2 [a, a+]) * exp(i 4 lam Re<a>): the modulus depends
    only on the coupling and the mode commutator, the phase only on the
    coherent amplitude.
    """
    if not isinstance(field.state, Coherent):
        raise TypeError("kernel_coherent requires a Coherent field state")
    if det.radius == 0.0:
        raise ValueError("pointlike detector: mode commutator diverges, kernel is 0")
    commutator = mode_commutator(det.radius, field.mass, rel_tol)
    overlap = coherent_overlap(det.radius, field.state.mean_energy, field.mass, rel_tol)
    z = math.exp(-2.0 * det.lam**2 * commutator) * np.exp(1j * 4.0 * det.lam * overlap)
    return ChannelKernel(complex(z), det.phase)


@lru_cache(maxsize=None)
def _thermal_integral_cached(
    radius: float, mass: float, beta: float, rel_tol: float
) -> float:
    scale = math.sqrt(8.0 / math.pi) / radius

    def integrand(k: float) -> float:
        omega = math.hypot(k, mass)
        weight = math.exp(-math.pi * k * k * radius * radius / 8.0)
        return k * k * weight * coth_stable(0.5 * beta * omega) / omega

    res = integrate_semi_infinite(integrand, rel_tol, gaussian_scale=scale)
    return res.value / (2.0 * math.pi**2)


def thermal_integral(
    radius: float, mass: float, beta: float, rel_tol: float = 1e-10
) -> float:
    """Smeared symmetric two-point function of the thermal field state.

    Reduces to twice the mode commutator as beta grows (coth -> 1) and
    grows without bound as the temperature rises.  For a massless field
    the integrand tends to the finite value 2/beta at small k, so the
    integral stays convergent; only the pointlike limit diverges.
    """
    if radius <= 0.0:
        raise ValueError(
            "thermal_integral diverges for a pointlike detector; radius must be > 0"
        )
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    if mass < 0.0:
        raise ValueError(f"mass must be non-negative, got {mass}")
    return _thermal_integral_cached(radius, mass, beta, rel_tol)


def kernel_thermal(
    det: DetectorConfig, field: FieldConfig, rel_tol: float = 1e-10
) -> ChannelKernel:
    """Channel kernel for a thermal field state: real, positive, no cohering."""
    if not isinstance(field.state, Thermal):
        raise TypeError("kernel_thermal requires a Thermal field state")
    if det.radius == 0.0:
        raise ValueError("pointlike detector: thermal two-point function diverges")
    integral = thermal_integral(
        det.radius, field.mass, field.state.inverse_temperature, rel_tol
    )
    return ChannelKernel(complex(math.exp(-det.lam**2 * integral)), det.phase)


@dataclass(frozen=True)
class SurfacePoint:
    """One grid point of a cohering-power surface; ``error`` marks a failed point."""

    e_over_m: float
    r_over_compton: float
    lam_over_compton: float
    value: float
    error: str | None = None


def cohering_power_surface(
    e_over_m: "np.ndarray | list[float]",
    r_over_compton: "np.ndarray | list[float]",
    lam_over_compton: float,
    *,
    undamped: bool = False,
    rel_tol: float = 1e-10,
) -> list[SurfacePoint]:
    """Cohering power of a coherent field over a dimensionless parameter grid.

    Axes are the field energy in mass units and the detector radius in
    Compton wavelengths, at a fixed coupling in Compton wavelengths; the
    mass drops out of the dimensionless surface.  ``undamped`` strips the
    exponential envelope and keeps only |sin| of the kernel phase, which
    exposes the zero crossings the envelope would hide.  Row order is
    row-major over (e_over_m, r_over_compton); a grid point whose
    quadrature fails is recorded with a NaN value and the failure message
    rather than aborting the sweep.
    """
    mass = 1.0  # dimensionless surface: every group is scaled by the mass
    compton = _TWO_PI / mass
    lam = lam_over_compton * compton
    points: list[SurfacePoint] = []
    for e in np.asarray(e_over_m, dtype=float):
        for r in np.asarray(r_over_compton, dtype=float):
            radius = r * compton
            energy = e * mass
            try:
                overlap = coherent_overlap(radius, energy, mass, rel_tol)
                oscillation = abs(math.sin(4.0 * lam * overlap))
                if undamped:
                    value = oscillation
                else:
                    envelope = math.exp(
                        -2.0 * lam**2 * mode_commutator(radius, mass, rel_tol)
                    )
                    value = envelope * oscillation
                points.append(SurfacePoint(float(e), float(r), lam_over_compton, value))
            except (QuadratureError, ValueError) as exc:
                points.append(
                    SurfacePoint(float(e), float(r), lam_over_compton, math.nan, str(exc))
                )
    return points


def find_cohering_zero(
    det: DetectorConfig,
    field: FieldConfig,
    r_lo: float,
    r_hi: float,
    *,
    rel_tol: float = 1e-10,
    tol: float = 1e-13,
) -> float:
    """Radius at which the cohering power vanishes exactly, inside [r_lo, r_hi].

    Solves sin(4 lam Re<a>) = 0 by bisection, so the bracket must straddle
    a sign change of the oscillation; the root is a genuine node (the
    kernel phase hits a non-zero multiple of pi), not the trivial
    large-radius decay.
    """
    if not isinstance(field.state, Coherent):
        raise TypeError("find_cohering_zero requires a Coherent field state")
    if det.lam <= 0.0:
        raise ValueError("zero coupling: the kernel phase vanishes identically")
    energy = field.state.mean_energy

    def oscillation(radius: float) -> float:
        return math.sin(4.0 * det.lam * coherent_overlap(radius, energy, field.mass, rel_tol))

    root = bisect_monotone(oscillation, r_lo, r_hi, tol)
    turns = 4.0 * det.lam * coherent_overlap(root, energy, field.mass, rel_tol) / math.pi
    if round(turns) < 1:
        raise BracketError(
            f"bracket [{r_lo}, {r_hi}] converged to the trivial zero (phase {turns:g} pi)"
        )
    return root


def infer_mass(
    c_target: float,
    det: DetectorConfig,
    energy: float,
    m_lo: float,
    m_hi: float,
    *,
    samples: int = 33,
    rel_tol: float = 1e-10,
) -> float:
    """Field mass whose cohering power equals ``c_target``, inside [m_lo, m_hi].

    The inverse problem is well posed only where the cohering power is in
    one-to-one correspondence with the mass, so the curve is sampled on a
    geometric grid first and any sign change of its slope aborts the
    inversion.  A target outside the sampled range is refused rather than
    clamped.

    :raises NonMonotoneError: the sampled curve changes direction.
    :raises TargetOutOfRangeError: ``c_target`` is not attained on the bracket.
    """
    if not 0.0 < m_lo < m_hi:
        raise ValueError(f"need 0 < m_lo < m_hi, got [{m_lo}, {m_hi}]")
    if c_target < 0.0:
        raise ValueError(f"c_target must be non-negative, got {c_target}")

    def curve(mass: float) -> float:
        kernel = kernel_coherent(det, FieldConfig(mass, Coherent(energy)), rel_tol)
        return cohering_power(kernel)

    grid = np.geomspace(m_lo, m_hi, samples)
    values = np.array([curve(m) for m in grid])
    diffs = np.diff(values)
    if not (np.all(diffs > 0.0) or np.all(diffs < 0.0)):
        flip = int(np.argmin(diffs * diffs[0]))
        raise NonMonotoneError(
            "cohering power is not monotone on the bracket: slope changes sign "
            f"near m = {grid[flip]:.6g}; the inverse problem is ill posed here"
        )
    lo_val, hi_val = float(values[0]), float(values[-1])
    low, high = min(lo_val, hi_val), max(lo_val, hi_val)
    if not low <= c_target <= high:
        raise TargetOutOfRangeError(
            f"target {c_target:g} outside the attained range [{low:g}, {high:g}]"
        )
    return bisect_monotone(lambda m: curve(m) - c_target, m_lo, m_hi, 1e-12)

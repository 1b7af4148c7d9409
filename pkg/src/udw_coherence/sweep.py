"""Parameter sweeps over the dimensionless groups, with delimited output.

Physical inputs arrive as dimensionless groups (energy in mass units,
radius in Compton wavelengths, coupling times gap, ...) and are resolved
against an internal scale of omega = 1.  A sweep walks a one- or
two-axis grid in row-major order, evaluates one quantity per point, and
writes CSV or JSON that is byte-identical across reruns of the same
spec.  A point whose evaluation fails is recorded in place with an error
marker instead of aborting the grid.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from io import StringIO
from typing import Iterable, Optional

import numpy as np

from .channel import cohering_power, decohering_power
from .field import (
    Coherent,
    DetectorConfig,
    FieldConfig,
    Thermal,
    coherent_overlap,
    kernel_coherent,
    kernel_thermal,
)

__all__ = [
    "GROUPS",
    "QUANTITIES",
    "UsageError",
    "Axis",
    "SweepSpec",
    "ResolvedPoint",
    "resolve_groups",
    "require_groups",
    "evaluate_quantity",
    "value_columns",
    "run_sweep",
    "SweepRow",
    "write_csv",
    "write_json",
]

CSV_SIGNATURE = "# udw-coherence v1"

GROUPS = (
    "e_over_m",
    "e_over_omega",
    "m_over_omega",
    "r_omega",
    "r_over_compton",
    "lam_omega",
    "lam_over_compton",
    "beta_omega",
)

RAW_KEYS = ("omega", "radius", "lam", "t0", "mass", "energy", "beta")

QUANTITIES = ("cohering-coherent", "cohering-undamped", "decohering-thermal", "kernel")

_TWO_PI = 2.0 * math.pi


class UsageError(ValueError):
    """Invalid group combination or malformed sweep spec; maps to exit code 2."""


@dataclass(frozen=True)
class ResolvedPoint:
    """Raw physical parameters after group resolution (omega = 1 scale)."""

    omega: float
    radius: float
    lam: float
    t0: float
    mass: float
    energy: Optional[float]
    beta: Optional[float]

    def detector(self) -> DetectorConfig:
        return DetectorConfig(self.omega, self.radius, self.lam, self.t0)

    def field_config(self) -> FieldConfig:
        if self.energy is not None:
            return FieldConfig(self.mass, Coherent(self.energy))
        if self.beta is not None:
            return FieldConfig(self.mass, Thermal(self.beta))
        raise UsageError(
            "no field state: set exactly one of e_over_m, e_over_omega, beta_omega"
        )


def _exactly_one(groups: dict, names: tuple[str, ...], what: str) -> Optional[str]:
    present = [name for name in names if name in groups]
    if len(present) > 1:
        raise UsageError(f"conflicting {what} groups: {', '.join(present)}")
    return present[0] if present else None


def resolve_groups(groups: dict, *, raw: bool = False) -> ResolvedPoint:
    """Turn a group->value mapping into raw physical parameters.

    In raw mode the keys are the physical parameter names themselves.
    Every group must be recognised; state groups are mutually exclusive;
    Compton-scaled groups imply mass = omega unless m_over_omega pins it.
    """
    if raw:
        unknown = set(groups) - set(RAW_KEYS)
        if unknown:
            raise UsageError(f"unknown raw parameters: {', '.join(sorted(unknown))}")
        if "energy" in groups and "beta" in groups:
            raise UsageError("conflicting state parameters: energy, beta")
        return ResolvedPoint(
            omega=float(groups.get("omega", 1.0)),
            radius=float(groups.get("radius", 0.0)),
            lam=float(groups.get("lam", 0.0)),
            t0=float(groups.get("t0", 0.0)),
            mass=float(groups.get("mass", 0.0)),
            energy=float(groups["energy"]) if "energy" in groups else None,
            beta=float(groups["beta"]) if "beta" in groups else None,
        )

    unknown = set(groups) - set(GROUPS)
    if unknown:
        raise UsageError(
            f"unknown groups: {', '.join(sorted(unknown))}; valid groups are "
            + ", ".join(GROUPS)
        )
    omega = 1.0
    mass = float(groups["m_over_omega"]) * omega if "m_over_omega" in groups else omega

    e_group = _exactly_one(groups, ("e_over_m", "e_over_omega"), "energy")
    b_group = _exactly_one(groups, ("beta_omega",), "temperature")
    if e_group and b_group:
        raise UsageError(f"conflicting state groups: {e_group}, {b_group}")

    r_group = _exactly_one(groups, ("r_omega", "r_over_compton"), "radius")
    lam_group = _exactly_one(groups, ("lam_omega", "lam_over_compton"), "coupling")

    def per_compton(value: float, group: str) -> float:
        if mass <= 0.0:
            raise UsageError(f"{group} needs a positive mass (set m_over_omega > 0)")
        return value * _TWO_PI / mass

    radius = 0.0
    if r_group == "r_omega":
        radius = float(groups[r_group]) / omega
    elif r_group == "r_over_compton":
        radius = per_compton(float(groups[r_group]), r_group)

    lam = 0.0
    if lam_group == "lam_omega":
        lam = float(groups[lam_group]) / omega
    elif lam_group == "lam_over_compton":
        lam = per_compton(float(groups[lam_group]), lam_group)

    energy = None
    if e_group == "e_over_omega":
        energy = float(groups[e_group]) * omega
    elif e_group == "e_over_m":
        if mass <= 0.0:
            raise UsageError("e_over_m needs a positive mass (set m_over_omega > 0)")
        energy = float(groups[e_group]) * mass

    beta = float(groups["beta_omega"]) / omega if b_group else None
    return ResolvedPoint(omega, radius, lam, 0.0, mass, energy, beta)


def require_groups(names: Iterable[str], quantity: str) -> None:
    """Check group presence by name; raise naming the missing group."""
    present = set(names)
    if not present & {"r_omega", "r_over_compton"}:
        raise UsageError(f"{quantity} needs a radius group: set r_omega or r_over_compton")
    if not present & {"lam_omega", "lam_over_compton"}:
        raise UsageError(
            f"{quantity} needs a coupling group: set lam_omega or lam_over_compton"
        )
    energy_groups = present & {"e_over_m", "e_over_omega"}
    if quantity in ("cohering-coherent", "cohering-undamped") and not energy_groups:
        raise UsageError(
            f"{quantity} needs a coherent state: set e_over_m or e_over_omega"
        )
    if quantity == "decohering-thermal" and "beta_omega" not in present:
        raise UsageError("decohering-thermal needs a thermal state: set beta_omega")
    if not energy_groups and "beta_omega" not in present:
        raise UsageError(
            "no field state group: set exactly one of e_over_m, e_over_omega, beta_omega"
        )


def value_columns(quantity: str) -> tuple[str, ...]:
    if quantity == "kernel":
        return ("re_z", "im_z")
    return (quantity.replace("-", "_"),)


def evaluate_quantity(
    quantity: str, point: ResolvedPoint, rel_tol: float = 1e-10
) -> dict[str, float]:
    """Evaluate one sweep quantity at a resolved parameter point."""
    if quantity not in QUANTITIES:
        raise UsageError(f"unknown quantity {quantity!r}; valid: {', '.join(QUANTITIES)}")
    if quantity == "cohering-coherent":
        kernel = kernel_coherent(point.detector(), point.field_config(), rel_tol)
        return {"cohering_coherent": cohering_power(kernel)}
    if quantity == "cohering-undamped":
        config = point.field_config()
        if not isinstance(config.state, Coherent):
            raise UsageError("cohering-undamped needs a coherent state: set an energy group")
        overlap = coherent_overlap(
            point.radius, config.state.mean_energy, point.mass, rel_tol
        )
        return {"cohering_undamped": abs(math.sin(4.0 * point.lam * overlap))}
    if quantity == "decohering-thermal":
        config = point.field_config()
        if not isinstance(config.state, Thermal):
            raise UsageError("decohering-thermal needs a thermal state: set beta_omega")
        kernel = kernel_thermal(point.detector(), config, rel_tol)
        return {"decohering_thermal": decohering_power(kernel)}
    config = point.field_config()
    if isinstance(config.state, Coherent):
        kernel = kernel_coherent(point.detector(), config, rel_tol)
    else:
        kernel = kernel_thermal(point.detector(), config, rel_tol)
    return {"re_z": kernel.z.real, "im_z": kernel.z.imag}


@dataclass(frozen=True)
class Axis:
    group: str
    min: float
    max: float
    steps: int
    scale: str = "linear"

    def __post_init__(self) -> None:
        if self.group not in GROUPS:
            raise UsageError(f"unknown axis group {self.group!r}")
        if self.steps < 2:
            raise UsageError(f"axis {self.group}: steps must be at least 2")
        if not self.min < self.max:
            raise UsageError(f"axis {self.group}: need min < max")
        if self.scale not in ("linear", "log"):
            raise UsageError(f"axis {self.group}: scale must be 'linear' or 'log'")
        if self.scale == "log" and self.min <= 0.0:
            raise UsageError(f"axis {self.group}: log scale needs min > 0")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.steps)
        return np.linspace(self.min, self.max, self.steps)


@dataclass(frozen=True)
class SweepSpec:
    quantity: str
    axes: tuple[Axis, ...]
    fixed: dict[str, float] = dc_field(default_factory=dict)
    output: Optional[str] = None
    format: str = "csv"

    def __post_init__(self) -> None:
        if self.quantity not in QUANTITIES:
            raise UsageError(
                f"unknown quantity {self.quantity!r}; valid: {', '.join(QUANTITIES)}"
            )
        if not 1 <= len(self.axes) <= 2:
            raise UsageError(f"need 1 or 2 axes, got {len(self.axes)}")
        if self.format not in ("csv", "json"):
            raise UsageError(f"format must be 'csv' or 'json', got {self.format!r}")
        axis_groups = [axis.group for axis in self.axes]
        if len(set(axis_groups)) != len(axis_groups):
            raise UsageError("axes must use distinct groups")
        overlap = set(axis_groups) & set(self.fixed)
        if overlap:
            raise UsageError(f"groups both swept and fixed: {', '.join(sorted(overlap))}")
        for group in self.fixed:
            if group not in GROUPS:
                raise UsageError(f"unknown fixed group {group!r}")

    @classmethod
    def from_json(cls, text: str) -> "SweepSpec":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"sweep spec is not valid JSON: {exc}") from exc
        if not isinstance(payload, dict):
            raise UsageError("sweep spec must be a JSON object")
        known = {"quantity", "axes", "fixed", "output", "format"}
        unknown = set(payload) - known
        if unknown:
            raise UsageError(f"unknown sweep spec fields: {', '.join(sorted(unknown))}")
        try:
            axes = tuple(
                Axis(
                    group=str(entry["group"]),
                    min=float(entry["min"]),
                    max=float(entry["max"]),
                    steps=int(entry["steps"]),
                    scale=str(entry.get("scale", "linear")),
                )
                for entry in payload.get("axes", [])
            )
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed axis entry: {exc}") from exc
        fixed = {str(k): float(v) for k, v in payload.get("fixed", {}).items()}
        return cls(
            quantity=str(payload.get("quantity", "")),
            axes=axes,
            fixed=fixed,
            output=payload.get("output"),
            format=str(payload.get("format", "csv")),
        )

    def grid(self) -> list[dict[str, float]]:
        """Group assignments for every grid point, row-major in axis order."""
        axis_values = [axis.values() for axis in self.axes]
        points = []
        if len(self.axes) == 1:
            for v0 in axis_values[0]:
                points.append({self.axes[0].group: float(v0), **self.fixed})
        else:
            for v0 in axis_values[0]:
                for v1 in axis_values[1]:
                    points.append(
                        {
                            self.axes[0].group: float(v0),
                            self.axes[1].group: float(v1),
                            **self.fixed,
                        }
                    )
        return points


@dataclass(frozen=True)
class SweepRow:
    coords: tuple[float, ...]
    values: Optional[dict[str, float]]
    error: Optional[str]


def _static_group_check(spec: SweepSpec) -> None:
    # catch misassembled specs before launching workers: presence and
    # exclusivity depend only on names, not values
    names = set(spec.fixed) | {axis.group for axis in spec.axes}
    require_groups(names, spec.quantity)
    resolve_groups({name: 1.0 for name in names})


def _point_task(args: tuple) -> tuple[int, Optional[dict[str, float]], Optional[str]]:
    index, quantity, groups, rel_tol = args
    try:
        values = evaluate_quantity(quantity, resolve_groups(groups), rel_tol)
        return index, values, None
    except Exception as exc:  # per-point failure becomes a marked row
        return index, None, f"{type(exc).__name__}: {exc}"


def run_sweep(
    spec: SweepSpec, *, workers: int = 1, rel_tol: float = 1e-10
) -> list[SweepRow]:
    """Evaluate the grid; row order is grid order regardless of scheduling."""
    _static_group_check(spec)
    points = spec.grid()
    tasks = [(i, spec.quantity, p, rel_tol) for i, p in enumerate(points)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_point_task, tasks, chunksize=8))
        outcomes.sort(key=lambda item: item[0])
    else:
        outcomes = [_point_task(task) for task in tasks]
    rows = []
    for (index, values, error), groups in zip(outcomes, points):
        coords = tuple(groups[axis.group] for axis in spec.axes)
        rows.append(SweepRow(coords, values, error))
    return rows


def _format_number(value: float) -> str:
    return format(value, ".17g")


def write_csv(spec: SweepSpec, rows: Iterable[SweepRow]) -> str:
    """Render rows as the v1 CSV: signature comment, header row, 17-digit numbers."""
    buf = StringIO()
    columns = value_columns(spec.quantity)
    buf.write(CSV_SIGNATURE + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([axis.group for axis in spec.axes] + list(columns) + ["error"])
    for row in rows:
        cells: list[str] = [_format_number(c) for c in row.coords]
        if row.values is None:
            cells += ["nan"] * len(columns) + [row.error or "failed"]
        else:
            cells += [_format_number(row.values[c]) for c in columns] + [""]
        writer.writerow(cells)
    return buf.getvalue()


def write_json(spec: SweepSpec, rows: Iterable[SweepRow]) -> str:
    columns = value_columns(spec.quantity)
    payload = {
        "version": CSV_SIGNATURE.lstrip("# "),
        "quantity": spec.quantity,
        "axes": [
            {
                "group": axis.group,
                "min": axis.min,
                "max": axis.max,
                "steps": axis.steps,
                "scale": axis.scale,
            }
            for axis in spec.axes
        ],
        "fixed": spec.fixed,
        "columns": list(columns),
        "rows": [
            {
                **{axis.group: row.coords[i] for i, axis in enumerate(spec.axes)},
                **(
                    {c: row.values[c] for c in columns}
                    if row.values is not None
                    else {c: None for c in columns}
                ),
                "error": row.error,
            }
            for row in rows
        ],
    }
    return json.dumps(payload, indent=2) + "\n"
